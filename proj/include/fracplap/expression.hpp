#pragma once

#include <array>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fracplap {

/// Which variables an expression may reference.
///
/// A pointwise expression depends on one point of the domain (`x`, or
/// `x1`,`x2` in 2D); a pairwise expression depends on two (`x`,`y`, or
/// `x1`,`x2`,`y1`,`y2`).
enum class VariableRole { pointwise, pairwise };

/// Values for the four variable slots. Slot 0/1 hold the first point
/// (x or x1,x2), slot 2/3 the second point (y or y1,y2).
using Assignment = std::array<double, 4>;

Assignment point_assignment(std::span<const double> x);
Assignment pair_assignment(std::span<const double> x, std::span<const double> y);

namespace detail {
struct Node;
}

/// Immutable arithmetic expression tree. Copies share structure.
class Expression {
 public:
  Expression() = default;

  double evaluate(const Assignment& point) const;

  /// Fully parenthesized source text that re-parses to an equivalent tree.
  std::string to_string() const;

  int dimension() const { return dimension_; }
  VariableRole role() const { return role_; }
  bool empty() const { return root_ == nullptr; }

  /// True when the tree contains no variables.
  bool is_constant() const;

  // Builders, used by the parser and by tests that generate random trees.
  static Expression literal(double value, int dimension, VariableRole role);
  static Expression variable(int slot, int dimension, VariableRole role);
  static Expression unary_minus(const Expression& operand);
  static Expression binary(char op, const Expression& lhs, const Expression& rhs);
  static Expression call(std::string_view name, std::vector<Expression> args);

 private:
  friend Expression parse_expression(std::string_view, int, VariableRole);

  Expression(std::shared_ptr<const detail::Node> root, int dimension, VariableRole role)
      : root_(std::move(root)), dimension_(dimension), role_(role) {}

  std::shared_ptr<const detail::Node> root_;
  int dimension_ = 1;
  VariableRole role_ = VariableRole::pointwise;
};

/// Parses `source` with precedence `^` > unary `-` > `* /` > `+ -`, where `^`
/// is right-associative. Throws SyntaxError or UnknownVariable.
Expression parse_expression(std::string_view source, int dimension, VariableRole role);

inline double evaluate(const Expression& expr, const Assignment& point) {
  return expr.evaluate(point);
}

/// Variable names accepted for the given dimension and role.
std::vector<std::string> allowed_variables(int dimension, VariableRole role);

}  // namespace fracplap
