#include "fracplap/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <variant>

#include "fracplap/errors.hpp"

namespace fracplap {

namespace detail {

enum class Func { sin, cos, exp, abs, sqrt, min, max };

struct Literal {
  double value;
};
struct Variable {
  int slot;
};
struct Negate {
  std::shared_ptr<const Node> operand;
};
struct Binary {
  char op;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};
struct Call {
  Func func;
  std::vector<std::shared_ptr<const Node>> args;
};

struct Node {
  std::variant<Literal, Variable, Negate, Binary, Call> v;
};

}  // namespace detail

namespace {

using detail::Func;
using detail::Node;
using NodePtr = std::shared_ptr<const Node>;

constexpr std::string_view kFuncNames[] = {"sin", "cos", "exp", "abs", "sqrt", "min", "max"};

std::string_view func_name(Func f) { return kFuncNames[static_cast<int>(f)]; }

bool lookup_func(std::string_view name, Func& out) {
  for (int i = 0; i < 7; ++i) {
    if (kFuncNames[i] == name) {
      out = static_cast<Func>(i);
      return true;
    }
  }
  return false;
}

std::string slot_name(int slot, int dimension) {
  static const char* one_d[] = {"x", "", "y", ""};
  static const char* two_d[] = {"x1", "x2", "y1", "y2"};
  return dimension == 1 ? one_d[slot] : two_d[slot];
}

int lookup_variable(std::string_view name, int dimension, VariableRole role) {
  for (int slot = 0; slot < 4; ++slot) {
    if (dimension == 1 && (slot == 1 || slot == 3)) continue;
    if (role == VariableRole::pointwise && slot >= 2) continue;
    if (slot_name(slot, dimension) == name) return slot;
  }
  return -1;
}

double checked(double value, const char* what) {
  if (!std::isfinite(value)) {
    throw DomainError(std::string(what) + " produced a non-finite value");
  }
  return value;
}

double eval(const Node& node, const Assignment& point) {
  return std::visit(
      [&](const auto& n) -> double {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, detail::Literal>) {
          return n.value;
        } else if constexpr (std::is_same_v<T, detail::Variable>) {
          return point[n.slot];
        } else if constexpr (std::is_same_v<T, detail::Negate>) {
          return -eval(*n.operand, point);
        } else if constexpr (std::is_same_v<T, detail::Binary>) {
          const double a = eval(*n.lhs, point);
          const double b = eval(*n.rhs, point);
          switch (n.op) {
            case '+':
              return a + b;
            case '-':
              return a - b;
            case '*':
              return a * b;
            case '/':
              if (b == 0.0) throw DomainError("division by zero");
              return a / b;
            default:
              return checked(std::pow(a, b), "power");
          }
        } else {
          const double a = eval(*n.args[0], point);
          switch (n.func) {
            case Func::sin:
              return std::sin(a);
            case Func::cos:
              return std::cos(a);
            case Func::exp:
              return checked(std::exp(a), "exp");
            case Func::abs:
              return std::abs(a);
            case Func::sqrt:
              if (a < 0.0) throw DomainError("sqrt of a negative number");
              return std::sqrt(a);
            case Func::min:
            case Func::max: {
              double acc = a;
              for (std::size_t i = 1; i < n.args.size(); ++i) {
                const double b = eval(*n.args[i], point);
                acc = n.func == Func::min ? std::min(acc, b) : std::max(acc, b);
              }
              return acc;
            }
          }
          return 0.0;
        }
      },
      node.v);
}

std::string format_literal(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  std::string s(buf);
  if (value < 0) return "(" + s + ")";
  return s;
}

void print(const Node& node, int dimension, std::ostringstream& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, detail::Literal>) {
          out << format_literal(n.value);
        } else if constexpr (std::is_same_v<T, detail::Variable>) {
          out << slot_name(n.slot, dimension);
        } else if constexpr (std::is_same_v<T, detail::Negate>) {
          out << "(-";
          print(*n.operand, dimension, out);
          out << ")";
        } else if constexpr (std::is_same_v<T, detail::Binary>) {
          out << "(";
          print(*n.lhs, dimension, out);
          out << n.op;
          print(*n.rhs, dimension, out);
          out << ")";
        } else {
          out << func_name(n.func) << "(";
          for (std::size_t i = 0; i < n.args.size(); ++i) {
            if (i) out << ",";
            print(*n.args[i], dimension, out);
          }
          out << ")";
        }
      },
      node.v);
}

bool has_variables(const Node& node) {
  return std::visit(
      [](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, detail::Literal>) {
          return false;
        } else if constexpr (std::is_same_v<T, detail::Variable>) {
          return true;
        } else if constexpr (std::is_same_v<T, detail::Negate>) {
          return has_variables(*n.operand);
        } else if constexpr (std::is_same_v<T, detail::Binary>) {
          return has_variables(*n.lhs) || has_variables(*n.rhs);
        } else {
          for (const auto& a : n.args)
            if (has_variables(*a)) return true;
          return false;
        }
      },
      node.v);
}

// Recursive descent over
//   expr  := term (("+"|"-") term)*
//   term  := unary (("*"|"/") unary)*
//   unary := "-" unary | power
//   power := atom ("^" unary)?
//   atom  := number | ident | ident "(" expr ("," expr)* ")" | "(" expr ")"
class Parser {
 public:
  Parser(std::string_view src, int dimension, VariableRole role)
      : src_(src), dimension_(dimension), role_(role) {}

  NodePtr parse() {
    skip_ws();
    if (pos_ >= src_.size()) fail("expected an expression, found end of input");
    NodePtr root = expr();
    skip_ws();
    if (pos_ < src_.size()) fail("expected an operator or end of input");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const { throw SyntaxError(pos_, message); }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  static NodePtr make(auto&& value) {
    return std::make_shared<const Node>(Node{std::forward<decltype(value)>(value)});
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make(detail::Binary{'+', lhs, term()});
      } else if (accept('-')) {
        lhs = make(detail::Binary{'-', lhs, term()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = make(detail::Binary{'*', lhs, unary()});
      } else if (accept('/')) {
        lhs = make(detail::Binary{'/', lhs, unary()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(detail::Negate{unary()});
    return power();
  }

  NodePtr power() {
    NodePtr base = atom();
    if (accept('^')) return make(detail::Binary{'^', base, unary()});
    return base;
  }

  NodePtr atom() {
    skip_ws();
    if (pos_ >= src_.size()) fail("expected a number, identifier or '(', found end of input");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail(std::string("expected a number, identifier or '(', found '") + c + "'");
  }

  NodePtr number() {
    const std::size_t start = pos_;
    double value = 0.0;
    const char* first = src_.data() + pos_;
    const char* last = src_.data() + src_.size();
    auto [ptr, ec] = std::from_chars(first, last, value, std::chars_format::general);
    if (ec != std::errc() || ptr == first) fail("malformed number");
    pos_ = start + static_cast<std::size_t>(ptr - first);
    return make(detail::Literal{value});
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    const std::string_view name = src_.substr(start, pos_ - start);
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == '(') {
      Func f;
      if (!lookup_func(name, f)) {
        pos_ = start;
        fail("unknown function '" + std::string(name) + "'");
      }
      ++pos_;
      std::vector<NodePtr> args{expr()};
      while (accept(',')) args.push_back(expr());
      if (!accept(')')) fail("expected ',' or ')'");
      const bool variadic = f == Func::min || f == Func::max;
      if (variadic ? args.size() < 2 : args.size() != 1) {
        pos_ = start;
        fail(std::string(name) + (variadic ? " expects at least two arguments"
                                           : " expects exactly one argument"));
      }
      return make(detail::Call{f, std::move(args)});
    }
    if (name == "pi") return make(detail::Literal{std::numbers::pi});
    const int slot = lookup_variable(name, dimension_, role_);
    if (slot < 0) {
      std::string allowed;
      for (const auto& v : allowed_variables(dimension_, role_)) {
        allowed += allowed.empty() ? v : ", " + v;
      }
      throw UnknownVariable("unknown variable '" + std::string(name) + "' (allowed: " + allowed +
                            ")");
    }
    return make(detail::Variable{slot});
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int dimension_;
  VariableRole role_;
};

}  // namespace

Assignment point_assignment(std::span<const double> x) {
  Assignment a{};
  for (std::size_t i = 0; i < x.size() && i < 2; ++i) a[i] = x[i];
  return a;
}

Assignment pair_assignment(std::span<const double> x, std::span<const double> y) {
  Assignment a{};
  for (std::size_t i = 0; i < x.size() && i < 2; ++i) a[i] = x[i];
  for (std::size_t i = 0; i < y.size() && i < 2; ++i) a[2 + i] = y[i];
  return a;
}

std::vector<std::string> allowed_variables(int dimension, VariableRole role) {
  std::vector<std::string> out;
  for (int slot = 0; slot < 4; ++slot) {
    if (dimension == 1 && (slot == 1 || slot == 3)) continue;
    if (role == VariableRole::pointwise && slot >= 2) continue;
    out.push_back(slot_name(slot, dimension));
  }
  return out;
}

double Expression::evaluate(const Assignment& point) const {
  if (!root_) throw DomainError("evaluating an empty expression");
  return eval(*root_, point);
}

std::string Expression::to_string() const {
  if (!root_) return {};
  std::ostringstream out;
  print(*root_, dimension_, out);
  return out.str();
}

bool Expression::is_constant() const { return root_ && !has_variables(*root_); }

Expression Expression::literal(double value, int dimension, VariableRole role) {
  return {std::make_shared<const Node>(Node{detail::Literal{value}}), dimension, role};
}

Expression Expression::variable(int slot, int dimension, VariableRole role) {
  if (slot < 0 || slot > 3 || slot_name(slot, dimension).empty() ||
      (role == VariableRole::pointwise && slot >= 2)) {
    throw UnknownVariable("variable slot " + std::to_string(slot) + " not allowed");
  }
  return {std::make_shared<const Node>(Node{detail::Variable{slot}}), dimension, role};
}

Expression Expression::unary_minus(const Expression& operand) {
  return {std::make_shared<const Node>(Node{detail::Negate{operand.root_}}), operand.dimension_,
          operand.role_};
}

Expression Expression::binary(char op, const Expression& lhs, const Expression& rhs) {
  return {std::make_shared<const Node>(Node{detail::Binary{op, lhs.root_, rhs.root_}}),
          lhs.dimension_, lhs.role_};
}

Expression Expression::call(std::string_view name, std::vector<Expression> args) {
  Func f;
  if (!lookup_func(name, f)) throw SyntaxError(0, "unknown function '" + std::string(name) + "'");
  std::vector<NodePtr> nodes;
  for (const auto& a : args) nodes.push_back(a.root_);
  return {std::make_shared<const Node>(Node{detail::Call{f, std::move(nodes)}}),
          args.front().dimension_, args.front().role_};
}

Expression parse_expression(std::string_view source, int dimension, VariableRole role) {
  if (dimension != 1 && dimension != 2) {
    throw std::invalid_argument("expression dimension must be 1 or 2");
  }
  Parser parser(source, dimension, role);
  return Expression(parser.parse(), dimension, role);
}

}  // namespace fracplap
