#pragma once

#include <span>
#include <vector>

#include "fracplap/discrete_function.hpp"
#include "fracplap/exponent_field.hpp"
#include "fracplap/kernel.hpp"

namespace fracplap {

/// sum over ordered pairs i != j of w_ij |u_i - u_j|^{p_ij}
double seminorm_modular(const Kernel& kernel, const DiscreteFunction& u);

/// seminorm_modular(u) + sum_i m_i |u_i|^{q_i}
double full_modular(const Kernel& kernel, std::span<const double> q_at_nodes,
                    const DiscreteFunction& u);
/// q_i = field.q(x_i); needs a kernel with node coordinates.
double full_modular(const Kernel& kernel, const ExponentField& field, const DiscreteFunction& u);

/// Evaluates a pointwise exponent at every kernel node.
std::vector<double> exponent_at_nodes(const Kernel& kernel, const Expression& pointwise);
/// q(x_i), defaulting to p(x_i, x_i).
std::vector<double> q_at_nodes(const Kernel& kernel, const ExponentField& field);

enum class ModularKind { seminorm, lebesgue, full };

/// A convex modular rho over functions on one kernel's mesh: the pairwise
/// part (seminorm), the pointwise part sum m_i |u_i|^{q_i} (lebesgue), or
/// both (full).
class Modular {
 public:
  static Modular seminorm(const Kernel& kernel);
  static Modular lebesgue(const Kernel& kernel, std::vector<double> exponents);
  static Modular full(const Kernel& kernel, std::vector<double> exponents);

  ModularKind kind() const { return kind_; }
  const Kernel& kernel() const { return *kernel_; }

  /// rho(u / lambda)
  double evaluate(const DiscreteFunction& u, double lambda = 1.0) const;

  /// Bounds of the exponents that enter this modular.
  double exponent_min() const { return exp_min_; }
  double exponent_max() const { return exp_max_; }

 private:
  Modular(const Kernel& kernel, ModularKind kind, std::vector<double> exponents);

  const Kernel* kernel_;
  ModularKind kind_;
  std::vector<double> exponents_;
  double exp_min_ = 0.0;
  double exp_max_ = 0.0;
};

struct LuxemburgNorm {
  double value = 0.0;
  /// |rho(u / value) - 1|, or 0 when rho(u) = 0.
  double residual = 0.0;
  int iterations = 0;
};

inline constexpr double kDefaultLuxemburgTolerance = 1e-10;

/// inf { lambda > 0 : rho(u / lambda) <= 1 } by monotone bisection on lambda.
/// Returns 0 when rho(u) = 0. Throws NonConvergence if the bracket needs
/// more than 200 doublings.
LuxemburgNorm luxemburg_norm(const Modular& modular, const DiscreteFunction& u,
                             double tol = kDefaultLuxemburgTolerance);

}  // namespace fracplap
