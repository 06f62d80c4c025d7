#include "fracplap/function_spaces.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fracplap/errors.hpp"

namespace fracplap {

namespace {

double pairwise_part(const Kernel& kernel, const DiscreteFunction& u, double lambda) {
  const std::size_t n = kernel.size();
  const auto& v = u.values();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto w = kernel.weight_row(i);
    const auto p = kernel.exponent_row(i);
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || w[j] == 0.0) continue;
      const double d = std::abs(v[i] - v[j]) / lambda;
      if (d != 0.0) row += w[j] * std::pow(d, p[j]);
    }
    total += row;
  }
  return total;
}

double pointwise_part(const Kernel& kernel, std::span<const double> q, const DiscreteFunction& u,
                      double lambda) {
  const auto& m = kernel.masses();
  const auto& v = u.values();
  double total = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]) / lambda;
    if (a != 0.0) total += m[i] * std::pow(a, q[i]);
  }
  return total;
}

void check_exponents(const Kernel& kernel, std::span<const double> q) {
  if (q.size() != kernel.size()) {
    throw std::invalid_argument("pointwise exponents must have one entry per node");
  }
  for (double e : q) {
    if (!(e > 1.0) || !std::isfinite(e)) {
      throw ExponentOutOfRange("pointwise exponent " + std::to_string(e) + " is not > 1");
    }
  }
}

}  // namespace

double seminorm_modular(const Kernel& kernel, const DiscreteFunction& u) {
  require_same_mesh(kernel, u);
  return pairwise_part(kernel, u, 1.0);
}

double full_modular(const Kernel& kernel, std::span<const double> q_at_nodes,
                    const DiscreteFunction& u) {
  require_same_mesh(kernel, u);
  check_exponents(kernel, q_at_nodes);
  return pairwise_part(kernel, u, 1.0) + pointwise_part(kernel, q_at_nodes, u, 1.0);
}

double full_modular(const Kernel& kernel, const ExponentField& field, const DiscreteFunction& u) {
  const auto q = q_at_nodes(kernel, field);
  return full_modular(kernel, q, u);
}

std::vector<double> exponent_at_nodes(const Kernel& kernel, const Expression& pointwise) {
  if (!kernel.has_coordinates()) {
    throw std::invalid_argument("kernel carries no node coordinates");
  }
  std::vector<double> out(kernel.size());
  for (std::size_t i = 0; i < kernel.size(); ++i) {
    out[i] = pointwise.evaluate(point_assignment(kernel.node(i)));
  }
  return out;
}

std::vector<double> q_at_nodes(const Kernel& kernel, const ExponentField& field) {
  if (!kernel.has_coordinates()) {
    throw std::invalid_argument("kernel carries no node coordinates");
  }
  std::vector<double> out(kernel.size());
  for (std::size_t i = 0; i < kernel.size(); ++i) out[i] = field.q_at(kernel.node(i));
  return out;
}

Modular::Modular(const Kernel& kernel, ModularKind kind, std::vector<double> exponents)
    : kernel_(&kernel), kind_(kind), exponents_(std::move(exponents)) {
  exp_min_ = std::numeric_limits<double>::infinity();
  exp_max_ = -exp_min_;
  if (kind_ != ModularKind::lebesgue) {
    exp_min_ = kernel.p_minus();
    exp_max_ = kernel.p_plus();
  }
  if (kind_ != ModularKind::seminorm) {
    check_exponents(kernel, exponents_);
    for (double e : exponents_) {
      exp_min_ = std::min(exp_min_, e);
      exp_max_ = std::max(exp_max_, e);
    }
  }
}

Modular Modular::seminorm(const Kernel& kernel) { return {kernel, ModularKind::seminorm, {}}; }

Modular Modular::lebesgue(const Kernel& kernel, std::vector<double> exponents) {
  return {kernel, ModularKind::lebesgue, std::move(exponents)};
}

Modular Modular::full(const Kernel& kernel, std::vector<double> exponents) {
  return {kernel, ModularKind::full, std::move(exponents)};
}

double Modular::evaluate(const DiscreteFunction& u, double lambda) const {
  require_same_mesh(*kernel_, u);
  double total = 0.0;
  if (kind_ != ModularKind::lebesgue) total += pairwise_part(*kernel_, u, lambda);
  if (kind_ != ModularKind::seminorm) total += pointwise_part(*kernel_, exponents_, u, lambda);
  return total;
}

LuxemburgNorm luxemburg_norm(const Modular& modular, const DiscreteFunction& u, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("luxemburg_norm: tol must be positive");
  const double at_one = modular.evaluate(u);
  if (at_one == 0.0) return {};

  // rho(u / lambda) decreases strictly in lambda; the root sits near
  // rho(u)^{1/p} for exponents between exponent_min and exponent_max.
  const double scale = std::max(std::pow(at_one, 1.0 / modular.exponent_min()), 1e-300);
  double lo = 1e-3 * scale;
  double hi = 1e3 * scale;
  int doublings = 0;
  while (modular.evaluate(u, lo) < 1.0) {
    lo *= 0.5;
    if (++doublings > 200) throw NonConvergence("luxemburg_norm: bracket expansion failed");
  }
  while (modular.evaluate(u, hi) > 1.0) {
    hi *= 2.0;
    if (++doublings > 200) throw NonConvergence("luxemburg_norm: bracket expansion failed");
  }

  LuxemburgNorm out;
  for (int it = 0; it < 4000; ++it) {
    const double mid = std::sqrt(lo) * std::sqrt(hi);
    if (!(mid > lo && mid < hi)) break;
    const double r = modular.evaluate(u, mid);
    out.iterations = it + 1;
    if (std::abs(r - 1.0) <= tol) {
      out.value = mid;
      out.residual = std::abs(r - 1.0);
      return out;
    }
    if (r > 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  // Interval collapsed to adjacent doubles; take the better endpoint.
  const double rlo = std::abs(modular.evaluate(u, lo) - 1.0);
  const double rhi = std::abs(modular.evaluate(u, hi) - 1.0);
  out.value = rlo < rhi ? lo : hi;
  out.residual = std::min(rlo, rhi);
  return out;
}

}  // namespace fracplap
