#pragma once

#include "fracplap/discrete_function.hpp"

namespace fracplap {

/// T_k(t) = max(-k, min(k, t)); T_k(k) == k exactly.
double truncate(double k, double t);

/// G_h(t) = t - T_h(t); zero iff |t| <= h.
double tail_part(double h, double t);

struct CutoffValue {
  double value;
  double derivative;
};

/// S_sigma: identity on |r| < sigma, quadratic taper
/// (sigma + 1/2) -+ (r -+ (sigma + 1))^2 / 2 on sigma <= +-r <= sigma + 1,
/// constant +-(sigma + 1/2) beyond. S'_sigma(r) = sigma + 1 - |r| on the taper.
CutoffValue smooth_cutoff(double sigma, double r);

/// (v, w) in R_h: max(|v|,|w|) >= h + 1 and (min(|v|,|w|) <= h or v w < 0).
bool in_Rh(double h, double v, double w);

enum class CutoffKind { truncation, tail, smooth };

/// One of T_k, G_h, S_sigma with its positive parameter.
struct CutoffSpec {
  CutoffKind kind;
  double parameter;

  /// Throws std::invalid_argument unless parameter > 0.
  void validate() const;
  double operator()(double t) const;
};

/// Pointwise application; preserves the mesh and boundary_zero (every
/// cutoff maps 0 to 0).
DiscreteFunction apply(const CutoffSpec& cutoff, const DiscreteFunction& u);

DiscreteFunction truncate(double k, const DiscreteFunction& u);
DiscreteFunction tail_part(double h, const DiscreteFunction& u);

}  // namespace fracplap
