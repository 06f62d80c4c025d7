#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fracplap/expression.hpp"
#include "fracplap/mesh.hpp"

namespace fracplap {

/// Validated variable exponents p(x,y), q(x) and fractional order s.
///
/// Bounds are estimated by sampling the closed domain on a tensor grid.
/// Every accepted field satisfies 1 < p_minus <= p_plus, s * p_plus < N and
/// |p(x,y) - p(y,x)| <= 1e-12 at the sample pairs.
struct ExponentField {
  Expression p;
  /// Empty when q defaults to the diagonal p(x,x).
  std::optional<Expression> q;
  double s = 0.0;
  int dimension = 1;
  double p_minus = 0.0;
  double p_plus = 0.0;
  double q_minus = 0.0;
  double q_plus = 0.0;
  int sample_grid_resolution = 0;
  double symmetry_defect = 0.0;
  /// Non-fatal notices, e.g. s * p_minus <= 1 (no boundary trace).
  std::vector<std::string> warnings;

  double p_at(std::span<const double> x, std::span<const double> y) const;
  double q_at(std::span<const double> x) const;
  /// p(x,x)
  double p_diagonal(std::span<const double> x) const;
};

inline constexpr double kSymmetryTolerance = 1e-12;

/// Samples p over a grid x grid lattice of pairs (1D) and validates the
/// invariants. In 2D each point set is a ceil(grid/4)^2 lattice (minimum 8 per
/// axis), keeping the number of sampled pairs near grid^4/256.
///
/// Throws AsymmetricExponent, ExponentOutOfRange or OrderTooLarge.
ExponentField build_exponent_field(std::string_view p_src, std::optional<std::string_view> q_src,
                                   double s, const Domain& domain, int grid = 64);

}  // namespace fracplap
