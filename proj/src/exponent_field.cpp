#include "fracplap/exponent_field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "fracplap/errors.hpp"

namespace fracplap {

namespace {

std::string describe(std::span<const double> x) {
  std::ostringstream out;
  out.precision(6);
  out << "(";
  for (std::size_t i = 0; i < x.size(); ++i) out << (i ? ", " : "") << x[i];
  out << ")";
  return out.str();
}

std::vector<std::array<double, 2>> sample_points(const Domain& domain, int grid) {
  const int per_axis = domain.dimension == 1 ? grid : std::max(8, (grid + 3) / 4);
  auto axis = [&](int a, int k) {
    return domain.lower[a] + (domain.upper[a] - domain.lower[a]) * k / (per_axis - 1);
  };
  std::vector<std::array<double, 2>> pts;
  if (domain.dimension == 1) {
    for (int k = 0; k < per_axis; ++k) pts.push_back({axis(0, k), 0.0});
  } else {
    for (int j = 0; j < per_axis; ++j)
      for (int k = 0; k < per_axis; ++k) pts.push_back({axis(0, k), axis(1, j)});
  }
  return pts;
}

}  // namespace

double ExponentField::p_at(std::span<const double> x, std::span<const double> y) const {
  return p.evaluate(pair_assignment(x, y));
}

double ExponentField::p_diagonal(std::span<const double> x) const {
  return p.evaluate(pair_assignment(x, x));
}

double ExponentField::q_at(std::span<const double> x) const {
  return q ? q->evaluate(point_assignment(x)) : p_diagonal(x);
}

ExponentField build_exponent_field(std::string_view p_src, std::optional<std::string_view> q_src,
                                   double s, const Domain& domain, int grid) {
  domain.validate();
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("order s must lie in (0,1)");
  if (grid < 8) throw std::invalid_argument("sample grid resolution must be >= 8");

  const int n = domain.dimension;
  ExponentField field;
  field.p = parse_expression(p_src, n, VariableRole::pairwise);
  if (q_src) field.q = parse_expression(*q_src, n, VariableRole::pointwise);
  field.s = s;
  field.dimension = n;
  field.sample_grid_resolution = grid;

  const auto pts = sample_points(domain, grid);
  const std::size_t dim = static_cast<std::size_t>(n);
  double pmin = std::numeric_limits<double>::infinity();
  double pmax = -pmin;
  double defect = 0.0;
  for (std::size_t a = 0; a < pts.size(); ++a) {
    std::span<const double> x(pts[a].data(), dim);
    for (std::size_t b = 0; b < pts.size(); ++b) {
      std::span<const double> y(pts[b].data(), dim);
      const double pxy = field.p_at(x, y);
      if (!(pxy > 1.0)) {
        throw ExponentOutOfRange("p" + describe(x) + describe(y) + " = " + std::to_string(pxy) +
                                 " is not > 1");
      }
      if (s * pxy >= n) {
        throw OrderTooLarge("s*p = " + std::to_string(s * pxy) + " >= N = " + std::to_string(n) +
                            " at " + describe(x) + describe(y));
      }
      if (b > a) {
        const double d = std::abs(pxy - field.p_at(y, x));
        if (d > kSymmetryTolerance) {
          throw AsymmetricExponent("|p(x,y) - p(y,x)| = " + std::to_string(d) + " at x=" +
                                   describe(x) + ", y=" + describe(y));
        }
        defect = std::max(defect, d);
      }
      pmin = std::min(pmin, pxy);
      pmax = std::max(pmax, pxy);
    }
  }

  double qmin = std::numeric_limits<double>::infinity();
  double qmax = -qmin;
  for (const auto& pt : pts) {
    std::span<const double> x(pt.data(), dim);
    const double qx = field.q_at(x);
    if (!(qx > 1.0)) {
      throw ExponentOutOfRange("q" + describe(x) + " = " + std::to_string(qx) + " is not > 1");
    }
    qmin = std::min(qmin, qx);
    qmax = std::max(qmax, qx);
  }

  field.p_minus = pmin;
  field.p_plus = pmax;
  field.q_minus = qmin;
  field.q_plus = qmax;
  field.symmetry_defect = defect;
  if (s * pmin <= 1.0) {
    std::ostringstream msg;
    msg << "s*p_minus = " << s * pmin
        << " <= 1: outside the regime where the boundary trace is well defined";
    field.warnings.push_back(msg.str());
  }
  return field;
}

}  // namespace fracplap
