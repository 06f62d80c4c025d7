#include "fracplap/truncation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fracplap {

double truncate(double k, double t) { return std::max(-k, std::min(k, t)); }

double tail_part(double h, double t) { return t - truncate(h, t); }

CutoffValue smooth_cutoff(double sigma, double r) {
  const double a = std::abs(r);
  const double sign = r < 0.0 ? -1.0 : 1.0;
  if (a < sigma) return {r, 1.0};
  if (a <= sigma + 1.0) {
    const double d = a - (sigma + 1.0);
    return {sign * ((sigma + 0.5) - 0.5 * d * d), sigma + 1.0 - a};
  }
  return {sign * (sigma + 0.5), 0.0};
}

bool in_Rh(double h, double v, double w) {
  const double hi = std::max(std::abs(v), std::abs(w));
  const double lo = std::min(std::abs(v), std::abs(w));
  return hi >= h + 1.0 && (lo <= h || v * w < 0.0);
}

void CutoffSpec::validate() const {
  if (!(parameter > 0.0)) throw std::invalid_argument("cutoff parameter must be positive");
}

double CutoffSpec::operator()(double t) const {
  switch (kind) {
    case CutoffKind::truncation:
      return truncate(parameter, t);
    case CutoffKind::tail:
      return tail_part(parameter, t);
    case CutoffKind::smooth:
      return smooth_cutoff(parameter, t).value;
  }
  return t;
}

DiscreteFunction apply(const CutoffSpec& cutoff, const DiscreteFunction& u) {
  cutoff.validate();
  std::vector<double> out(u.values());
  for (double& v : out) v = cutoff(v);
  return u.with_values(std::move(out));
}

DiscreteFunction truncate(double k, const DiscreteFunction& u) {
  return apply({CutoffKind::truncation, k}, u);
}

DiscreteFunction tail_part(double h, const DiscreteFunction& u) {
  return apply({CutoffKind::tail, h}, u);
}

}  // namespace fracplap
