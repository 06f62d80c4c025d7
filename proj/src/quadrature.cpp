#include "fracplap/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracplap/errors.hpp"

namespace fracplap {

namespace {

struct Accumulator {
  double value = 0.0;
  double abs_error = 0.0;
  long evaluations = 0;
};

double center_distance(const Box& a, const Box& b) {
  const auto ca = a.center();
  const auto cb = b.center();
  double d2 = 0.0;
  for (int k = 0; k < a.dimension; ++k) d2 += (ca[k] - cb[k]) * (ca[k] - cb[k]);
  return std::sqrt(d2);
}

// Children in a fixed order: bit k of the index selects the upper half on axis k.
int split(const Box& box, Box* out) {
  const int count = 1 << box.dimension;
  const auto c = box.center();
  for (int idx = 0; idx < count; ++idx) {
    Box child = box;
    for (int k = 0; k < box.dimension; ++k) {
      if (idx & (1 << k)) {
        child.lower[k] = c[k];
      } else {
        child.upper[k] = c[k];
      }
    }
    out[idx] = child;
  }
  return count;
}

void integrate_separated(const Box& a, const Box& b, double alpha, double rel_tol, int depth,
                         Accumulator& acc) {
  const double coarse = a.volume() * b.volume() * std::pow(center_distance(a, b), -alpha);
  Box ca[4];
  Box cb[4];
  const int na = split(a, ca);
  const int nb = split(b, cb);
  double fine = 0.0;
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < nb; ++j)
      fine += ca[i].volume() * cb[j].volume() * std::pow(center_distance(ca[i], cb[j]), -alpha);
  acc.evaluations += 1 + na * nb;

  const double diff = std::abs(fine - coarse);
  if (diff <= rel_tol * std::abs(fine)) {
    acc.value += coarse;
    acc.abs_error += 2.0 * diff;
    return;
  }
  if (depth >= kMaxSubdivisionDepth) {
    throw BudgetExceeded("pair quadrature exceeded subdivision depth " +
                         std::to_string(kMaxSubdivisionDepth));
  }
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < nb; ++j) integrate_separated(ca[i], cb[j], alpha, rel_tol, depth + 1, acc);
}

// Congruent boxes whose offset is a whole number of cell widths per axis.
bool lattice_aligned(const Box& a, const Box& b) {
  for (int k = 0; k < a.dimension; ++k) {
    const double h = a.extent(k);
    if (std::abs(b.extent(k) - h) > 1e-9 * h) return false;
    const double shift = (b.lower[k] - a.lower[k]) / h;
    if (std::abs(shift - std::round(shift)) > 1e-9) return false;
  }
  return true;
}

// Dense solve of (I - m) x = rhs by Gaussian elimination with partial pivoting.
std::vector<double> solve_identity_minus(std::vector<std::vector<double>> m,
                                         std::vector<double> rhs) {
  const std::size_t n = rhs.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m[i][j] = (i == j ? 1.0 : 0.0) - m[i][j];
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    std::swap(m[piv], m[col]);
    std::swap(rhs[piv], rhs[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = m[r][col] / m[col][col];
      for (std::size_t c = col; c < n; ++c) m[r][c] -= f * m[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double acc = rhs[i];
    for (std::size_t c = i + 1; c < n; ++c) acc -= m[i][c] * x[c];
    x[i] = acc / m[i][i];
  }
  return x;
}

}  // namespace

CellPairIntegrator::CellPairIntegrator(int dimension, std::array<double, 2> h, double alpha,
                                       double rel_tol)
    : dim_(dimension), h_(h), alpha_(alpha), rel_tol_(rel_tol) {
  if (dim_ != 1 && dim_ != 2) throw std::invalid_argument("dimension must be 1 or 2");
  if (!(rel_tol > 0.0)) throw std::invalid_argument("rel_tol must be positive");
  if (dim_ == 1) h_[1] = 0.0;
  ratio_ = std::pow(2.0, alpha - 2.0 * dim_);
}

double CellPairIntegrator::coarse(const Offset& o) const {
  double volume = 1.0;
  double d2 = 0.0;
  for (int k = 0; k < dim_; ++k) {
    volume *= h_[k] * h_[k];
    d2 += (o[k] * h_[k]) * (o[k] * h_[k]);
  }
  return volume * std::pow(std::sqrt(d2), -alpha_);
}

// Children of the pair at offset o sit at offsets 2o + (child b) - (child a)
// on the grid with half the cell size; their integrals are ratio_ times the
// same-offset integrals on this grid.
const CellPairIntegrator::Entry& CellPairIntegrator::separated(const Offset& o, int depth) {
  if (auto it = memo_.find(o); it != memo_.end()) return it->second;
  const int nchild = 1 << dim_;
  const double c = coarse(o);
  double fine = 0.0;
  Offset children[16];
  int count = 0;
  for (int ia = 0; ia < nchild; ++ia) {
    for (int ib = 0; ib < nchild; ++ib) {
      Offset child{0, 0};
      for (int k = 0; k < dim_; ++k) child[k] = 2 * o[k] + ((ib >> k) & 1) - ((ia >> k) & 1);
      children[count++] = child;
      fine += ratio_ * coarse(child);
    }
  }
  evaluations_ += 1 + count;
  Entry e;
  const double diff = std::abs(fine - c);
  if (diff <= rel_tol_ * std::abs(fine)) {
    e = {c, 2.0 * diff};
  } else {
    if (depth >= kMaxSubdivisionDepth) {
      throw BudgetExceeded("pair quadrature exceeded subdivision depth " +
                           std::to_string(kMaxSubdivisionDepth));
    }
    for (int i = 0; i < count; ++i) {
      const Entry& sub = separated(children[i], depth + 1);
      e.value += ratio_ * sub.value;
      e.abs_error += ratio_ * sub.abs_error;
    }
  }
  return memo_.emplace(o, e).first->second;
}

PairIntegral CellPairIntegrator::touching(const Offset& start) {
  auto is_touching = [&](const Offset& o) {
    int linf = 0;
    for (int k = 0; k < dim_; ++k) linf = std::max(linf, std::abs(o[k]));
    return linf == 1;
  };

  std::map<Offset, std::size_t> index;
  std::vector<Offset> order;
  auto intern = [&](const Offset& o) {
    auto [it, inserted] = index.emplace(o, order.size());
    if (inserted) order.push_back(o);
    return it->second;
  };
  intern(start);

  const int nchild = 1 << dim_;
  std::vector<std::vector<double>> coeff;
  std::vector<double> rhs;
  std::vector<double> rhs_err;
  const long before = evaluations_;

  for (std::size_t row = 0; row < order.size(); ++row) {
    const Offset o = order[row];
    int shared_dims = 0;
    for (int k = 0; k < dim_; ++k) shared_dims += o[k] == 0 ? 1 : 0;
    if (alpha_ >= 2.0 * dim_ - shared_dims) {
      throw DivergentIntegral("pair integral of |x-y|^-" + std::to_string(alpha_) +
                              " over cells sharing a " + std::to_string(shared_dims) +
                              "-dimensional face diverges");
    }
    std::vector<double> row_coeff(order.size(), 0.0);
    double b = 0.0;
    double e = 0.0;
    for (int ia = 0; ia < nchild; ++ia) {
      for (int ib = 0; ib < nchild; ++ib) {
        Offset child{0, 0};
        for (int k = 0; k < dim_; ++k) child[k] = 2 * o[k] + ((ib >> k) & 1) - ((ia >> k) & 1);
        if (is_touching(child)) {
          const std::size_t col = intern(child);
          if (col >= row_coeff.size()) row_coeff.resize(col + 1, 0.0);
          row_coeff[col] += ratio_;
          continue;
        }
        const Entry& sub = separated(child, 1);
        b += ratio_ * sub.value;
        e += ratio_ * sub.abs_error;
      }
    }
    coeff.push_back(std::move(row_coeff));
    rhs.push_back(b);
    rhs_err.push_back(e);
  }
  for (auto& row : coeff) row.resize(order.size(), 0.0);

  const auto values = solve_identity_minus(coeff, rhs);
  const auto errors = solve_identity_minus(coeff, rhs_err);
  PairIntegral out;
  out.value = values[0];
  out.rel_error = values[0] > 0.0 ? errors[0] / values[0] : 0.0;
  out.evaluations = evaluations_ - before;
  return out;
}

PairIntegral CellPairIntegrator::operator()(Offset offset) {
  if (dim_ == 1) offset[1] = 0;
  int linf = 0;
  for (int k = 0; k < dim_; ++k) linf = std::max(linf, std::abs(offset[k]));
  if (linf == 0) throw std::invalid_argument("pair integral requires distinct cells");
  if (linf == 1) return touching(offset);
  const long before = evaluations_;
  const Entry& e = separated(offset, 0);
  return {e.value, e.value > 0.0 ? e.abs_error / e.value : 0.0, evaluations_ - before};
}

PairIntegral singular_pair_integral(const Box& a, const Box& b, double alpha, double rel_tol) {
  if (a.dimension != b.dimension) throw std::invalid_argument("boxes differ in dimension");
  if (!(rel_tol > 0.0)) throw std::invalid_argument("rel_tol must be positive");
  const int dim = a.dimension;

  double min_extent = a.extent(0);
  double gap = 0.0;
  for (int k = 0; k < dim; ++k) {
    min_extent = std::min({min_extent, a.extent(k), b.extent(k)});
    gap = std::max({gap, b.lower[k] - a.upper[k], a.lower[k] - b.upper[k]});
  }
  if (gap > 1e-9 * min_extent && !lattice_aligned(a, b)) {
    Accumulator acc;
    integrate_separated(a, b, alpha, rel_tol, 0, acc);
    return {acc.value, acc.value > 0.0 ? acc.abs_error / acc.value : 0.0, acc.evaluations};
  }

  CellPairIntegrator::Offset offset{0, 0};
  for (int k = 0; k < dim; ++k) {
    const double h = a.extent(k);
    if (std::abs(b.extent(k) - h) > 1e-9 * h) {
      throw std::invalid_argument("touching cells must be congruent");
    }
    const double shift = (b.lower[k] - a.lower[k]) / h;
    offset[k] = static_cast<int>(std::lround(shift));
    if (std::abs(shift - offset[k]) > 1e-9) {
      throw std::invalid_argument("touching cells must be offset by whole cell widths");
    }
  }
  if (offset[0] == 0 && offset[1] == 0) {
    throw std::invalid_argument("pair integral requires distinct cells");
  }
  return CellPairIntegrator(dim, {a.extent(0), dim == 2 ? a.extent(1) : 0.0}, alpha,
                            rel_tol)(offset);
}

PairIntegral pair_weight(const Box& a, const Box& b, double s, double p, double rel_tol) {
  return singular_pair_integral(a, b, a.dimension + s * p, rel_tol);
}

}  // namespace fracplap
