#pragma once

#include <array>
#include <map>

#include "fracplap/mesh.hpp"

namespace fracplap {

/// A pair-integral value with its estimated relative error.
struct PairIntegral {
  double value = 0.0;
  double rel_error = 0.0;
  /// Midpoint evaluations spent.
  long evaluations = 0;
};

inline constexpr int kMaxSubdivisionDepth = 40;

/// Integral of |x - y|^{-alpha} over a x b, for boxes of equal dimension.
///
/// Disjoint boxes (positive distance) use recursive dyadic subdivision of the
/// pair with a one-point midpoint rule: a sub-pair is accepted when its
/// midpoint value and the sum over its 2^N x 2^N children differ by at most
/// rel_tol relatively; the midpoint value is returned for accepted sub-pairs.
///
/// Touching boxes must be congruent and offset by an integer multiple of the
/// cell size (the layout of a uniform mesh). Their singular integral is the
/// sum over the infinite dyadic subdivision; every touching child pair is a
/// scaled copy of a touching parent configuration, so the geometric tail is
/// summed exactly by a small linear system. Throws DivergentIntegral when
/// that series does not converge (alpha >= 2N - dim of the shared face).
///
/// Throws BudgetExceeded beyond kMaxSubdivisionDepth levels.
PairIntegral singular_pair_integral(const Box& a, const Box& b, double alpha, double rel_tol);

/// Integrals over pairs of cells of one uniform grid (cell extents h) for a
/// fixed alpha, memoized by integer cell offset. Gives the same estimates as
/// singular_pair_integral: every dyadic sub-pair of a grid pair is a scaled
/// copy of a grid pair at some finer offset, and the acceptance test is
/// scale invariant, so each offset is integrated once. Not thread safe.
class CellPairIntegrator {
 public:
  using Offset = std::array<int, 2>;

  CellPairIntegrator(int dimension, std::array<double, 2> h, double alpha, double rel_tol);

  /// Cells [0,h] and [o h, (o+1) h] per axis; o != 0.
  PairIntegral operator()(Offset offset);

 private:
  struct Entry {
    double value = 0.0;
    double abs_error = 0.0;
  };

  double coarse(const Offset& o) const;
  const Entry& separated(const Offset& o, int depth);
  PairIntegral touching(const Offset& o);

  int dim_;
  std::array<double, 2> h_;
  double alpha_;
  double rel_tol_;
  double ratio_;  // 2^{alpha - 2N}: scale factor from one level to the next finer
  long evaluations_ = 0;
  std::map<Offset, Entry> memo_;
};

/// Kernel weight of two cells: the integral with alpha = N + s * p.
PairIntegral pair_weight(const Box& a, const Box& b, double s, double p, double rel_tol);

}  // namespace fracplap
