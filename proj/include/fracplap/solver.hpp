#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <vector>

#include "fracplap/discrete_function.hpp"
#include "fracplap/errors.hpp"
#include "fracplap/kernel.hpp"

namespace fracplap {

/// Discrete Dirichlet problem: kernel, nonnegative nodal data f, and the
/// kernel's boundary nodes pinned to zero.
struct Problem {
  std::shared_ptr<const Kernel> kernel;
  DiscreteFunction f;

  /// Throws std::invalid_argument if any f_i < 0 or is not finite.
  static Problem make(std::shared_ptr<const Kernel> kernel, std::vector<double> f);

  /// Same kernel, data T_level(f). level = +inf returns f unchanged.
  Problem truncated(double level) const;

  const std::vector<bool>& pinned() const { return kernel->boundary(); }
};

enum class SolveStatus { converged, max_iters_exceeded, stalled };

struct Solution {
  DiscreteFunction u;
  /// Truncation level n of the data T_n(f); +inf for the untruncated problem.
  double level = std::numeric_limits<double>::infinity();
  /// max over interior nodes of |dF/du_k|.
  double weak_residual = 0.0;
  int iterations = 0;
  double energy_value = 0.0;
  /// Smallest positive smoothing parameter used before the unsmoothed polish
  /// (0 when no smoothing ran).
  double smoothing_final = 0.0;
  SolveStatus status = SolveStatus::converged;

  bool converged() const { return status == SolveStatus::converged; }
};

struct IterationRecord {
  int iteration;
  double smoothing;
  double energy;
  double energy_change;
  double residual;
};

struct MinimizeOptions {
  double tol = 1e-8;
  int max_iters = 20000;
  /// Initial smoothing parameter; negative selects 1e-2 * max f (or 1e-2).
  double smoothing_eps0 = -1.0;
  int memory = 10;
  std::function<void(const IterationRecord&)> observer;
};

/// F(u) = sum over ordered pairs w_ij |u_i-u_j|^{p_ij} / p_ij - sum_i m_i f_i u_i
double energy(const Problem& problem, const DiscreteFunction& u);

/// dF/du_k = 2 sum_j w_kj |u_k-u_j|^{p_kj-2}(u_k-u_j) - m_k f_k, including
/// boundary components.
DiscreteFunction energy_gradient(const Problem& problem, const DiscreteFunction& u);

/// max over interior nodes of |gradient_k|
double interior_residual(const Problem& problem, const DiscreteFunction& gradient);

/// tol * (1 + max_k m_k f_k)
double residual_target(const Problem& problem, double tol);

/// Minimizes F over boundary-zero functions with limited-memory quasi-Newton
/// steps and a backtracking line search that only accepts energy decrease.
/// When p_minus < 2 it first runs a continuation in the smoothing
/// |t|^p -> (t^2 + eps^2)^{p/2} - eps^p with eps <- eps/4, then polishes the
/// unsmoothed energy. Does not throw on non-convergence; check status.
Solution minimize(const Problem& problem, const DiscreteFunction& u0,
                  const MinimizeOptions& opts = {});

struct ApproxSequence {
  std::vector<Solution> solutions;
  /// min over interior nodes of u_n,i - u_prev,i, with u_prev = 0 for the
  /// first level.
  std::vector<double> monotonicity_margins;
};

class MonotonicityViolation : public Error {
 public:
  MonotonicityViolation(const std::string& what, ApproxSequence partial)
      : Error(what), partial_(std::move(partial)) {}
  const ApproxSequence& partial() const { return partial_; }

 private:
  ApproxSequence partial_;
};

/// Solves with data T_n(f) for each n in `levels` (strictly increasing,
/// positive), warm-starting from the previous level, and checks
/// u_n >= -10 tol and u_prev <= u_n + 10 tol. Throws MonotonicityViolation
/// carrying every level solved so far.
ApproxSequence approx_sequence(const Problem& problem, std::span<const double> levels,
                               const MinimizeOptions& opts = {});

}  // namespace fracplap
