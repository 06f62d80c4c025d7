#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "fracplap/discrete_function.hpp"
#include "fracplap/exponent_field.hpp"
#include "fracplap/expression.hpp"
#include "fracplap/kernel.hpp"
#include "fracplap/solver.hpp"

namespace fracplap {

/// passed == (lhs <= rhs + slack_allowance). The slack is the residual
/// pairing bound for the check's test function plus a summation roundoff
/// term recorded under context["roundoff"].
struct CheckReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack_allowance = 0.0;
  bool passed = false;
  std::map<std::string, double> context;

  static CheckReport make(std::string name, double lhs, double rhs, double slack,
                          std::map<std::string, double> context = {});
};

/// Sum of |gradient_i| over interior nodes of the problem solved by `sol`
/// (data truncated at sol.level).
double residual_l1(const Solution& sol, const Problem& problem);

/// lhs = sum over ordered pairs w_ij |T_k(u)_i - T_k(u)_j|^{p_ij},
/// rhs = k sum_i m_i f_i, slack = k sum |r_i|.
CheckReport truncation_energy_check(const Solution& sol, const Problem& problem, double k);

/// lhs = sum over ordered pairs in R_h of w_ij |u_i - u_j|^{p_ij - 1},
/// rhs = sum over u_i > h of m_i f_i, slack = sum |r_i|.
CheckReport rh_tail_check(const Solution& sol, const Problem& problem, double h);

struct LevelSetSeries {
  std::vector<double> ks;
  std::vector<double> measures;
  /// Least-squares slope of log(measure) against log(k) over the upper half
  /// of ks with positive measure; NaN when fewer than two such points.
  double slope = 0.0;
};

/// measure(k) = sum over u_i >= k of m_i. ks must be positive and increasing.
LevelSetSeries level_set_decay(const Solution& sol, const Kernel& kernel,
                               std::span<const double> ks);

/// |{u >= k}| against 2 max((L/k)^{pbar_-}, (L/k)^{pbar_+}) where L bounds the
/// L^{pbar} norm of T_k(u): the energy bound k ||f||_1 is turned into a
/// seminorm bound and multiplied by the measured embedding ratio (largest
/// of the ratios of u and T_k(u), r = pbar). The residual part of the
/// energy bound is reported as slack.
CheckReport level_set_bound_check(const Solution& sol, const Problem& problem,
                                  const ExponentField& field, double k);

/// |sum over ordered pairs w_ij U_ij [(S(u) phi)_i - (S(u) phi)_j]
///  - sum_i m_i f_i S(u_i) phi_i| with S = S_sigma.
/// phi must vanish on boundary nodes and their neighbours (including
/// diagonal neighbours in 2D); throws UnsupportedTestFunction otherwise.
double renormalized_residual(const Solution& sol, const Problem& problem, double sigma,
                             const DiscreteFunction& phi);

/// renormalized_residual against the pairing bound ||S(u) phi||_inf sum |r_i|.
CheckReport renormalized_check(const Solution& sol, const Problem& problem, double sigma,
                               const DiscreteFunction& phi);

/// Nodes a test function must vanish on: boundary nodes and their neighbours.
std::vector<bool> collar_nodes(const Kernel& kernel);

/// `count` products of 1D tents (1 at the centre, 1/2 at the adjacent
/// nodes) centred at evenly spread nodes clear of the collar.
std::vector<DiscreteFunction> bump_functions(const Kernel& kernel, int count);

struct DiscrepancyReport {
  double J1 = 0.0;
  double J2 = 0.0;
  double J3 = 0.0;
  double J1_1 = 0.0;
  double k = 0.0;
  double sigma = 0.0;
  /// |J1 + J2 - J3|
  double identity_gap = 0.0;
  /// (||phi||_inf + 1) (sum |r_u| + sum |r_v|)
  double pairing_bound = 0.0;
  double max_abs_diff = 0.0;
  /// Summation error bound for identity_gap.
  double roundoff = 0.0;
};

/// Terms of the comparison identity for two solutions of the same problem
/// with phi = T_k(S_sigma(u) - S_sigma(v)). Requires sigma >= k > 0.
DiscrepancyReport uniqueness_discrepancy(const Solution& u, const Solution& v,
                                         const Problem& problem, double k, double sigma);

/// identity_gap <= pairing_bound (+ roundoff)
CheckReport uniqueness_identity_check(const DiscrepancyReport& report);
/// J1_1 >= -1e-12
CheckReport uniqueness_monotone_check(const DiscrepancyReport& report);
/// max |u - v| <= 10 tol
CheckReport restart_gap_check(const DiscrepancyReport& report, double tol);

struct ConvergencePoint {
  double level;
  double gap;
};

/// Luxemburg seminorm of T_k(u_n) - T_k(u_last) for each level.
std::vector<ConvergencePoint> truncation_convergence(const std::vector<Solution>& seq,
                                                     const Kernel& kernel, double k);

/// ||u||_{L^{r(x)}} / [u] (both Luxemburg norms); needs 1 < r(x_i) <
/// N pbar/(N - s pbar) at every node. Throws ZeroSeminorm when [u] = 0 and
/// ExponentRangeViolation for a bad r.
double embedding_ratio(const DiscreteFunction& u, const Kernel& kernel, const ExponentField& field,
                       const Expression& r);

/// Same with r given at the nodes.
double embedding_ratio(const DiscreteFunction& u, const Kernel& kernel, const ExponentField& field,
                       std::span<const double> r_at_nodes);

}  // namespace fracplap
