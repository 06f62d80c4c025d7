#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fracplap/diagnostics.hpp"
#include "fracplap/function_spaces.hpp"
#include "fracplap/truncation.hpp"

using namespace fracplap;

namespace {

constexpr double kTol = 1e-8;

struct Sample {
  Domain domain = Domain::interval(0, 1);
  Mesh mesh;
  ExponentField field;
  std::shared_ptr<const Kernel> kernel;
  Problem problem;
  Solution sol;
};

// 64 cells, s = 0.4, p = 2, unit mass at node `spike` scaled by `mass`.
Sample make_sample(double mass, int cells = 64, int spike = 20) {
  Sample s;
  s.mesh = build_mesh(s.domain, cells);
  s.field = build_exponent_field("2", std::nullopt, 0.4, s.domain);
  s.kernel = std::make_shared<const Kernel>(assemble_kernel(s.mesh, s.field, 1e-6));
  std::vector<double> f(cells, 0.0);
  f[spike] = mass / s.mesh.masses()[spike];
  s.problem = Problem::make(s.kernel, f);
  MinimizeOptions opts;
  opts.tol = kTol;
  s.sol = minimize(s.problem, DiscreteFunction::zeros(*s.kernel), opts);
  return s;
}

const Sample& spike() {
  static const Sample s = make_sample(1.0);
  return s;
}

// Data large enough that max u > 1, so R_h is not empty.
const Sample& tall_spike() {
  static const Sample s = make_sample(100.0);
  return s;
}

Solution as_solution(DiscreteFunction u) {
  Solution s;
  s.u = std::move(u);
  return s;
}

}  // namespace

TEST(Diagnostics, SampleConverges) {
  ASSERT_TRUE(spike().sol.converged());
  ASSERT_TRUE(tall_spike().sol.converged());
  EXPECT_GT(tall_spike().sol.u.max_abs(), 2.0);
}

TEST(TruncationEnergy, ZeroData) {
  const auto& s = spike();
  const auto problem = Problem::make(s.kernel, std::vector<double>(s.kernel->size(), 0.0));
  const auto sol = minimize(problem, DiscreteFunction::zeros(*s.kernel));
  const auto r = truncation_energy_check(sol, problem, 1.0);
  EXPECT_EQ(r.lhs, 0.0);
  EXPECT_EQ(r.rhs, 0.0);
  EXPECT_TRUE(r.passed);
}

TEST(TruncationEnergy, LevelAboveMaximum) {
  const auto& s = spike();
  const double k = 2.0 * s.sol.u.max_abs();
  const auto r = truncation_energy_check(s.sol, s.problem, k);
  EXPECT_NEAR(r.lhs, seminorm_modular(*s.kernel, s.sol.u), 1e-13 * r.lhs);
  EXPECT_TRUE(r.passed);
}

TEST(TruncationEnergy, HalfMaximumHasMargin) {
  const auto& s = spike();
  const auto r = truncation_energy_check(s.sol, s.problem, 0.5 * s.sol.u.max_abs());
  EXPECT_TRUE(r.passed);
  EXPECT_LT(r.lhs, r.rhs);
  EXPECT_EQ(r.name, "truncation_energy");
}

TEST(TruncationEnergy, SlackMatchesResidualPairing) {
  const auto& s = spike();
  const double k = 0.1 * s.sol.u.max_abs();
  const auto r = truncation_energy_check(s.sol, s.problem, k);
  EXPECT_NEAR(r.slack_allowance - r.context.at("roundoff"), k * residual_l1(s.sol, s.problem),
              1e-15);
}

TEST(RhTail, EmptyAboveRange) {
  const auto& s = tall_spike();
  const auto r = rh_tail_check(s.sol, s.problem, s.sol.u.max_abs());
  EXPECT_EQ(r.lhs, 0.0);
  EXPECT_TRUE(r.passed);
}

TEST(RhTail, PassesAcrossLevels) {
  const auto& s = tall_spike();
  const double m = s.sol.u.max_abs();
  for (double frac : {0.1, 0.25, 0.5, 0.75, 0.9}) {
    const auto r = rh_tail_check(s.sol, s.problem, frac * m);
    EXPECT_TRUE(r.passed) << frac;
  }
  EXPECT_GT(rh_tail_check(s.sol, s.problem, 0.5 * m).lhs, 0.0);
}

TEST(RhTail, NonincreasingInTailRegime) {
  const auto& s = tall_spike();
  const double m = s.sol.u.max_abs();
  double prev = INFINITY;
  for (int i = 0; i <= 40; ++i) {
    const double h = (m - 1.0) + i * 1.2 / 40.0;
    const double lhs = rh_tail_check(s.sol, s.problem, h).lhs;
    EXPECT_LE(lhs, prev + 1e-12);
    prev = lhs;
  }
  EXPECT_EQ(prev, 0.0);
}

TEST(LevelSet, Series) {
  const auto& s = spike();
  const double m = s.sol.u.max_abs();
  const std::vector<double> ks{1e-9, 0.1 * m, 0.3 * m, 0.6 * m, 0.9 * m, 1.5 * m};
  const auto series = level_set_decay(s.sol, *s.kernel, ks);
  ASSERT_EQ(series.measures.size(), ks.size());
  EXPECT_LE(series.measures.front(), 1.0 + 1e-12);
  EXPECT_EQ(series.measures.back(), 0.0);
  for (std::size_t i = 1; i < ks.size(); ++i)
    EXPECT_LE(series.measures[i], series.measures[i - 1]);
  EXPECT_LT(series.slope, 0.0);
  const std::vector<double> bad{0.5, 0.2};
  EXPECT_THROW(level_set_decay(s.sol, *s.kernel, bad), std::invalid_argument);
}

TEST(LevelSet, BoundAgainstIndependentConstant) {
  const auto& s = spike();
  for (double frac : {0.1, 0.25, 0.5, 1.0}) {
    const double k = frac * s.sol.u.max_abs();
    const auto r = level_set_bound_check(s.sol, s.problem, s.field, k);
    EXPECT_TRUE(r.passed) << frac;

    // Constant p = 2: the modular of T_k u is at most k ||f||_1 (plus the
    // residual pairing), so [T_k u] <= sqrt(k ||f||_1) and
    // |{u >= k}| <= 2 (E [T_k u] / k)^2.
    const double e = r.context.at("embedding_ratio");
    double f1 = 0.0;
    for (std::size_t i = 0; i < s.kernel->size(); ++i)
      f1 += s.kernel->masses()[i] * s.problem.f[i];
    const double bound = 2.0 * std::pow(e * std::sqrt(k * f1) / k, 2.0);
    EXPECT_NEAR(r.rhs, bound, 1e-9 * bound);
    double measure = 0.0;
    for (std::size_t i = 0; i < s.kernel->size(); ++i)
      if (s.sol.u[i] >= k) measure += s.kernel->masses()[i];
    EXPECT_EQ(r.lhs, measure);
  }
}

TEST(Collar, OneDimensional) {
  const auto& s = spike();
  const auto c = collar_nodes(*s.kernel);
  for (std::size_t i = 0; i < c.size(); ++i) EXPECT_EQ(c[i], i < 2 || i >= c.size() - 2) << i;
}

TEST(Collar, TwoDimensionalIncludesDiagonals) {
  const Domain d = Domain::rectangle(0, 1, 0, 1);
  const Kernel k = assemble_kernel(build_mesh(d, {8, 8}),
                                   build_exponent_field("2", std::nullopt, 0.3, d), 1e-3);
  const auto c = collar_nodes(k);
  int free_nodes = 0;
  for (bool b : c) free_nodes += b ? 0 : 1;
  EXPECT_EQ(free_nodes, 16);  // the 4 x 4 centre block
  const auto bumps = bump_functions(k, 1);
  ASSERT_EQ(bumps.size(), 1u);
  for (std::size_t i = 0; i < k.size(); ++i)
    if (c[i]) EXPECT_EQ(bumps[0][i], 0.0);
}

TEST(Bumps, SupNormOneAndClearOfCollar) {
  const auto& s = spike();
  const auto c = collar_nodes(*s.kernel);
  const auto bumps = bump_functions(*s.kernel, 5);
  ASSERT_EQ(bumps.size(), 5u);
  for (const auto& b : bumps) {
    EXPECT_EQ(b.max_abs(), 1.0);
    int support = 0;
    for (std::size_t i = 0; i < b.size(); ++i) {
      if (c[i]) EXPECT_EQ(b[i], 0.0);
      support += b[i] != 0.0 ? 1 : 0;
      EXPECT_TRUE(b[i] == 0.0 || b[i] == 0.5 || b[i] == 1.0);
    }
    EXPECT_EQ(support, 3);
  }
}

TEST(Renormalized, RejectsCollarSupport) {
  const auto& s = spike();
  std::vector<double> phi(64, 0.0);
  phi[1] = 1.0;
  EXPECT_THROW(renormalized_residual(s.sol, s.problem, 1.0,
                                     DiscreteFunction::on(*s.kernel, phi, true)),
               UnsupportedTestFunction);
}

TEST(Renormalized, VanishesForZeroSolution) {
  const auto& s = spike();
  const auto problem = Problem::make(s.kernel, std::vector<double>(64, 0.0));
  const auto sol = as_solution(DiscreteFunction::zeros(*s.kernel));
  for (const auto& phi : bump_functions(*s.kernel, 5))
    EXPECT_EQ(renormalized_residual(sol, problem, 0.5, phi), 0.0);
}

TEST(Renormalized, SwapSymmetricDoubleSum) {
  const auto& s = spike();
  const double sigma = 0.5 * s.sol.u.max_abs();
  const auto& u = s.sol.u;
  for (const auto& phi : bump_functions(*s.kernel, 5)) {
    std::vector<double> sp(64);
    for (std::size_t i = 0; i < 64; ++i) sp[i] = smooth_cutoff(sigma, u[i]).value * phi[i];
    // Column-major traversal, (j, i) order.
    double pair = 0.0;
    for (std::size_t j = 0; j < 64; ++j)
      for (std::size_t i = 0; i < 64; ++i) {
        if (i == j) continue;
        const double d = u[i] - u[j];
        pair += s.kernel->weight(i, j) * std::pow(std::abs(d), s.kernel->exponent(i, j) - 2.0) *
                d * (sp[i] - sp[j]);
      }
    double data = 0.0;
    for (std::size_t i = 0; i < 64; ++i)
      data += s.kernel->masses()[i] * s.problem.f[i] * sp[i];
    const double oracle = std::abs(pair - data);
    EXPECT_NEAR(renormalized_residual(s.sol, s.problem, sigma, phi), oracle,
                1e-12 * (std::abs(pair) + std::abs(data)));
  }
}

TEST(Renormalized, PairingBoundHolds) {
  const auto& s = spike();
  for (double frac : {0.5, 1.0, 2.0})
    for (const auto& phi : bump_functions(*s.kernel, 5)) {
      const auto r = renormalized_check(s.sol, s.problem, frac * s.sol.u.max_abs(), phi);
      EXPECT_TRUE(r.passed) << frac;
    }
}

TEST(Uniqueness, IdenticalSolutions) {
  const auto& s = spike();
  const auto r = uniqueness_discrepancy(s.sol, s.sol, s.problem, 0.1, 0.2);
  EXPECT_EQ(r.J1, 0.0);
  EXPECT_EQ(r.J2, 0.0);
  EXPECT_EQ(r.J3, 0.0);
  EXPECT_EQ(r.max_abs_diff, 0.0);
}

TEST(Uniqueness, MonotonePartIsNonnegativeForAnyPair) {
  const auto& s = spike();
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> a(64, 0.0), b(64, 0.0);
    for (std::size_t i = 1; i + 1 < 64; ++i) {
      a[i] = dist(rng);
      b[i] = dist(rng);
    }
    const auto u = as_solution(DiscreteFunction::on(*s.kernel, a, true));
    const auto v = as_solution(DiscreteFunction::on(*s.kernel, b, true));
    const auto r = uniqueness_discrepancy(u, v, s.problem, 1.0, 1.5);
    EXPECT_GE(r.J1_1, -1e-12);
    EXPECT_TRUE(uniqueness_monotone_check(r).passed);
  }
}

TEST(Uniqueness, RestartsAgree) {
  const auto& s = spike();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  std::vector<double> start(64, 0.0);
  for (std::size_t i = 1; i + 1 < 64; ++i) start[i] = dist(rng);
  MinimizeOptions opts;
  opts.tol = kTol;
  const auto v = minimize(s.problem, DiscreteFunction::on(*s.kernel, start, true), opts);
  ASSERT_TRUE(v.converged());
  const double m = s.sol.u.max_abs();
  const auto r = uniqueness_discrepancy(s.sol, v, s.problem, m, m);
  EXPECT_TRUE(uniqueness_identity_check(r).passed);
  EXPECT_TRUE(uniqueness_monotone_check(r).passed);
  EXPECT_TRUE(restart_gap_check(r, kTol).passed);
  EXPECT_LE(r.identity_gap, r.pairing_bound + r.roundoff);
}

TEST(Uniqueness, Preconditions) {
  const auto& s = spike();
  EXPECT_THROW(uniqueness_discrepancy(s.sol, s.sol, s.problem, 1.0, 0.5), std::invalid_argument);
  EXPECT_THROW(uniqueness_discrepancy(s.sol, s.sol, s.problem, 0.0, 0.5), std::invalid_argument);
  const auto& other = tall_spike();
  EXPECT_THROW(uniqueness_discrepancy(s.sol, other.sol, s.problem, 0.1, 0.5), MeshMismatch);
}

TEST(TruncationConvergence, BoundedDataStabilizes) {
  const auto& s = spike();
  const auto problem = Problem::make(s.kernel, std::vector<double>(64, 0.8));
  const double levels[] = {0.5, 1, 2, 4};
  MinimizeOptions opts;
  opts.tol = kTol;
  const auto seq = approx_sequence(problem, levels, opts);
  const auto gaps = truncation_convergence(seq.solutions, *s.kernel, 0.05);
  ASSERT_EQ(gaps.size(), 4u);
  EXPECT_GT(gaps[0].gap, 0.0);
  for (std::size_t i = 1; i < 4; ++i) EXPECT_LE(gaps[i].gap, 10 * kTol);
  EXPECT_EQ(gaps.back().gap, 0.0);
}

TEST(TruncationConvergence, SpikeGapsDecrease) {
  const auto& s = spike();
  const double levels[] = {1, 4, 16, 64};
  MinimizeOptions opts;
  opts.tol = kTol;
  const auto seq = approx_sequence(s.problem, levels, opts);
  const auto gaps = truncation_convergence(seq.solutions, *s.kernel, 0.5 * s.sol.u.max_abs());
  for (std::size_t i = 1; i < gaps.size(); ++i) EXPECT_LT(gaps[i].gap, gaps[i - 1].gap);
  EXPECT_EQ(gaps.back().gap, 0.0);
}

TEST(Embedding, HomogeneousAndRangeChecked) {
  const auto& s = spike();
  const auto r2 = parse_expression("2", 1, VariableRole::pointwise);
  const double base = embedding_ratio(s.sol.u, *s.kernel, s.field, r2);
  std::vector<double> scaled = s.sol.u.values();
  for (auto& v : scaled) v *= 7.5;
  EXPECT_NEAR(embedding_ratio(s.sol.u.with_values(scaled), *s.kernel, s.field, r2), base,
              1e-8 * base);
  // Critical exponent N p / (N - s p) = 10.
  EXPECT_THROW(embedding_ratio(s.sol.u, *s.kernel, s.field,
                               parse_expression("10.5", 1, VariableRole::pointwise)),
               ExponentRangeViolation);
  EXPECT_THROW(embedding_ratio(s.sol.u, *s.kernel, s.field,
                               parse_expression("1", 1, VariableRole::pointwise)),
               ExponentRangeViolation);
  EXPECT_NO_THROW(embedding_ratio(s.sol.u, *s.kernel, s.field,
                                  parse_expression("9.9", 1, VariableRole::pointwise)));
}

TEST(Embedding, ZeroSeminorm) {
  const auto& s = spike();
  EXPECT_THROW(embedding_ratio(DiscreteFunction::zeros(*s.kernel), *s.kernel, s.field,
                               parse_expression("2", 1, VariableRole::pointwise)),
               ZeroSeminorm);
  EXPECT_THROW(embedding_ratio(DiscreteFunction::on(*s.kernel, std::vector<double>(64, 3.0)),
                               *s.kernel, s.field,
                               parse_expression("2", 1, VariableRole::pointwise)),
               ZeroSeminorm);
}

TEST(Embedding, HatStableUnderRefinement) {
  const Domain d = Domain::interval(0, 1);
  const auto field = build_exponent_field("2", std::nullopt, 0.4, d);
  const auto r = parse_expression("2", 1, VariableRole::pointwise);
  double ratios[2];
  int cells = 64;
  for (double& ratio : ratios) {
    const Mesh mesh = build_mesh(d, cells);
    const Kernel k = assemble_kernel(mesh, field, 1e-6);
    std::vector<double> hat(cells);
    for (int i = 0; i < cells; ++i) {
      const double x = mesh.node(i)[0];
      hat[i] = mesh.boundary()[i] ? 0.0 : std::min(x, 1.0 - x);
    }
    ratio = embedding_ratio(DiscreteFunction::on(k, hat, true), k, field, r);
    EXPECT_TRUE(std::isfinite(ratio));
    cells *= 2;
  }
  EXPECT_LE(std::abs(ratios[1] - ratios[0]), 0.1 * ratios[0]);
}
