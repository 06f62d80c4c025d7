#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "fracplap/errors.hpp"
#include "fracplap/function_spaces.hpp"

using namespace fracplap;

namespace {

struct Instance {
  std::shared_ptr<Kernel> kernel;
  DiscreteFunction u;
};

Instance random_instance(std::mt19937_64& rng, std::size_t n, double pmin, double pmax,
                         double scale) {
  std::uniform_real_distribution<double> w(0.1, 2.0);
  std::uniform_real_distribution<double> p(pmin, pmax);
  std::uniform_real_distribution<double> v(-scale, scale);
  std::vector<double> weights(n * n, 0.0);
  std::vector<double> exps(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      weights[i * n + j] = weights[j * n + i] = w(rng);
      exps[i * n + j] = exps[j * n + i] = p(rng);
    }
  std::vector<double> masses(n);
  for (auto& m : masses) m = w(rng);
  auto k = std::make_shared<Kernel>(
      Kernel::from_matrices(weights, exps, masses, std::vector<bool>(n, false)));
  std::vector<double> vals(n);
  for (auto& x : vals) x = v(rng);
  return {k, DiscreteFunction::on(*k, vals)};
}

Kernel two_node(double w, double p) {
  return Kernel::from_matrices({0, w, w, 0}, {0, p, p, 0}, {1, 1}, {false, false});
}

double brute_seminorm(const Kernel& k, const DiscreteFunction& u) {
  double s = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i)
    for (std::size_t j = 0; j < k.size(); ++j)
      if (i != j) s += k.weight(i, j) * std::pow(std::abs(u[i] - u[j]), k.exponent(i, j));
  return s;
}

}  // namespace

TEST(Modular, HandSums) {
  const Kernel k = two_node(1.0, 3.0);
  const auto u = DiscreteFunction::on(k, {0.0, 2.0});
  EXPECT_DOUBLE_EQ(seminorm_modular(k, u), 16.0);
  const std::vector<double> q{2.0, 2.0};
  EXPECT_DOUBLE_EQ(full_modular(k, q, u), 20.0);
  EXPECT_EQ(seminorm_modular(k, DiscreteFunction::on(k, {3.0, 3.0})), 0.0);
  EXPECT_EQ(full_modular(k, q, DiscreteFunction::zeros(k)), 0.0);
}

TEST(Modular, MatchesBruteForce) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    const auto inst = random_instance(rng, 16, 1.2, 4.0, 2.0);
    const double oracle = brute_seminorm(*inst.kernel, inst.u);
    EXPECT_NEAR(seminorm_modular(*inst.kernel, inst.u), oracle, 1e-12 * oracle);
    std::vector<double> q(16, 1.7);
    double pointwise = 0.0;
    for (std::size_t i = 0; i < 16; ++i)
      pointwise += inst.kernel->masses()[i] * std::pow(std::abs(inst.u[i]), 1.7);
    EXPECT_NEAR(full_modular(*inst.kernel, q, inst.u), oracle + pointwise,
                1e-12 * (oracle + pointwise));
  }
}

TEST(Modular, MeshMismatch) {
  const Kernel a = two_node(1.0, 2.0);
  const Kernel b = two_node(1.0, 2.0);
  EXPECT_THROW(seminorm_modular(a, DiscreteFunction::on(b, {0.0, 1.0})), MeshMismatch);
}

TEST(Luxemburg, ZeroFunction) {
  const Kernel k = two_node(1.0, 2.0);
  const auto n = luxemburg_norm(Modular::seminorm(k), DiscreteFunction::zeros(k));
  EXPECT_EQ(n.value, 0.0);
  EXPECT_EQ(n.residual, 0.0);
}

TEST(Luxemburg, ConstantExponentClosedForm) {
  // modular = 2 |1|^2 = 2 with w = 1.
  const Kernel k = two_node(1.0, 2.0);
  const auto n = luxemburg_norm(Modular::seminorm(k), DiscreteFunction::on(k, {0.0, 1.0}));
  EXPECT_NEAR(n.value, std::sqrt(2.0), 1e-9 * std::sqrt(2.0));
  EXPECT_LE(n.residual, kDefaultLuxemburgTolerance);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pick(1.2, 4.0);
  for (int t = 0; t < 200; ++t) {
    const double p = pick(rng);
    const auto inst = random_instance(rng, 6, p, p, std::pow(10.0, pick(rng) - 2.5));
    const double closed = std::pow(seminorm_modular(*inst.kernel, inst.u), 1.0 / p);
    const double value = luxemburg_norm(Modular::seminorm(*inst.kernel), inst.u).value;
    EXPECT_NEAR(value, closed, 1e-9 * closed);
  }
}

TEST(Luxemburg, MixedTwoTerm) {
  // Pairs (0,1) with p = 2 and (0,2) with p = 4, unit differences, w = 1/2 so
  // each ordered-pair sum contributes 1: lambda^-2 + lambda^-4 = 1.
  const Kernel k = Kernel::from_matrices({0, 0.5, 0.5, 0.5, 0, 0, 0.5, 0, 0},
                                         {0, 2, 4, 2, 0, 3, 4, 3, 0}, {1, 1, 1},
                                         {false, false, false});
  const auto u = DiscreteFunction::on(k, {0.0, 1.0, 1.0});
  const double t = (std::sqrt(5.0) - 1.0) / 2.0;
  const double oracle = 1.0 / std::sqrt(t);
  EXPECT_NEAR(oracle, 1.272019649514069, 1e-15);
  EXPECT_NEAR(luxemburg_norm(Modular::seminorm(k), u).value, oracle, 1e-9);
}

TEST(Luxemburg, Homogeneity) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 50; ++t) {
    const auto inst = random_instance(rng, 8, 1.2, 4.0, 1.0);
    const auto mod = Modular::seminorm(*inst.kernel);
    const double base = luxemburg_norm(mod, inst.u).value;
    for (double c : {0.01, 3.0, 250.0}) {
      std::vector<double> scaled = inst.u.values();
      for (auto& x : scaled) x *= c;
      const double v = luxemburg_norm(mod, inst.u.with_values(scaled)).value;
      EXPECT_NEAR(v, c * base, 1e-8 * c * base);
    }
  }
}

TEST(Luxemburg, SandwichBothBranches) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> mag(-3.0, 2.0);
  int above = 0;
  int below = 0;
  for (int t = 0; t < 500; ++t) {
    const auto inst = random_instance(rng, 8, 1.2, 4.0, std::pow(10.0, mag(rng)));
    const Kernel& k = *inst.kernel;
    const double rho = seminorm_modular(k, inst.u);
    const double lam = luxemburg_norm(Modular::seminorm(k), inst.u).value;
    const double lo = std::pow(lam, lam >= 1.0 ? k.p_minus() : k.p_plus());
    const double hi = std::pow(lam, lam >= 1.0 ? k.p_plus() : k.p_minus());
    (lam >= 1.0 ? above : below)++;
    EXPECT_LE(lo, rho * (1.0 + 1e-8));
    EXPECT_LE(rho, hi * (1.0 + 1e-8));
  }
  EXPECT_GT(above, 50);
  EXPECT_GT(below, 50);
}

TEST(Luxemburg, NormEquivalence) {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 100; ++t) {
    const auto inst = random_instance(rng, 8, 1.3, 3.0, 2.0);
    const std::vector<double> q(8, 2.5);
    const double semi = luxemburg_norm(Modular::seminorm(*inst.kernel), inst.u).value;
    const double leb = luxemburg_norm(Modular::lebesgue(*inst.kernel, q), inst.u).value;
    const double full = luxemburg_norm(Modular::full(*inst.kernel, q), inst.u).value;
    EXPECT_GE(full * (1 + 1e-9), std::max(semi, leb));
    EXPECT_LE(full, (semi + leb) * (1 + 1e-9));
  }
}

TEST(Luxemburg, ExponentsAtNodes) {
  const Domain d = Domain::interval(0, 1);
  const Mesh mesh = build_mesh(d, 4);
  const auto field = build_exponent_field("2 + x*y", "1.5 + x", 0.3, d);
  const Kernel k = assemble_kernel(mesh, field, 1e-4);
  const auto q = q_at_nodes(k, field);
  EXPECT_DOUBLE_EQ(q[0], 1.625);
  EXPECT_DOUBLE_EQ(q[3], 2.375);
  const auto u = DiscreteFunction::on(k, {0.0, 1.0, -1.0, 0.0});
  const double expected = seminorm_modular(k, u) + 0.25 * (1.0 + 1.0);
  EXPECT_NEAR(full_modular(k, field, u), expected, 1e-14);
}

TEST(DiscreteFunction, BoundaryZeroEnforced) {
  const Mesh mesh = build_mesh(Domain::interval(0, 1), 4);
  EXPECT_THROW(DiscreteFunction::on(mesh, {1, 1, 1, 1}, true), std::invalid_argument);
  EXPECT_THROW(DiscreteFunction::on(mesh, {0, 1, 1}), std::invalid_argument);
  const auto u = DiscreteFunction::on(mesh, {0, 1, -2, 0}, true);
  EXPECT_TRUE(u.boundary_zero());
  EXPECT_DOUBLE_EQ(u.max_abs(), 2.0);
  EXPECT_TRUE(u.with_values({0, 3, 3, 0}).boundary_zero());
  EXPECT_FALSE(u.with_values({1, 3, 3, 0}).boundary_zero());
}
