#include <gtest/gtest.h>

#include <cmath>

#include "fracplap/errors.hpp"
#include "fracplap/quadrature.hpp"

using namespace fracplap;

namespace {

Box interval(double a, double b) {
  Box box;
  box.dimension = 1;
  box.lower = {a, 0.0};
  box.upper = {b, 0.0};
  return box;
}

// Double antiderivative of (y - x)^{-a} over [a0,a1] x [b0,b1], b0 >= a1.
double closed_form_1d(double a0, double a1, double b0, double b1, double a) {
  auto F = [&](double t) { return t > 0.0 ? std::pow(t, 2.0 - a) : 0.0; };
  return (F(b1 - a1) - F(b0 - a1) - F(b1 - a0) + F(b0 - a0)) / ((a - 1.0) * (2.0 - a));
}

// Composite midpoint rule with m x m sub-pairs.
double uniform_midpoint_1d(double a0, double a1, double b0, double b1, double a, int m) {
  const double ha = (a1 - a0) / m;
  const double hb = (b1 - b0) / m;
  double sum = 0.0;
  for (int i = 0; i < m; ++i) {
    const double x = a0 + (i + 0.5) * ha;
    for (int j = 0; j < m; ++j) sum += std::pow(b0 + (j + 0.5) * hb - x, -a);
  }
  return sum * ha * hb;
}

}  // namespace

TEST(Quadrature, SeparatedClosedForm) {
  const double oracle = closed_form_1d(0.0, 0.1, 0.4, 0.5, 1.8);
  EXPECT_NEAR(oracle, 0.053454786943747, 1e-14);
  const auto r = pair_weight(interval(0.0, 0.1), interval(0.4, 0.5), 0.4, 2.0, 1e-6);
  EXPECT_NEAR(r.value, oracle, 1e-4 * oracle);
  EXPECT_NEAR(r.value, 0.05339, 1e-4);
  EXPECT_GT(r.rel_error, 0.0);
  EXPECT_LT(std::abs(r.value - oracle) / oracle, 1e-5);
}

TEST(Quadrature, MidpointOnlyWithHugeTolerance) {
  const auto r = singular_pair_integral(interval(0.0, 0.1), interval(0.4, 0.5), 1.8, 1.0);
  EXPECT_DOUBLE_EQ(r.value, 0.01 * std::pow(0.4, -1.8));
  EXPECT_NEAR(r.value, 0.05203, 1e-5);
}

TEST(Quadrature, AgreesWithUniformSubdivision) {
  const auto r = singular_pair_integral(interval(0.0, 0.1), interval(0.5, 0.6), 1.7, 1e-6);
  const double fine = uniform_midpoint_1d(0.0, 0.1, 0.5, 0.6, 1.7, 1000);
  EXPECT_NEAR(r.value, fine, 1e-5 * fine);
}

TEST(Quadrature, NonAlignedSeparated) {
  const auto r = singular_pair_integral(interval(0.0, 0.1), interval(0.33, 0.47), 1.5, 1e-8);
  const double oracle = closed_form_1d(0.0, 0.1, 0.33, 0.47, 1.5);
  EXPECT_NEAR(r.value, oracle, 1e-6 * oracle);
}

TEST(Quadrature, AdjacentClosedForm) {
  for (double a : {1.1, 1.5, 1.8, 1.95}) {
    const auto r = singular_pair_integral(interval(0.0, 0.1), interval(0.1, 0.2), a, 1e-8);
    const double oracle = closed_form_1d(0.0, 0.1, 0.1, 0.2, a);
    EXPECT_NEAR(r.value, oracle, 1e-6 * oracle) << "alpha " << a;
  }
}

TEST(Quadrature, OffsetsMatchClosedForm1D) {
  CellPairIntegrator integ(1, {0.05, 0.0}, 1.6, 1e-8);
  for (int o : {1, 2, 3, 7, 19, -4}) {
    const double lo = o * 0.05;
    const double oracle = o > 0 ? closed_form_1d(0.0, 0.05, lo, lo + 0.05, 1.6)
                                : closed_form_1d(lo, lo + 0.05, 0.0, 0.05, 1.6);
    EXPECT_NEAR(integ({o, 0}).value, oracle, 1e-6 * oracle) << "offset " << o;
  }
}

TEST(Quadrature, IntegratorMatchesSingularPairIntegral) {
  CellPairIntegrator integ(1, {0.1, 0.0}, 1.8, 1e-6);
  const auto direct = singular_pair_integral(interval(0.0, 0.1), interval(0.4, 0.5), 1.8, 1e-6);
  const auto memo = integ({4, 0});
  EXPECT_DOUBLE_EQ(memo.value, direct.value);
  // A second query is served from the memo.
  EXPECT_EQ(integ({4, 0}).evaluations, 0);
}

TEST(Quadrature, DivergentInOneDimension) {
  EXPECT_THROW(singular_pair_integral(interval(0.0, 0.1), interval(0.1, 0.2), 2.0, 1e-6),
               DivergentIntegral);
}

// Reference values from an independent polar-coordinate integration of
// int |z|^{-a} tri(z1 - o1) tri(z2 - o2) dz over unit cells.
TEST(Quadrature, UnitSquarePairs) {
  struct Case {
    int o1, o2;
    double alpha, value;
  };
  const Case cases[] = {
      {1, 0, 2.6, 4.592872256526692},   {1, 1, 2.6, 0.689015960925846},
      {2, 0, 2.6, 0.1919217026156326},  {2, 1, 2.6, 0.14007005284912283},
      {3, 2, 2.6, 0.03729447751853609}, {1, 0, 2.2, 2.279358369864463},
  };
  for (const auto& c : cases) {
    CellPairIntegrator integ(2, {1.0, 1.0}, c.alpha, 1e-5);
    const auto r = integ({c.o1, c.o2});
    const double err = std::abs(r.value - c.value) / c.value;
    EXPECT_LE(err, 2e-5) << c.o1 << "," << c.o2 << " alpha " << c.alpha;
    EXPECT_LE(err, r.rel_error) << c.o1 << "," << c.o2 << " alpha " << c.alpha;
  }
}

TEST(Quadrature, ScalingWithCellSize) {
  const double h = 0.1;
  CellPairIntegrator unit(2, {1.0, 1.0}, 2.6, 1e-4);
  CellPairIntegrator small(2, {h, h}, 2.6, 1e-4);
  for (CellPairIntegrator::Offset o : {CellPairIntegrator::Offset{1, 0}, {1, 1}, {2, 3}}) {
    EXPECT_NEAR(small(o).value, std::pow(h, 4.0 - 2.6) * unit(o).value,
                1e-12 * small(o).value);
  }
}

TEST(Quadrature, DivergentEdgePairIn2D) {
  CellPairIntegrator integ(2, {1.0, 1.0}, 3.0, 1e-3);
  EXPECT_THROW(integ({1, 0}), DivergentIntegral);
  // Corner-touching pairs only spawn corner-touching children, finite for alpha < 4.
  EXPECT_GT(integ({1, 1}).value, 0.0);
  CellPairIntegrator at_four(2, {1.0, 1.0}, 4.0, 1e-3);
  EXPECT_THROW(at_four({1, 1}), DivergentIntegral);
}

TEST(Quadrature, RejectsBadInput) {
  EXPECT_THROW(singular_pair_integral(interval(0.0, 0.1), interval(0.0, 0.1), 1.5, 1e-6),
               std::invalid_argument);
  EXPECT_THROW(singular_pair_integral(interval(0.0, 0.1), interval(0.1, 0.3), 1.5, 1e-6),
               std::invalid_argument);
  EXPECT_THROW(singular_pair_integral(interval(0.0, 0.1), interval(0.4, 0.5), 1.5, 0.0),
               std::invalid_argument);
  EXPECT_THROW(CellPairIntegrator(3, {1.0, 1.0}, 1.5, 1e-6), std::invalid_argument);
}
