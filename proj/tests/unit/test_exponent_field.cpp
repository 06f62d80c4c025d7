#include <gtest/gtest.h>

#include "fracplap/errors.hpp"
#include "fracplap/exponent_field.hpp"

using namespace fracplap;

TEST(ExponentField, ConstantAccepted) {
  const auto f = build_exponent_field("2", std::nullopt, 0.4, Domain::interval(0, 1));
  EXPECT_DOUBLE_EQ(f.p_minus, 2.0);
  EXPECT_DOUBLE_EQ(f.p_plus, 2.0);
  EXPECT_DOUBLE_EQ(f.q_minus, 2.0);
  EXPECT_DOUBLE_EQ(f.symmetry_defect, 0.0);
  EXPECT_EQ(f.warnings.size(), 1u);  // s p_minus = 0.8 <= 1
}

TEST(ExponentField, OrderTooLarge) {
  EXPECT_THROW(build_exponent_field("2", std::nullopt, 0.6, Domain::interval(0, 1)),
               OrderTooLarge);
}

TEST(ExponentField, Asymmetric) {
  EXPECT_THROW(build_exponent_field("2 + x", std::nullopt, 0.3, Domain::interval(0, 1)),
               AsymmetricExponent);
}

TEST(ExponentField, OutOfRange) {
  EXPECT_THROW(build_exponent_field("1", std::nullopt, 0.3, Domain::interval(0, 1)),
               ExponentOutOfRange);
  EXPECT_THROW(build_exponent_field("2", "0.5 + x", 0.3, Domain::interval(0, 1)),
               ExponentOutOfRange);
}

TEST(ExponentField, BadOrder) {
  EXPECT_THROW(build_exponent_field("2", std::nullopt, 0.0, Domain::interval(0, 1)),
               std::invalid_argument);
  EXPECT_THROW(build_exponent_field("2", std::nullopt, 1.0, Domain::interval(0, 1)),
               std::invalid_argument);
}

TEST(ExponentField, VariableBoundsAndTraceWarning) {
  const auto f =
      build_exponent_field("1.6 + 0.8*(x+y)/2", "1.8 + x", 0.3, Domain::interval(0, 1));
  EXPECT_NEAR(f.p_minus, 1.6, 1e-12);
  EXPECT_NEAR(f.p_plus, 2.4, 1e-12);
  EXPECT_NEAR(f.q_minus, 1.8, 1e-12);
  EXPECT_NEAR(f.q_plus, 2.8, 1e-12);
  EXPECT_FALSE(f.warnings.empty());
  const double x[1] = {0.25};
  const double y[1] = {0.75};
  EXPECT_DOUBLE_EQ(f.p_at(x, y), 2.0);
  EXPECT_DOUBLE_EQ(f.q_at(x), 2.05);
  EXPECT_DOUBLE_EQ(f.p_diagonal(x), 1.8);
}

TEST(ExponentField, DefaultQIsDiagonal) {
  const auto f = build_exponent_field("2 + x*y", std::nullopt, 0.3, Domain::interval(0, 1));
  const double x[1] = {0.5};
  EXPECT_DOUBLE_EQ(f.q_at(x), 2.25);
}

TEST(ExponentField, TwoDimensional) {
  const auto f = build_exponent_field("2 + 0.1*(x1 + y1)", std::nullopt, 0.3,
                                      Domain::rectangle(0, 1, 0, 1));
  EXPECT_EQ(f.dimension, 2);
  EXPECT_NEAR(f.p_minus, 2.0, 1e-12);
  EXPECT_NEAR(f.p_plus, 2.2, 1e-12);
  EXPECT_THROW(build_exponent_field("2 + x1", std::nullopt, 0.3, Domain::rectangle(0, 1, 0, 1)),
               AsymmetricExponent);
}

TEST(Mesh, IntervalOfFour) {
  const Mesh m = build_mesh(Domain::interval(0, 1), 4);
  ASSERT_EQ(m.size(), 4u);
  const double expected[] = {0.125, 0.375, 0.625, 0.875};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_DOUBLE_EQ(m.masses()[i], 0.25);
    EXPECT_DOUBLE_EQ(m.node(i)[0], expected[i]);
  }
  EXPECT_EQ(m.boundary(), (std::vector<bool>{true, false, false, true}));
}

TEST(Mesh, SquareTwoByTwo) {
  const Mesh m = build_mesh(Domain::rectangle(0, 1, 0, 1), {2, 2});
  ASSERT_EQ(m.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_DOUBLE_EQ(m.masses()[i], 0.25);
    EXPECT_TRUE(m.boundary()[i]);
  }
}

TEST(Mesh, MassesPartitionDomain) {
  const Mesh m = build_mesh(Domain::interval(0, 2), 8);
  double total = 0.0;
  for (double v : m.masses()) total += v;
  EXPECT_DOUBLE_EQ(total, 2.0);
  const Mesh m2 = build_mesh(Domain::rectangle(0, 2, 0, 3), {4, 5});
  total = 0.0;
  for (double v : m2.masses()) total += v;
  EXPECT_NEAR(total, 6.0, 1e-13);
  int interior = 0;
  for (bool b : m2.boundary()) interior += b ? 0 : 1;
  EXPECT_EQ(interior, 2 * 3);
}

TEST(Mesh, Rejects) {
  EXPECT_THROW(build_mesh(Domain::interval(0, 1), 1), std::invalid_argument);
  EXPECT_THROW(build_mesh(Domain::interval(1, 1), 4), std::invalid_argument);
}
