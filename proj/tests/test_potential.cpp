#include <gtest/gtest.h>

#include <cmath>

#include "clab/potential.hpp"

using namespace clab;

TEST(Potential, EvaluateSimpleKinds) {
  EXPECT_EQ(evaluate(Potential::zero(), 3.7), 0.0);
  EXPECT_EQ(evaluate(Potential::constant(5.0), 100.0), 5.0);
  EXPECT_THROW(evaluate(Potential::zero(), -0.1), DomainError);
}

TEST(Potential, OscillatingSignPattern) {
  const Potential V = Potential::oscillating_example();
  // n = 1: floor(2(x-1)) = -2 on [0, 0.5), -1 on [0.5, 1)
  EXPECT_EQ(V(0.1), 1.0);
  EXPECT_EQ(V(0.7), -1.0);
  // n = 2: four cells of width 1/4 on [1, 2)
  EXPECT_EQ(V(1.1), 1.0);
  EXPECT_EQ(V(1.3), -1.0);
  EXPECT_EQ(V(1.6), 1.0);
  EXPECT_EQ(V(1.9), -1.0);
  // brute-force floor formula
  for (double x = 0.013; x < 20.0; x += 0.0371) {
    const double n = std::floor(x) + 1.0;
    const double e = std::floor(2.0 * n * (x - n));
    const double expect = (static_cast<long long>(e) % 2 == 0) ? 1.0 : -1.0;
    ASSERT_EQ(V(x), expect) << "x = " << x;
  }
}

TEST(Potential, GridRangeError) {
  const Potential V = Potential::grid(0.5, {1.0, 2.0, 3.0});
  EXPECT_EQ(V(0.7), 2.0);
  EXPECT_THROW(V(1.6), RangeError);
  EXPECT_NEAR(V.integral(0.0, 1.5), 3.0, 1e-15);
}

TEST(Potential, ValidationRejectsBadInput) {
  EXPECT_THROW(Potential::piecewise({0.0, 1.0, 1.0}, {1.0, 2.0, 3.0}), DomainError);
  EXPECT_THROW(Potential::piecewise({0.5}, {1.0}), DomainError);
  EXPECT_THROW(Potential::grid(0.0, {1.0}), DomainError);
  EXPECT_THROW(Potential::periodic_samples(-1.0, {1.0}), DomainError);
}

TEST(Potential, CesaroMean) {
  EXPECT_EQ(cesaro_mean(Potential::constant(5.0), 7.3), 5.0);
  EXPECT_EQ(cesaro_mean(Potential::zero(), 10.0), 0.0);
  const Potential V = Potential::oscillating_example();
  // On every unit interval the signs cancel exactly.
  EXPECT_NEAR(cesaro_mean(V, 1000.0), 0.0, 1e-12);
  const double m100 = std::abs(cesaro_mean(V, 100.25));
  const double m300 = std::abs(cesaro_mean(V, 300.25));
  const double m1000 = std::abs(cesaro_mean(V, 1000.25));
  EXPECT_LE(m1000, 0.02);
  EXPECT_GT(m100, m300);
  EXPECT_GT(m300, m1000);
}

TEST(Potential, CesaroMeanTrigUsesAntiderivative) {
  const Potential V = Potential::periodic_trig(2.0, 0.5, {1.0}, {0.25});
  const double L = 3.3;
  const double w = pi;
  const double expect = (0.5 * L + std::sin(w * L) / w - 0.25 * (std::cos(w * L) - 1.0) / w) / L;
  EXPECT_NEAR(cesaro_mean(V, L), expect, 1e-14);
}

TEST(Potential, LocalL1Sup) {
  EXPECT_NEAR(local_l1_sup(Potential::constant(-2.0), 50.0), 2.0, 1e-14);
  EXPECT_NEAR(local_l1_sup(Potential::oscillating_example(), 50.0), 1.0, 1e-12);
  EXPECT_EQ(local_l1_sup(Potential::zero(), 50.0), 0.0);
  const Potential bump = Potential::piecewise({0.0, 3.0, 3.5, 10.0}, {0.0, 4.0, -1.0, 0.0});
  // best window [3, 4]: 0.5*4 + 0.5*1
  EXPECT_NEAR(local_l1_sup(bump, 20.0), 2.5, 1e-14);
  EXPECT_LE(local_l1_sup(bump, 1.0), local_l1_sup(bump, 20.0));
  EXPECT_NEAR(local_l1_sup(bump, 1.0), 0.0, 1e-14);
}

TEST(Potential, PeriodicSamplesCells) {
  const Potential V = Potential::periodic_samples(1.0, {1.0, -1.0});
  EXPECT_EQ(V(0.2), 1.0);
  EXPECT_EQ(V(0.7), -1.0);
  EXPECT_EQ(V(5.2), 1.0);
  EXPECT_NEAR(V.integral(0.0, 10.0), 0.0, 1e-13);
  EXPECT_NEAR(V.abs_integral(0.0, 10.0), 10.0, 1e-13);
  EXPECT_EQ(V.tag(), "periodic");
}

TEST(Potential, ConstantTail) {
  const Potential V = Potential::piecewise({0.0, 2.0}, {1.0, 3.0});
  ASSERT_TRUE(V.constant_tail().has_value());
  EXPECT_EQ(V.constant_tail()->first, 2.0);
  EXPECT_EQ(V.constant_tail()->second, 3.0);
  EXPECT_FALSE(Potential::oscillating_example().constant_tail().has_value());
}
