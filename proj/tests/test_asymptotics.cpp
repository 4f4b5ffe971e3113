#include <gtest/gtest.h>

#include <cmath>

#include "clab/asymptotics.hpp"

using namespace clab;

namespace {

double free_fE(double xi) { return 1.0 / (2.0 * pi * std::sqrt(xi)); }
double free_fmu(double xi) { return 1.0 / (pi * std::sqrt(xi)); }

}  // namespace

TEST(Prufer, FreeAngleAtResonances) {
  const double L = 10.0;
  for (int n = 1; n < 6; ++n) {
    const double xi = std::pow(n * pi / L, 2);
    EXPECT_NEAR(prufer_angle(Potential::zero(), L, xi), 0.5 * pi + n * pi, 1e-12);
  }
  EXPECT_NEAR(prufer_angle(Potential::zero(), L, 1.0), 0.5 * pi + 10.0, 1e-12);
  const double neg = prufer_angle(Potential::zero(), 200.0, -100.0);
  EXPECT_GT(neg, 0.0);
  EXPECT_LT(neg, 0.5 * pi);
}

TEST(Prufer, MonotoneInXi) {
  const Potential V = Potential::oscillating_example();
  double prev = -INFINITY;
  for (double xi = -3.0; xi < 20.0; xi += 0.05) {
    const double t = prufer_angle(V, 12.0, xi);
    EXPECT_GT(t, prev);
    prev = t;
  }
}

TEST(Spectrum, FreeExact) {
  const double L = 50.0;
  const SpectrumSlice s = truncation_spectrum(Potential::zero(), L, 0.0, 2.0);
  ASSERT_FALSE(s.eigenvalues.empty());
  for (std::size_t k = 0; k < s.eigenvalues.size(); ++k)
    EXPECT_NEAR(s.eigenvalues[k], std::pow(k * pi / L, 2), 1e-12) << k;
  EXPECT_EQ(s.eigenvalues.size(), static_cast<std::size_t>(std::floor(std::sqrt(2.0) * L / pi)) + 1);
  EXPECT_TRUE(s.interlacing_ok);
  EXPECT_TRUE(s.phase_monotone);
  // weights = 1/||v||^2; ground state v = 1
  EXPECT_NEAR(s.weights[0], 1.0 / L, 1e-14);
  EXPECT_NEAR(s.weights[3], 2.0 / L, 1e-12);
}

TEST(Spectrum, ConstantShift) {
  const double L = 30.0, d0 = 2.5;
  const SpectrumSlice s = truncation_spectrum(Potential::constant(d0), L, 3.0, 6.0);
  for (double e : s.eigenvalues) {
    const double k = std::sqrt(e - d0) * L / pi;
    EXPECT_NEAR(k, std::round(k), 1e-10);
  }
}

TEST(Spectrum, OscillatingAgainstDirectEvaluation) {
  const Potential V = Potential::oscillating_example();
  const double L = 15.0;
  const SpectrumSlice s = truncation_spectrum(V, L, -1.0, 10.0);
  EXPECT_TRUE(s.interlacing_ok);
  for (double e : s.eigenvalues) {
    const SolutionFrame f = integrate_frame(V, e, L);
    EXPECT_LE(std::abs(f.dv), 1e-9 * std::max(1.0, std::abs(f.v)) * std::max(1.0, std::sqrt(std::abs(e)) * L));
  }
  // independent count: sign changes of v'(L, .) on a fine grid
  int changes = 0;
  double prev = integrate_frame(V, -1.0, L).dv.real();
  for (int i = 1; i <= 20000; ++i) {
    const double cur = integrate_frame(V, -1.0 + 11.0 * i / 20000.0, L).dv.real();
    if ((prev > 0.0) != (cur > 0.0)) ++changes;
    prev = cur;
  }
  EXPECT_EQ(static_cast<int>(s.eigenvalues.size()), changes);
}

TEST(Spectrum, TrigPotentialOde) {
  const Potential V = Potential::periodic_trig(1.0, 0.0, {1.5});
  const double L = 8.0;
  const SpectrumSlice s = truncation_spectrum(V, L, -2.0, 15.0);
  EXPECT_TRUE(s.interlacing_ok);
  ASSERT_GT(s.eigenvalues.size(), 5u);
  for (double e : s.eigenvalues) {
    const SolutionFrame f = integrate_frame(V, e, L, 1e-12);
    EXPECT_LE(std::abs(f.dv), 1e-7 * std::max(1.0, std::abs(f.v)) * (1.0 + std::sqrt(std::abs(e)))) << e;
  }
}

TEST(Clock, FreeClosedForm) {
  const ClockSpacing c = clock_spacing_check(Potential::zero(), 200.0, 1.0, -3, 3, free_fE);
  ASSERT_EQ(c.values.size(), 7u);
  EXPECT_TRUE(c.interlacing_ok);
  for (std::size_t i = 0; i < c.values.size(); ++i) {
    const double k = std::round(std::sqrt(c.left[i]) * 200.0 / pi);
    EXPECT_NEAR(c.values[i], (2.0 * k + 1.0) / (2.0 * k), 1e-9);
    EXPECT_LE(std::abs(c.values[i] - 1.0), 0.01);
    EXPECT_GT(c.right[i], c.left[i]);
  }
  // xi <= xi_0: index 0 is the first eigenvalue at or above xi.
  EXPECT_GE(c.left[3], 1.0);
  EXPECT_LT(c.left[2], 1.0);
  EXPECT_NEAR(std::sqrt(c.left[3]) * 200.0 / pi, 64.0, 1e-9);
}

TEST(Clock, ErrorHalvesWithL) {
  const double e1 = std::abs(clock_spacing_check(Potential::zero(), 200.0, 1.0, 0, 0, free_fE).values[0] - 1.0);
  const double e2 = std::abs(clock_spacing_check(Potential::zero(), 400.0, 1.0, 0, 0, free_fE).values[0] - 1.0);
  EXPECT_NEAR(e2 / e1, 0.5, 0.02);
}

TEST(Clock, WindowUnderflow) {
  EXPECT_THROW(clock_spacing_check(Potential::zero(), 10.0, 0.5, -50, 0, free_fE), DomainError);
}

TEST(Universality, FreeGridSmall) {
  const UniversalityGrid g = universality_grid(Potential::zero(), 500.0, 1.0, 2.0, 21, free_fE(1.0));
  EXPECT_EQ(g.ratio[10][10], cplx(1.0));
  EXPECT_LE(g.sup_deviation, 0.05);
  EXPECT_LE(g.hermitian_defect, 1e-10);
  for (int i = 0; i < 21; ++i) {
    EXPECT_GT(g.ratio[i][i].real(), 0.0);
    EXPECT_NEAR(g.ratio[i][i].imag(), 0.0, 1e-12);
  }
}

TEST(Universality, ThreadCountDoesNotChangeResult) {
  const UniversalityGrid a = universality_grid(Potential::zero(), 100.0, 1.0, 2.0, 7, free_fE(1.0), 1);
  const UniversalityGrid b = universality_grid(Potential::zero(), 100.0, 1.0, 2.0, 7, free_fE(1.0), 3);
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j) EXPECT_EQ(a.ratio[i][j], b.ratio[i][j]);
}

TEST(Universality, FirstZeroNearInverseDensity) {
  const double L = 500.0, xi = 1.0;
  const double k0 = kernel_diagonal(Potential::zero(), L, xi);
  auto r = [&](double z) { return kernel_boundary(Potential::zero(), L, xi + z / L, xi).value.real() / k0; };
  const double zero = roots::brent(r, 5.0, 7.5, 1e-12).x;
  EXPECT_NEAR(zero, 2.0 * pi * std::sqrt(xi), 0.05);
}

TEST(Sweep, FreeAndConstant) {
  const ChristoffelSweep s =
      christoffel_sweep(Potential::zero(), {0.5, 1.0, 2.0, 4.0}, {100.0, 500.0}, free_fmu, free_fE);
  ASSERT_EQ(s.rows.size(), 8u);
  for (const auto& r : s.rows) EXPECT_DOUBLE_EQ(r.reference, 2.0);
  EXPECT_LE(s.sup_deviation[1], 0.02);
  EXPECT_LE(s.sup_deviation[1], s.sup_deviation[0]);
  auto fE3 = [](double xi) { return free_fE(xi - 3.0); };
  auto fmu3 = [](double xi) { return free_fmu(xi - 3.0); };
  const ChristoffelSweep c = christoffel_sweep(Potential::constant(3.0), {3.5, 4.0, 5.0, 7.0}, {500.0}, fmu3, fE3);
  EXPECT_LE(c.sup_deviation[0], 0.02);
  EXPECT_THROW(christoffel_sweep(Potential::zero(), {1.0}, {500.0, 100.0}, free_fmu, free_fE), DomainError);
}

TEST(Counting, FreeAgainstMartinMeasure) {
  const FiniteGapSet E = solve_critical_points({0.0, {}, {}});
  const SpectrumSlice s = truncation_spectrum(Potential::zero(), 200.0, 0.5, 4.0, false);
  std::vector<double> bins;
  for (double b = 0.5; b <= 4.0 + 1e-12; b += 0.5) bins.push_back(b);
  const CountingTable t = counting_measure_compare(s, E, bins);
  EXPECT_LE(t.total_variation, 0.05);
  double nu = 0.0, rho = 0.0;
  for (const auto& r : t.rows) {
    EXPECT_GE(r.nu_L, 0.0);
    nu += r.nu_L;
    rho += r.rho_E;
  }
  std::vector<double> fine;
  for (double b = 0.5; b <= 4.0 + 1e-12; b += 0.25) fine.push_back(b);
  const CountingTable tf = counting_measure_compare(s, E, fine);
  double nu_f = 0.0, rho_f = 0.0;
  for (const auto& r : tf.rows) {
    nu_f += r.nu_L;
    rho_f += r.rho_E;
  }
  EXPECT_NEAR(nu, nu_f, 1e-15);
  EXPECT_NEAR(rho, rho_f, 1e-12);
  EXPECT_THROW(counting_measure_compare(s, E, {0.1, 1.0}), DomainError);
}
