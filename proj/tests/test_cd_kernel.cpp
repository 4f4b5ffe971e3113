#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "clab/cd_kernel.hpp"

using namespace clab;

namespace {

double free_diagonal(double L, double xi) {
  const double k = std::sqrt(xi);
  return L / 2.0 + std::sin(2.0 * k * L) / (4.0 * k);
}

// int_0^L cos(a x) cos(b x) dx with b = conj(sqrt(w)).
cplx free_kernel(double L, cplx z, cplx w) {
  const cplx a = sqrt_upper(z), b = std::conj(sqrt_upper(w));
  auto sinc_int = [L](cplx s) { return std::abs(s) < 1e-8 ? cplx(L) : std::sin(s * L) / s; };
  return 0.5 * (sinc_int(a - b) + sinc_int(a + b));
}

}  // namespace

TEST(Kernel, FreeDiagonalClosedForm) {
  for (double xi : {0.3, 1.0, 4.0, 17.0}) {
    for (double L : {1.0, 12.5, 200.0}) {
      const double ref = free_diagonal(L, xi);
      EXPECT_NEAR(kernel_diagonal(Potential::zero(), L, xi), ref, 1e-11 * ref);
      EXPECT_NEAR(kernel_quadrature(Potential::zero(), L, xi, xi).value.real(), ref, 1e-10 * ref);
    }
  }
  EXPECT_NEAR(kernel_diagonal(Potential::zero(), 7.0, 0.0), 7.0, 1e-13);
}

TEST(Kernel, ShortIntervalIsLength) {
  EXPECT_NEAR(kernel_diagonal(Potential::oscillating_example(), 1e-6, 3.0), 1e-6, 1e-15);
}

TEST(Kernel, FreeOffDiagonalClosedForm) {
  const cplx z(3.0, 1.0), w(-2.0, 0.5);
  const double L = 6.0;
  const cplx ref = free_kernel(L, z, w);
  EXPECT_LE(std::abs(kernel_boundary(Potential::zero(), L, z, w).value - ref), 1e-10 * std::abs(ref));
  EXPECT_LE(std::abs(kernel_quadrature(Potential::zero(), L, z, w).value - ref), 1e-10 * std::abs(ref));
}

TEST(Kernel, QuadratureVersusBoundaryRandomized) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const Potential pots[] = {Potential::zero(), Potential::constant(2.0), Potential::oscillating_example()};
  for (int i = 0; i < 30; ++i) {
    const Potential& V = pots[i % 3];
    const double L = 10.0 * (U(rng) + 1.0) + 0.1;
    const cplx z(30.0 * U(rng), 3.0 * U(rng)), w(30.0 * U(rng), 3.0 * U(rng));
    const KernelEval q = kernel_quadrature(V, L, z, w);
    const KernelEval b = kernel_boundary(V, L, z, w);
    EXPECT_EQ(b.method, KernelEval::Method::BoundaryFormula);
    EXPECT_LE(std::abs(q.value - b.value), 1e-8 * std::max(1.0, std::abs(q.value))) << V.tag() << z << w << L;
  }
}

TEST(Kernel, NearDiagonalBranch) {
  const Potential V = Potential::oscillating_example();
  const double L = 5.0;
  const cplx w(2.0, -0.1);
  for (double d : {1e-4, 9e-4, 1.1e-3, 1e-2}) {
    const cplx z = std::conj(w) + cplx(d, 0.3 * d);
    const KernelEval b = kernel_boundary(V, L, z, w);
    const KernelEval q = kernel_quadrature(V, L, z, w);
    EXPECT_LE(std::abs(b.value - q.value), 1e-9 * std::abs(q.value)) << d;
  }
  // exact diagonal through the boundary route
  EXPECT_NEAR(kernel_boundary(V, L, 2.0, 2.0).value.real(), kernel_diagonal(V, L, 2.0), 1e-11);
}

TEST(Kernel, HermitianSymmetry) {
  const Potential V = Potential::oscillating_example();
  const cplx z(1.0, 2.0), w(4.0, -1.0);
  const cplx a = kernel_boundary(V, 4.0, z, w).value;
  const cplx b = kernel_boundary(V, 4.0, w, z).value;
  EXPECT_LE(std::abs(a - std::conj(b)), 1e-11 * std::abs(a));
}

TEST(Kernel, ConstantPotentialDiagonalMatchesQuadrature) {
  const Potential V = Potential::constant(2.0);
  EXPECT_NEAR(kernel_diagonal(V, 5.0, 6.0), kernel_quadrature(V, 5.0, 6.0, 6.0).value.real(), 1e-9);
}

TEST(Christoffel, FreeLimit) {
  const double L = 200.0;
  const double lambda = christoffel(Potential::zero(), L, 1.0);
  EXPECT_NEAR(L * lambda, 200.0 / (100.0 + std::sin(400.0) / 4.0), 1e-10);
  EXPECT_NEAR(L * lambda, 2.0, 0.02);
}

TEST(Christoffel, ReciprocalOfDiagonal) {
  const Potential V = Potential::oscillating_example();
  EXPECT_NEAR(christoffel(V, 9.0, 1.7) * kernel_diagonal(V, 9.0, 1.7), 1.0, 1e-12);
}

TEST(Christoffel, MonotoneInL) {
  const Potential V = Potential::oscillating_example();
  double prev = INFINITY;
  for (double L = 0.5; L < 20.0; L += 0.5) {
    const double l = christoffel(V, L, 2.5);
    EXPECT_LE(l, prev);
    prev = l;
  }
}

TEST(Christoffel, ConstantPotentialLimitIsTwo) {
  const Potential V = Potential::constant(3.0);
  const double L = 2000.0;
  EXPECT_NEAR(L * christoffel(V, L, 4.5), 2.0, 2e-3);
}

TEST(Christoffel, KernelGrowthRatio) {
  const Potential V = Potential::constant(1.5);
  const double L = 500.0, eps = 0.5;
  const double ratio = kernel_diagonal(V, (1.0 + eps) * L, 4.0) / kernel_diagonal(V, L, 4.0);
  EXPECT_NEAR(ratio, 1.0 + eps, 0.01 * (1.0 + eps));
}

TEST(Minimizer, NormalizedAndBounded) {
  const Potential V = Potential::oscillating_example();
  const double L = 8.0, xi0 = 2.0;
  EXPECT_EQ(minimizer_Q(V, L, xi0, xi0), cplx(1.0));
  const double k0 = kernel_diagonal(V, L, xi0);
  for (double xi = 0.1; xi < 10.0; xi += 0.37) {
    const cplx q = minimizer_Q(V, L, xi0, xi);
    EXPECT_LE(std::abs(q), std::sqrt(kernel_diagonal(V, L, xi) / k0) * (1.0 + 1e-10));
    EXPECT_NEAR(q.imag(), 0.0, 1e-12 * std::max(1.0, std::abs(q)));
  }
}

TEST(Extremal, U0) {
  // 20-digit root of tan(2u) = 2u.
  EXPECT_NEAR(extremal_u0(), 2.24670472895453208765, 1e-14);
  EXPECT_NEAR(2.0 * extremal_u0(), 4.493409, 1e-6);
}

TEST(Extremal, EqualsTwiceConstantKernel) {
  const double d0 = 1.0, xi0 = 4.0;
  const ExtremalFunction F = make_extremal_function(d0, xi0);
  EXPECT_NEAR(F.c, extremal_u0() / std::sqrt(3.0), 1e-15);
  const Potential V = Potential::constant(d0);
  for (cplx z : {cplx(0.0, 0.0), cplx(2.0, 1.0), cplx(4.0, 0.0), cplx(-5.0, 3.0), cplx(25.0, -2.0)}) {
    const cplx k = kernel_boundary(V, F.c, z, xi0).value;
    EXPECT_LE(std::abs(F(z) - 2.0 * k), 1e-10 * std::max(1.0, std::abs(F(z)))) << z;
  }
}

TEST(Extremal, PeakAtXi0) {
  const double d0 = -0.5, xi0 = 1.25;
  const ExtremalFunction F = make_extremal_function(d0, xi0);
  const double peak = F(xi0).real();
  for (int k = 0; k <= 1000; ++k) {
    const double xi = d0 + k / 10.0;
    EXPECT_LE(std::abs(F(xi)), peak * (1.0 + 1e-12)) << xi;
  }
  EXPECT_THROW(make_extremal_function(1.0, 1.0), DomainError);
}
