#pragma once

// Christoffel-Darboux kernel K_L(z, w) = int_0^L v(x, z) conj(v(x, w)) dx of
// the Neumann solution, the Christoffel function and the normalized minimizer,
// plus the closed-form extremal function for constant potentials.

#include <cmath>
#include <complex>

#include "clab/core.hpp"
#include "clab/potential.hpp"
#include "clab/quadrature.hpp"
#include "clab/roots.hpp"
#include "clab/schrodinger.hpp"

namespace clab {

struct KernelEval {
  enum class Method { Quadrature, BoundaryFormula };

  double L = 0.0;
  cplx z{}, w{};
  cplx value{};
  Method method = Method::Quadrature;
  double err_estimate = 0.0;
};

/// Below this distance |conj(w) - z| the boundary quotient is replaced by an
/// integral of its numerator's derivative.
inline constexpr double near_diagonal_threshold = 1e-3;

inline KernelEval kernel_quadrature(const Potential& V, double L, cplx z, cplx w, double tol = 1e-12) {
  if (!(L > 0.0)) throw DomainError("kernel_quadrature: L must be positive");
  const GramResult g = solution_gram(V, z, w, 0.0, L, tol);
  return {L, z, w, g.G.a, KernelEval::Method::Quadrature, g.error};
}

/// (conj v(L,w) v'(L,z) - conj v'(L,w) v(L,z)) / (conj w - z).
///
/// Writing N(s) for the numerator with s in place of z, N(conj w) = 0, so
///   K = -int_0^1 N'(conj w + t (z - conj w)) dt,
/// which is what gets evaluated (10-point Gauss) when z is close to conj w.
inline KernelEval kernel_boundary(const Potential& V, double L, cplx z, cplx w, double tol = 1e-12) {
  if (!(L > 0.0)) throw DomainError("kernel_boundary: L must be positive");
  const SolutionFrame fw = integrate_frame(V, w, L, tol);
  const cplx vw = std::conj(fw.v), dvw = std::conj(fw.dv);
  const cplx delta = z - std::conj(w);
  KernelEval out{L, z, w, 0.0, KernelEval::Method::BoundaryFormula, 0.0};
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (std::abs(delta) >= near_diagonal_threshold) {
    const SolutionFrame fz = integrate_frame(V, z, L, tol);
    const cplx a = vw * fz.dv, b = dvw * fz.v;
    out.value = (a - b) / (-delta);
    out.err_estimate = (tol + eps) * (std::abs(a) + std::abs(b)) / std::abs(delta);
    return out;
  }
  const quad::Rule& rule = quad::gauss_legendre(10);
  cplx acc = 0.0;
  double mag = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double t = 0.5 * (rule.nodes[i] + 1.0);
    const FrameWithDerivative f = integrate_frame_derivative(V, std::conj(w) + t * delta, L, tol);
    const cplx dn = vw * f.dz.dv - dvw * f.dz.v;
    acc += 0.5 * rule.weights[i] * dn;
    mag += 0.5 * rule.weights[i] * std::abs(dn);
  }
  out.value = -acc;
  out.err_estimate = (tol + eps) * mag;
  return out;
}

/// K_L(xi, xi) = v' dv/dxi - v dv'/dxi at x = L, with the xi-derivatives from
/// the variational system.
inline double kernel_diagonal(const Potential& V, double L, double xi, double tol = 1e-12) {
  if (!(L > 0.0)) throw DomainError("kernel_diagonal: L must be positive");
  const FrameWithDerivative f = integrate_frame_derivative(V, xi, L, tol);
  return (f.frame.dv * f.dz.v - f.frame.v * f.dz.dv).real();
}

/// lambda_L(xi) = 1 / int_0^L |v(x, xi)|^2 dx.
inline double christoffel(const Potential& V, double L, double xi, double tol = 1e-12) {
  return 1.0 / kernel_diagonal(V, L, xi, tol);
}

/// Q_L(z, xi0) = K_L(z, xi0) / K_L(xi0, xi0); exactly 1 at z = xi0.
inline cplx minimizer_Q(const Potential& V, double L, double xi0, cplx z, double tol = 1e-12) {
  if (z == cplx(xi0)) return 1.0;
  return kernel_boundary(V, L, z, xi0, tol).value / kernel_diagonal(V, L, xi0, tol);
}

// ---------------------------------------------------------------------------
// Extremal function

/// First positive root of tan(2u) = 2u, bracketed in (pi/2, 3pi/4) where
/// sin(2u) - 2u cos(2u) changes sign. Computed once.
inline double extremal_u0() {
  static const double u0 = roots::bisect([](double u) { return std::sin(2.0 * u) - 2.0 * u * std::cos(2.0 * u); },
                                         0.5 * pi, 0.75 * pi, 1e-15)
                               .x;
  return u0;
}

struct ExtremalFunction {
  double d0 = 0.0;
  double xi0 = 1.0;
  double c = 0.0;
  double u0 = 0.0;

  /// sin(c(zeta - zeta0))/(zeta - zeta0) + sin(c(zeta + zeta0))/(zeta + zeta0),
  /// zeta = sqrt(z - d0), zeta0 = sqrt(xi0 - d0). Even in zeta, hence entire in z.
  cplx operator()(cplx z) const {
    const cplx zeta = sqrt_upper(z - d0);
    const double zeta0 = std::sqrt(xi0 - d0);
    return sin_over(zeta - zeta0) + sin_over(zeta + zeta0);
  }

 private:
  // sin(c a)/a with the removable point a = 0.
  cplx sin_over(cplx a) const {
    const cplx t = c * a;
    if (std::abs(t) < 1e-4) return c * (1.0 - t * t / 6.0 + t * t * t * t / 120.0);
    return std::sin(t) / a;
  }
};

inline ExtremalFunction make_extremal_function(double d0, double xi0) {
  if (!(xi0 > d0)) throw DomainError("extremal_function: need xi0 > d0");
  const double u0 = extremal_u0();
  return {d0, xi0, u0 / std::sqrt(xi0 - d0), u0};
}

inline cplx extremal_function(double d0, double xi0, cplx z) { return make_extremal_function(d0, xi0)(z); }

}  // namespace clab
