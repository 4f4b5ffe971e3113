#pragma once

// Weyl m-function m(z) = -psi(0)/psi'(0) of the L^2 solution at infinity,
// boundary spectral densities, and Floquet band data for periodic potentials.
//
// With psi = u - m v the Weyl circle at x is the set of m for which
// psi'(x)/psi(x) is real.

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include "clab/core.hpp"
#include "clab/martin.hpp"
#include "clab/potential.hpp"
#include "clab/roots.hpp"
#include "clab/schrodinger.hpp"

namespace clab {

struct WeylDisk {
  double x = 0.0;
  cplx z{};
  cplx center{};
  double radius = INFINITY;
  /// Only at x = 0, where the "disk" is the closed upper half-plane.
  bool half_plane = false;
};

inline void require_upper(cplx z, const char* who) {
  if (!(z.imag() > 0.0)) throw DomainError(std::string(who) + ": z must lie in the open upper half-plane");
}

inline WeylDisk disk_from_frame(const SolutionFrame& f) {
  WeylDisk d;
  d.x = f.x;
  d.z = f.z;
  const cplx den = f.v * std::conj(f.dv) - f.dv * std::conj(f.v);
  if (den == 0.0) {
    d.half_plane = true;
    return d;
  }
  d.center = (f.u * std::conj(f.dv) - f.du * std::conj(f.v)) / den;
  d.radius = std::abs(f.wronskian()) / std::abs(den);
  return d;
}

inline WeylDisk weyl_disk(const Potential& V, cplx z, double x, double tol = 1e-12) {
  require_upper(z, "weyl_disk");
  if (!(x >= 0.0)) throw DomainError("weyl_disk: x must be nonnegative");
  return disk_from_frame(integrate_frame(V, z, x, tol));
}

// ---------------------------------------------------------------------------
// Floquet data

/// Period used for Floquet computations; Zero and Constant count as 1-periodic.
inline double floquet_period(const Potential& V) {
  if (auto p = V.period()) return *p;
  if (auto t = V.constant_tail(); t && t->first == 0.0) return 1.0;
  throw DomainError("Floquet data need a periodic potential");
}

/// Monodromy over one period, [[v, u], [v', u']](p).
inline Mat2 monodromy(const Potential& V, cplx z, double tol = 1e-12) {
  return integrate_frame(V, z, floquet_period(V), tol).fundamental();
}

/// Delta(z) = v(p, z) + u'(p, z).
inline cplx discriminant(const Potential& V, cplx z, double tol = 1e-12) {
  const Mat2 M = monodromy(V, z, tol);
  return M.a + M.d;
}

/// Floquet multiplier with |rho| <= 1 (strictly inside for z off the spectrum).
inline cplx floquet_multiplier(cplx delta) {
  const cplx s = std::sqrt(delta * delta - 4.0);
  const cplx r1 = 0.5 * (delta + s), r2 = 0.5 * (delta - s);
  const cplx big = std::abs(r1) >= std::abs(r2) ? r1 : r2;
  return 1.0 / big;
}

// ---------------------------------------------------------------------------
// m-function

enum class MMethod { Auto, Disk, Tail, Floquet };

struct DiskSchedule {
  double x_start = 10.0;
  double x_max = 1e4;
};

/// Disk shrinking along x = 10, 20, 40, ...; returns the first centre whose
/// radius is at most tol. Throws ConvergenceError carrying the radii if x_max
/// is reached first.
inline cplx m_function_disk(const Potential& V, cplx z, double tol = 1e-8, DiskSchedule s = {}) {
  require_upper(z, "m_function");
  Propagator p(V, z, {1e-12});
  std::vector<double> radii;
  for (double x = s.x_start; x <= s.x_max * (1.0 + 1e-12); x *= 2.0) {
    p.advance_to(x);
    const WeylDisk d = disk_from_frame(p.frame());
    radii.push_back(d.radius);
    if (d.radius <= tol) return d.center;
  }
  throw ConvergenceError("m_function: Weyl disk radius did not reach tolerance (achieved " +
                             std::to_string(radii.empty() ? INFINITY : radii.back()) + ")",
                         radii);
}

/// V == d beyond X: psi is proportional to exp(i k x), k = sqrt(z - d), so
/// m = (u' - i k u) / (v' - i k v) at X.
inline cplx m_function_tail(const Potential& V, cplx z) {
  require_upper(z, "m_function");
  const auto tail = V.constant_tail();
  if (!tail) throw DomainError("m_function: potential has no constant tail");
  const SolutionFrame f = integrate_frame(V, z, tail->first, 1e-13);
  const cplx ik = cplx(0.0, 1.0) * sqrt_upper(z - tail->second);
  return (f.du - ik * f.u) / (f.dv - ik * f.v);
}

/// Periodic V: psi(x + p) = rho psi(x) with |rho| < 1, which gives
/// m = u / (v - rho) = (u' - rho) / v' at x = p.
inline cplx m_function_floquet(const Potential& V, cplx z, double tol = 1e-12) {
  require_upper(z, "m_function");
  const Mat2 M = monodromy(V, z, tol);
  const cplx rho = floquet_multiplier(M.a + M.d);
  const cplx d1 = M.a - rho, d2 = M.c;
  return std::abs(d1) >= std::abs(d2) ? M.b / d1 : (M.d - rho) / d2;
}

/// Boundary value (1/pi) Im m(xi + i0) for a constant tail d < xi, where the
/// tail formula extends continuously to the real axis.
inline double spectral_density_tail(const Potential& V, double xi) {
  const auto tail = V.constant_tail();
  if (!tail) throw DomainError("spectral_density_tail: potential has no constant tail");
  if (!(xi > tail->second)) throw DomainError("spectral_density_tail: xi must lie above the tail value");
  const SolutionFrame f = integrate_frame(V, xi, tail->first, 1e-13);
  const cplx ik(0.0, std::sqrt(xi - tail->second));
  return ((f.du - ik * f.u) / (f.dv - ik * f.v)).imag() / pi;
}

inline cplx m_function(const Potential& V, cplx z, double tol = 1e-8, MMethod method = MMethod::Auto) {
  require_upper(z, "m_function");
  switch (method) {
    case MMethod::Disk:
      return m_function_disk(V, z, tol);
    case MMethod::Tail:
      return m_function_tail(V, z);
    case MMethod::Floquet:
      return m_function_floquet(V, z);
    case MMethod::Auto:
      break;
  }
  if (V.constant_tail()) return m_function_tail(V, z);
  if (V.period()) return m_function_floquet(V, z);
  return m_function_disk(V, z, tol);
}

// ---------------------------------------------------------------------------
// Spectral density

struct SpectralDensity {
  double xi = 0.0;
  double f_mu = 0.0;
  double extrapolation_residual = 0.0;
  /// Ladder values not monotone in epsilon.
  bool flagged = false;
  std::vector<double> ladder;
};

inline const std::vector<double>& default_eps_ladder() {
  static const std::vector<double> l{1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
  return l;
}

/// Band edges within `radius` of xi, from the constant tail or the discriminant.
inline bool near_band_edge(const Potential& V, double xi, double radius) {
  if (auto t = V.constant_tail()) return std::abs(xi - t->second) < radius;
  if (V.period()) {
    auto f = [&](double s) {
      const double d = discriminant(V, s).real();
      return d * d - 4.0;
    };
    const int n = 8;
    double prev = f(xi - radius);
    for (int i = 1; i <= n; ++i) {
      const double cur = f(xi - radius + 2.0 * radius * i / n);
      if ((prev > 0.0) != (cur > 0.0)) return true;
      prev = cur;
    }
  }
  return false;
}

/// (1/pi) Im m(xi + i eps) over a decreasing ladder, extrapolated to eps = 0
/// from the last two rungs (linear error model). The residual is the change
/// between that estimate and the one from the preceding pair.
inline SpectralDensity spectral_density(const Potential& V, double xi,
                                        const std::vector<double>& eps_ladder = default_eps_ladder(),
                                        MMethod method = MMethod::Auto, double edge_exclusion = 1e-3) {
  if (eps_ladder.size() < 2) throw DomainError("spectral_density: need at least two ladder rungs");
  for (std::size_t i = 0; i < eps_ladder.size(); ++i) {
    if (!(eps_ladder[i] > 0.0)) throw DomainError("spectral_density: ladder must be positive");
    if (i > 0 && !(eps_ladder[i] < eps_ladder[i - 1])) throw DomainError("spectral_density: ladder must decrease");
  }
  if (near_band_edge(V, xi, edge_exclusion)) throw DomainError("spectral_density: xi too close to a band edge");

  SpectralDensity out;
  out.xi = xi;
  for (double e : eps_ladder) out.ladder.push_back(m_function(V, cplx(xi, e), 1e-10, method).imag() / pi);
  const std::size_t n = out.ladder.size();
  auto extrap = [&](std::size_t i) {
    const double e0 = eps_ladder[i - 1], e1 = eps_ladder[i];
    return (e0 * out.ladder[i] - e1 * out.ladder[i - 1]) / (e0 - e1);
  };
  out.f_mu = extrap(n - 1);
  out.extrapolation_residual = n >= 3 ? std::abs(out.f_mu - extrap(n - 2)) : std::abs(out.ladder[n - 1] - out.ladder[n - 2]);
  for (std::size_t i = 2; i < n; ++i) {
    const double d0 = out.ladder[i - 1] - out.ladder[i - 2], d1 = out.ladder[i] - out.ladder[i - 1];
    if (d0 * d1 < 0.0) out.flagged = true;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Bands

struct FloquetBands {
  FiniteGapSet set;
  /// The window lacks the bottom edge or ends inside a gap.
  bool incomplete = false;
  /// All edges found in the window, ascending.
  std::vector<double> edges;
};

/// Bands {|Delta| <= 2} located by sign changes of Delta^2 - 4 on a scan
/// whose step follows the local oscillation of Delta, refined by bisection.
/// The first n_gaps gaps are kept and the rest closed.
inline FloquetBands floquet_bands(const Potential& V, double lo, double hi, int n_gaps) {
  if (!(hi > lo)) throw DomainError("floquet_bands: empty window");
  if (n_gaps < 0) throw DomainError("floquet_bands: n_gaps must be nonnegative");
  const double p = floquet_period(V);
  auto f = [&](double xi) {
    const double d = discriminant(V, xi, 1e-13).real();
    return d * d - 4.0;
  };
  FloquetBands out;
  double x = lo;
  double fx = f(x);
  const bool start_in_gap = fx > 0.0;
  while (x < hi) {
    const double step = std::min(0.01, 0.05 / (p * std::max(1.0, std::sqrt(std::abs(x)))));
    const double nx = std::min(hi, x + step);
    const double fn = f(nx);
    if ((fx > 0.0) != (fn > 0.0)) {
      const double e = roots::bisect(f, x, nx, 1e-14 * std::max(1.0, std::abs(x))).x;
      out.edges.push_back(e);
    }
    x = nx;
    fx = fn;
  }
  const bool end_in_gap = fx > 0.0;
  out.incomplete = !start_in_gap || end_in_gap;
  if (out.edges.empty()) {
    out.incomplete = true;
    out.set.b0 = lo;
    return out;
  }
  out.set.b0 = start_in_gap ? out.edges[0] : lo;
  // After b0 the edges alternate gap start, gap end.
  for (std::size_t i = start_in_gap ? 1 : 0; i + 1 < out.edges.size() && static_cast<int>(out.set.gaps.size()) < n_gaps; i += 2)
    out.set.gaps.emplace_back(out.edges[i], out.edges[i + 1]);
  return out;
}

}  // namespace clab
