#pragma once

// Finite-L experiments: Neumann truncation spectra by Prufer-angle counting,
// clock spacing, kernel universality grids, Christoffel sweeps and the
// eigenvalue counting measure against the Martin measure.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "clab/cd_kernel.hpp"
#include "clab/core.hpp"
#include "clab/martin.hpp"
#include "clab/ode.hpp"
#include "clab/parallel.hpp"
#include "clab/potential.hpp"
#include "clab/roots.hpp"
#include "clab/schrodinger.hpp"

namespace clab {

using DensityOracle = std::function<double(double)>;

// ---------------------------------------------------------------------------
// Prufer angle

namespace detail {

// d - 2 pi round(d / 2 pi), in [-pi, pi].
inline double wrap_angle(double d) { return d - 2.0 * pi * std::round(d / (2.0 * pi)); }

inline double prufer_cell(double theta, double q, double h) {
  if (q > 0.0) {
    // y = rho sin(psi), y'/k = rho cos(psi): psi advances by k h, and psi, theta share quadrants.
    const double k = std::sqrt(q);
    const double psi0 = theta + wrap_angle(std::atan2(k * std::sin(theta), std::cos(theta)) - theta);
    const double psi1 = psi0 + k * h;
    return psi1 + wrap_angle(std::atan2(std::sin(psi1), k * std::cos(psi1)) - psi1);
  }
  // No oscillation: the angle moves by less than pi, so the principal
  // difference is the lifted one. Sub-steps keep cosh finite.
  const double kappa = std::sqrt(-q);
  const int n = std::max(1, static_cast<int>(std::ceil(kappa * h / 20.0)));
  const double hs = h / n;
  const CellFunctions f = cell_functions(q, hs);
  const double C = f.C.real(), S = f.S.real();
  for (int i = 0; i < n; ++i) {
    const double y = std::sin(theta), dy = std::cos(theta);
    const double y1 = C * y + S * dy, dy1 = -q * S * y + C * dy;
    theta += wrap_angle(std::atan2(y1, dy1) - theta);
  }
  return theta;
}

}  // namespace detail

/// Lifted Prufer angle theta(L, xi) of the Neumann solution, v = r sin(theta),
/// v' = r cos(theta), theta(0) = pi/2. Increasing in xi for L > 0.
inline double prufer_angle(const Potential& V, double L, double xi, double tol = 1e-12) {
  double theta = 0.5 * pi;
  if (V.piecewise_constant()) {
    V.for_each_cell(0.0, L, [&](double a, double b, double value) { theta = detail::prufer_cell(theta, xi - value, b - a); });
    return theta;
  }
  const PeriodicPotential& per = *V.periodic();
  ode::State<1> y{cplx(theta)};
  auto rhs = [&](double x, const ode::State<1>& s) {
    const double t = s[0].real();
    const double c = std::cos(t), si = std::sin(t);
    return ode::State<1>{cplx(c * c + (xi - detail::trig_value(per, x)) * si * si)};
  };
  ode::Options o;
  o.rel_tol = tol;
  o.abs_tol = tol;
  o.max_step = std::min(0.25, per.period / 8.0);
  ode::integrate<1>(rhs, 0.0, L, y, o);
  return y[0].real();
}

// ---------------------------------------------------------------------------
// Truncation spectrum

struct SpectrumSlice {
  double L = 0.0;
  double lo = 0.0, hi = 0.0;
  /// Zeros of v'(L, .) in [lo, hi], increasing.
  std::vector<double> eigenvalues;
  /// 1 / int_0^L v(x, xi_j)^2 dx.
  std::vector<double> weights;
  /// Zeros of v(L, .) in [lo, hi].
  std::vector<double> v_zeros;
  bool interlacing_ok = true;
  bool phase_monotone = true;

  std::vector<double> spacings() const {
    std::vector<double> s;
    for (std::size_t i = 1; i < eigenvalues.size(); ++i) s.push_back(eigenvalues[i] - eigenvalues[i - 1]);
    return s;
  }
  double mean_spacing() const {
    return eigenvalues.size() < 2 ? 0.0 : (eigenvalues.back() - eigenvalues.front()) / (eigenvalues.size() - 1);
  }
};

namespace detail {

// All xi in [lo, hi] with theta(xi) = offset + n pi.
inline std::vector<double> prufer_crossings(const std::function<double(double)>& theta, double lo, double hi,
                                            double th_lo, double th_hi, double offset) {
  std::vector<double> out;
  const long n0 = static_cast<long>(std::ceil((th_lo - offset) / pi));
  const long n1 = static_cast<long>(std::floor((th_hi - offset) / pi));
  double a = lo;
  for (long n = n0; n <= n1; ++n) {
    const double target = offset + n * pi;
    auto f = [&](double xi) { return theta(xi) - target; };
    const double x = (a == lo && th_lo >= target) ? lo : roots::brent(f, a, hi, 1e-13 * (1.0 + std::abs(hi))).x;
    out.push_back(x);
    a = x;
  }
  return out;
}

}  // namespace detail

inline SpectrumSlice truncation_spectrum(const Potential& V, double L, double lo, double hi, bool with_weights = true) {
  if (!(L > 0.0)) throw DomainError("truncation_spectrum: L must be positive");
  if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) throw DomainError("truncation_spectrum: bad window");
  SpectrumSlice s;
  s.L = L;
  s.lo = lo;
  s.hi = hi;
  auto theta = [&](double xi) { return prufer_angle(V, L, xi); };
  const double th_lo = theta(lo), th_hi = theta(hi);

  // Coarse monotonicity audit of the phase.
  {
    double prev = th_lo;
    for (int i = 1; i <= 32; ++i) {
      const double t = theta(lo + (hi - lo) * i / 32.0);
      if (t < prev - 1e-9) s.phase_monotone = false;
      prev = t;
    }
  }

  s.eigenvalues = detail::prufer_crossings(theta, lo, hi, th_lo, th_hi, 0.5 * pi);
  s.v_zeros = detail::prufer_crossings(theta, lo, hi, th_lo, th_hi, 0.0);
  if (with_weights)
    for (double xi : s.eigenvalues) s.weights.push_back(1.0 / kernel_diagonal(V, L, xi));

  // Interlacing by sign changes of v(L, .) evaluated directly.
  for (std::size_t i = 1; i < s.eigenvalues.size(); ++i) {
    const double a = s.eigenvalues[i - 1], b = s.eigenvalues[i];
    const double va = integrate_frame(V, a, L).v.real(), vb = integrate_frame(V, b, L).v.real();
    const auto between = std::count_if(s.v_zeros.begin(), s.v_zeros.end(), [&](double z) { return z > a && z < b; });
    if (!(va * vb < 0.0) || between != 1) s.interlacing_ok = false;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Clock spacing

struct ClockSpacing {
  double xi = 0.0;
  double L = 0.0;
  std::vector<int> j;
  /// xi_j and xi_{j+1}
  std::vector<double> left, right;
  /// L f_E(xi_j) (xi_{j+1} - xi_j)
  std::vector<double> values;
  bool interlacing_ok = true;
};

/// Eigenvalues are indexed from xi: ... < xi_{-1} < xi <= xi_0 < xi_1 < ...
/// The density is taken at the left eigenvalue of each pair.
inline ClockSpacing clock_spacing_check(const Potential& V, double L, double xi, int j_lo, int j_hi,
                                        const DensityOracle& f_E) {
  if (j_hi < j_lo) throw DomainError("clock_spacing_check: empty index range");
  const double s = 1.0 / (L * f_E(xi));
  double below = (std::max(0, -j_lo) + 2) * 1.5 * s;
  double above = (std::max(0, j_hi) + 3) * 1.5 * s;
  for (int attempt = 0; attempt < 12; ++attempt, below *= 2.0, above *= 2.0) {
    const SpectrumSlice slice = truncation_spectrum(V, L, xi - below, xi + above, false);
    const auto& ev = slice.eigenvalues;
    const auto it = std::lower_bound(ev.begin(), ev.end(), xi);
    const long i0 = it - ev.begin();
    if (i0 + j_lo < 0 || i0 + j_hi + 1 >= static_cast<long>(ev.size())) continue;
    ClockSpacing out;
    out.xi = xi;
    out.L = L;
    out.interlacing_ok = slice.interlacing_ok;
    for (int j = j_lo; j <= j_hi; ++j) {
      const double a = ev[i0 + j], b = ev[i0 + j + 1];
      out.j.push_back(j);
      out.left.push_back(a);
      out.right.push_back(b);
      out.values.push_back(L * f_E(a) * (b - a));
    }
    return out;
  }
  throw DomainError("clock_spacing_check: window underflow; requested indices not available around xi");
}

// ---------------------------------------------------------------------------
// Universality

struct UniversalityGrid {
  double xi = 0.0;
  double L = 0.0;
  double f_E = 0.0;
  std::vector<cplx> z_grid, w_grid;
  std::vector<std::vector<cplx>> ratio;     // [i][j] for (z_i, w_j)
  std::vector<std::vector<cplx>> sinc_ref;
  double sup_deviation = 0.0;
  double hermitian_defect = 0.0;
};

inline cplx sinc_kernel(double f_E, cplx z, cplx w) {
  const cplx a = pi * f_E * (z - std::conj(w));
  if (std::abs(a) < 1e-8) return 1.0 - a * a / 6.0;
  return std::sin(a) / a;
}

/// Symmetric real grid of n points on [-halfwidth, halfwidth]; 0 is a node for odd n.
inline std::vector<cplx> symmetric_grid(double halfwidth, int n) {
  std::vector<cplx> g;
  for (int i = 0; i < n; ++i) g.emplace_back(halfwidth * (2.0 * i - (n - 1)) / (n - 1));
  return g;
}

/// K_L(xi + z/L, xi + w/L) / K_L(xi, xi) on a grid, against the sinc kernel.
inline UniversalityGrid universality_grid(const Potential& V, double L, double xi, double halfwidth, int n,
                                          double f_E, unsigned threads = 1) {
  if (n < 3) throw DomainError("universality_grid: need n >= 3");
  if (!(halfwidth > 0.0) || !(L > 0.0)) throw DomainError("universality_grid: halfwidth and L must be positive");
  UniversalityGrid g;
  g.xi = xi;
  g.L = L;
  g.f_E = f_E;
  g.z_grid = symmetric_grid(halfwidth, n);
  g.w_grid = g.z_grid;
  const double k0 = kernel_diagonal(V, L, xi);
  g.ratio = parallel_map(
      static_cast<std::size_t>(n),
      [&](std::size_t i) {
        std::vector<cplx> row(n);
        for (int j = 0; j < n; ++j) {
          const cplx z = xi + g.z_grid[i] / L, w = xi + g.w_grid[j] / L;
          if (g.z_grid[i] == g.w_grid[j] && g.z_grid[i].imag() == 0.0) {
            row[j] = kernel_diagonal(V, L, z.real()) / k0;
          } else {
            row[j] = kernel_boundary(V, L, z, w).value / k0;
          }
        }
        return row;
      },
      threads);
  g.sinc_ref.assign(n, std::vector<cplx>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      g.sinc_ref[i][j] = sinc_kernel(f_E, g.z_grid[i], g.w_grid[j]);
      g.sup_deviation = std::max(g.sup_deviation, std::abs(g.ratio[i][j] - g.sinc_ref[i][j]));
      g.hermitian_defect = std::max(g.hermitian_defect, std::abs(g.ratio[i][j] - std::conj(g.ratio[j][i])));
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Christoffel sweep

struct ChristoffelRow {
  double xi, L, L_lambda, reference, deviation;
};

struct ChristoffelSweep {
  std::vector<ChristoffelRow> rows;
  /// sup over the xi grid of |L lambda_L - reference|, one entry per L.
  std::vector<double> sup_deviation;
};

inline ChristoffelSweep christoffel_sweep(const Potential& V, const std::vector<double>& xi_grid,
                                          const std::vector<double>& L_ladder, const DensityOracle& f_mu,
                                          const DensityOracle& f_E, unsigned threads = 1) {
  if (xi_grid.empty() || L_ladder.empty()) throw DomainError("christoffel_sweep: empty grid");
  for (std::size_t i = 1; i < L_ladder.size(); ++i)
    if (!(L_ladder[i] > L_ladder[i - 1])) throw DomainError("christoffel_sweep: L ladder must increase");
  std::vector<double> refs;
  for (double xi : xi_grid) refs.push_back(f_mu(xi) / f_E(xi));
  const std::size_t nx = xi_grid.size();
  ChristoffelSweep out;
  out.rows = parallel_map(
      nx * L_ladder.size(),
      [&](std::size_t k) {
        const double L = L_ladder[k / nx], xi = xi_grid[k % nx];
        const double v = L * christoffel(V, L, xi);
        return ChristoffelRow{xi, L, v, refs[k % nx], std::abs(v - refs[k % nx])};
      },
      threads);
  out.sup_deviation.assign(L_ladder.size(), 0.0);
  for (std::size_t k = 0; k < out.rows.size(); ++k)
    out.sup_deviation[k / nx] = std::max(out.sup_deviation[k / nx], out.rows[k].deviation);
  return out;
}

// ---------------------------------------------------------------------------
// Counting measure

struct CountingRow {
  double bin_lo, bin_hi, nu_L, rho_E;
};

struct CountingTable {
  std::vector<CountingRow> rows;
  double total_variation = 0.0;
};

/// nu_L(bin) = #{eigenvalues in bin} / L against rho_E(bin); bins are
/// [e_k, e_{k+1}) with the last one closed.
inline CountingTable counting_measure_compare(const SpectrumSlice& slice, const FiniteGapSet& set,
                                              const std::vector<double>& bin_edges) {
  if (bin_edges.size() < 2) throw DomainError("counting_measure_compare: need at least one bin");
  for (std::size_t i = 1; i < bin_edges.size(); ++i)
    if (!(bin_edges[i] > bin_edges[i - 1])) throw DomainError("counting_measure_compare: bin edges must increase");
  if (bin_edges.front() < slice.lo || bin_edges.back() > slice.hi)
    throw DomainError("counting_measure_compare: bins extend past the spectrum window");
  CountingTable t;
  for (std::size_t i = 0; i + 1 < bin_edges.size(); ++i) {
    const double a = bin_edges[i], b = bin_edges[i + 1];
    const bool last = i + 2 == bin_edges.size();
    const auto count = std::count_if(slice.eigenvalues.begin(), slice.eigenvalues.end(),
                                     [&](double e) { return e >= a && (last ? e <= b : e < b); });
    const CountingRow r{a, b, static_cast<double>(count) / slice.L, martin_measure(set, a, b)};
    t.total_variation += std::abs(r.nu_L - r.rho_E);
    t.rows.push_back(r);
  }
  return t;
}

}  // namespace clab
