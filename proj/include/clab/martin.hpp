#pragma once

// Finite-gap sets E = [b0, inf) \ U (a_j, b_j), their comb map
//   tau(z) = int_{b0}^z R(u) du,   R = prod_j (u - c_j) / (2 sqrt(u - b0) prod_j sqrt(u - a_j) sqrt(u - b_j)),
// the Martin function M = Im tau and the density f_E = R / pi on bands.
//
// All square roots take the branch with Im >= 0, which on the real axis is
// the boundary value from the upper half-plane. With that choice R > 0 on the
// bands and R is purely imaginary on the gaps.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "clab/core.hpp"
#include "clab/quadrature.hpp"
#include "clab/roots.hpp"

namespace clab {

struct FiniteGapSet {
  double b0 = 0.0;
  std::vector<std::pair<double, double>> gaps;  // (a_j, b_j)
  std::vector<double> c;                         // one per gap once solved

  int genus() const { return static_cast<int>(gaps.size()); }
  bool solved() const { return c.size() == gaps.size(); }

  /// Throws DomainError naming the first pair that breaks b0 < a_1 < b_1 < a_2 < ...
  void validate() const {
    if (!std::isfinite(b0)) throw DomainError("finite-gap set: b0 must be finite");
    double prev = b0;
    std::string prev_name = "b0";
    for (std::size_t j = 0; j < gaps.size(); ++j) {
      const auto [a, b] = gaps[j];
      const std::string name = "gap " + std::to_string(j + 1) + " (" + std::to_string(a) + ", " + std::to_string(b) + ")";
      if (!(a > prev)) throw DomainError("finite-gap set: " + name + " does not start after " + prev_name);
      if (!(b > a)) throw DomainError("finite-gap set: " + name + " is empty or reversed");
      prev = b;
      prev_name = name;
    }
    if (!c.empty() && c.size() != gaps.size()) throw DomainError("finite-gap set: need one critical point per gap");
    for (std::size_t j = 0; j < c.size(); ++j)
      if (!(c[j] > gaps[j].first && c[j] < gaps[j].second))
        throw DomainError("finite-gap set: critical point " + std::to_string(j + 1) + " outside its gap");
  }

  /// Sorted band edges b0, a_1, b_1, ..., a_g, b_g.
  std::vector<double> edges() const {
    std::vector<double> e{b0};
    for (const auto& [a, b] : gaps) {
      e.push_back(a);
      e.push_back(b);
    }
    return e;
  }

  /// True for xi strictly inside a band.
  bool in_band_interior(double xi) const {
    if (!(xi > b0)) return false;
    for (const auto& [a, b] : gaps)
      if (xi >= a && xi <= b) return false;
    return true;
  }

  bool contains(double xi) const {
    if (xi < b0) return false;
    for (const auto& [a, b] : gaps)
      if (xi > a && xi < b) return false;
    return true;
  }
};

namespace detail {

/// R(u) with one edge factor optionally left out, so that substitutions can
/// cancel it analytically.
struct CombIntegrand {
  std::vector<double> edges;
  std::vector<double> c;

  // R(u) * sqrt(u - edges[skip]) (skip < 0: plain R).
  cplx operator()(cplx u, int skip = -1) const { return eval(u, skip, -1); }

  // d/dc_k of the same quantity.
  cplx dc(cplx u, int k, int skip = -1) const { return -eval(u, skip, k); }

  cplx eval(cplx u, int skip, int drop_c) const {
    // Pair each c_j with its two gap edges to keep magnitudes moderate.
    cplx r = 0.5;
    if (skip != 0) r /= sqrt_upper(u - edges[0]);
    for (std::size_t j = 0; j < c.size(); ++j) {
      if (static_cast<int>(j) != drop_c) r *= (u - c[j]);
      const int ia = static_cast<int>(2 * j + 1), ib = ia + 1;
      if (skip != ia) r /= sqrt_upper(u - edges[ia]);
      if (skip != ib) r /= sqrt_upper(u - edges[ib]);
    }
    return r;
  }
};

inline constexpr double comb_rel_tol = 1e-13;

/// int_p^q G(u) du for a real interval with no edge strictly inside, where G
/// has inverse square-root singularities at edges. `g(u, skip)` must return
/// G(u) sqrt(u - edges[skip]). The interval is split at its midpoint and
/// u = edge + t^2 (left) or u = edge - t^2 (right) is used toward the nearest
/// edges on either side.
template <class G>
cplx integrate_edge_free(const G& g, const std::vector<double>& edges, double p, double q) {
  if (q == p) return 0.0;
  if (q < p) return -integrate_edge_free(g, edges, q, p);
  int il = -1, ir = -1;
  for (int k = 0; k < static_cast<int>(edges.size()); ++k) {
    if (edges[k] <= p) il = k;
    if (edges[k] >= q && ir < 0) ir = k;
  }
  auto left_sub = [&](double lo, double hi) {
    const double e = edges[il];
    auto f = [&](double t) { return 2.0 * g(cplx(e + t * t), il); };
    const double t0 = std::sqrt(std::max(0.0, lo - e)), t1 = std::sqrt(std::max(0.0, hi - e));
    return quad::adaptive(f, t0, t1, comb_rel_tol, 0.0, 2).value;
  };
  auto right_sub = [&](double lo, double hi) {
    const double e = edges[ir];
    auto f = [&](double t) { return cplx(0.0, -2.0) * g(cplx(e - t * t), ir); };
    const double t0 = std::sqrt(std::max(0.0, e - hi)), t1 = std::sqrt(std::max(0.0, e - lo));
    return quad::adaptive(f, t0, t1, comb_rel_tol, 0.0, 2).value;
  };
  if (il < 0) return right_sub(p, q);
  if (ir < 0) return left_sub(p, q);
  const double m = 0.5 * (p + q);
  return left_sub(p, m) + right_sub(m, q);
}

/// int_p^q along the real axis, splitting at every edge in between.
template <class G>
cplx integrate_real_path(const G& g, const std::vector<double>& edges, double p, double q) {
  if (q < p) return -integrate_real_path(g, edges, q, p);
  cplx sum = 0.0;
  double x = p;
  for (double e : edges) {
    if (e > x && e < q) {
      sum += integrate_edge_free(g, edges, x, e);
      x = e;
    }
  }
  sum += integrate_edge_free(g, edges, x, q);
  return sum;
}

inline CombIntegrand integrand_of(const FiniteGapSet& set) { return {set.edges(), set.c}; }

inline void require_solved(const FiniteGapSet& set, const char* who) {
  if (!set.solved()) throw DomainError(std::string(who) + ": critical points not solved");
}

}  // namespace detail

/// tau(a_j) - tau(b_j) reduced to the real residual of each gap condition.
inline std::vector<double> gap_residuals(const FiniteGapSet& set) {
  detail::require_solved(set, "gap_residuals");
  const detail::CombIntegrand R = detail::integrand_of(set);
  std::vector<double> out;
  for (const auto& [a, b] : set.gaps) out.push_back(std::abs(detail::integrate_edge_free(R, R.edges, a, b)));
  return out;
}

/// Solves the g gap conditions int_{a_j}^{b_j} R = 0 for the c_j.
/// Damped Newton first; if that stalls, Gauss-Seidel sweeps of 1-D Brent
/// solves (each condition is strictly monotone in its own c_j).
/// Throws ConvergenceError with the residual vector when neither reaches tol.
inline FiniteGapSet solve_critical_points(FiniteGapSet set, double tol = 1e-12) {
  set.c.clear();
  set.validate();
  const int g = set.genus();
  if (g == 0) return set;

  detail::CombIntegrand R{set.edges(), {}};
  for (const auto& [a, b] : set.gaps) R.c.push_back(0.5 * (a + b));

  // Gap integrals are i * real; work with the imaginary parts.
  auto residual = [&](const detail::CombIntegrand& f) {
    std::vector<double> r(g);
    for (int j = 0; j < g; ++j)
      r[j] = detail::integrate_edge_free(f, f.edges, set.gaps[j].first, set.gaps[j].second).imag();
    return r;
  };
  auto norm = [](const std::vector<double>& r) {
    double s = 0.0;
    for (double x : r) s = std::max(s, std::abs(x));
    return s;
  };
  auto inside = [&](int j, double x) {
    const auto [a, b] = set.gaps[j];
    const double margin = 1e-12 * (b - a);
    return std::clamp(x, a + margin, b - margin);
  };

  std::vector<double> r = residual(R);
  for (int it = 0; it < 60 && norm(r) > tol; ++it) {
    // Jacobian J[j][k] = d r_j / d c_k.
    std::vector<std::vector<double>> J(g, std::vector<double>(g));
    for (int k = 0; k < g; ++k) {
      auto dk = [&](cplx u, int skip) { return R.dc(u, k, skip); };
      for (int j = 0; j < g; ++j)
        J[j][k] = detail::integrate_edge_free(dk, R.edges, set.gaps[j].first, set.gaps[j].second).imag();
    }
    // Gaussian elimination with partial pivoting on J dx = -r.
    std::vector<double> rhs(g);
    for (int j = 0; j < g; ++j) rhs[j] = -r[j];
    bool singular = false;
    for (int col = 0; col < g; ++col) {
      int piv = col;
      for (int row = col + 1; row < g; ++row)
        if (std::abs(J[row][col]) > std::abs(J[piv][col])) piv = row;
      if (J[piv][col] == 0.0) {
        singular = true;
        break;
      }
      std::swap(J[piv], J[col]);
      std::swap(rhs[piv], rhs[col]);
      for (int row = col + 1; row < g; ++row) {
        const double f = J[row][col] / J[col][col];
        for (int k = col; k < g; ++k) J[row][k] -= f * J[col][k];
        rhs[row] -= f * rhs[col];
      }
    }
    if (singular) break;
    std::vector<double> dx(g);
    for (int row = g - 1; row >= 0; --row) {
      double s = rhs[row];
      for (int k = row + 1; k < g; ++k) s -= J[row][k] * dx[k];
      dx[row] = s / J[row][row];
    }
    double damp = 1.0;
    bool improved = false;
    for (int bt = 0; bt < 30; ++bt, damp *= 0.5) {
      detail::CombIntegrand trial = R;
      for (int j = 0; j < g; ++j) trial.c[j] = inside(j, R.c[j] + damp * dx[j]);
      const std::vector<double> rt = residual(trial);
      if (norm(rt) < norm(r)) {
        R = trial;
        r = rt;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }

  for (int sweep = 0; sweep < 200 && norm(r) > tol; ++sweep) {
    for (int j = 0; j < g; ++j) {
      auto fj = [&](double cj) {
        detail::CombIntegrand trial = R;
        trial.c[j] = cj;
        return detail::integrate_edge_free(trial, trial.edges, set.gaps[j].first, set.gaps[j].second).imag();
      };
      const auto [a, b] = set.gaps[j];
      R.c[j] = roots::brent(fj, a, b, 1e-15 * std::max(1.0, std::abs(b))).x;
    }
    r = residual(R);
  }

  if (norm(r) > tol) throw ConvergenceError("solve_critical_points: gap conditions not met", r);
  set.c = R.c;
  return set;
}

/// tau_E(z). Path: along the real axis from b0 to Re z (boundary values from
/// the upper half-plane), then vertically to z with s = t^2 to absorb an edge
/// at the foot. For Im z < 0 the reflection conj(tau(conj z)) is returned.
inline cplx comb_map(const FiniteGapSet& set, cplx z) {
  detail::require_solved(set, "comb_map");
  if (z.imag() < 0.0) return std::conj(comb_map(set, std::conj(z)));
  const detail::CombIntegrand R = detail::integrand_of(set);
  const double x = z.real();
  cplx tau = detail::integrate_real_path(R, R.edges, set.b0, x);
  if (z.imag() > 0.0) {
    auto f = [&](double t) { return cplx(0.0, 2.0 * t) * R(cplx(x, t * t)); };
    const double top = std::sqrt(z.imag());
    tau += quad::adaptive(f, 0.0, top, detail::comb_rel_tol, 0.0, 4).value;
  }
  return tau;
}

/// f_E(xi) = tau'(xi) / pi, positive on open bands.
inline double martin_density(const FiniteGapSet& set, double xi) {
  detail::require_solved(set, "martin_density");
  if (!set.in_band_interior(xi)) throw DomainError("martin_density: xi is not inside a band");
  const double f = detail::integrand_of(set)(cplx(xi)).real() / pi;
  if (!(f > 0.0)) throw Error("martin_density: nonpositive density (critical points inconsistent with the set)");
  return f;
}

/// M_E(z) = Im tau(z), symmetric under conjugation and zero on E.
inline double martin_function(const FiniteGapSet& set, cplx z) {
  detail::require_solved(set, "martin_function");
  if (z.imag() == 0.0 && set.contains(z.real())) return 0.0;
  const cplx w = z.imag() < 0.0 ? std::conj(z) : z;
  return std::max(0.0, comb_map(set, w).imag());
}

/// rho_E([lo, hi]) = (Re tau(hi) - Re tau(lo)) / pi.
inline double martin_measure(const FiniteGapSet& set, double lo, double hi) {
  detail::require_solved(set, "martin_measure");
  const detail::CombIntegrand R = detail::integrand_of(set);
  const double a = std::max(lo, set.b0), b = std::max(hi, set.b0);
  return detail::integrate_real_path(R, R.edges, a, b).real() / pi;
}

struct AsymptoticFit {
  double a_E = 0.0;
  double residual = 0.0;
  bool warning = false;
  std::vector<double> samples;  // 2 sqrt(R_k) (M(-R_k) - sqrt(R_k))
};

/// Fits a_E from M(-R) = sqrt(R) + a_E / (2 sqrt(R)) + O(R^{-3/2}) on
/// R in {1e4, 1e5, 1e6}: two Richardson levels remove the 1/R and 1/R^2 terms.
inline AsymptoticFit asymptotic_aE(const FiniteGapSet& set) {
  detail::require_solved(set, "asymptotic_aE");
  AsymptoticFit fit;
  for (double Rk : {1e4, 1e5, 1e6}) {
    const double s = std::sqrt(Rk);
    fit.samples.push_back(2.0 * s * (martin_function(set, -Rk) - s));
  }
  const double r1 = (10.0 * fit.samples[1] - fit.samples[0]) / 9.0;
  const double r2 = (10.0 * fit.samples[2] - fit.samples[1]) / 9.0;
  fit.a_E = (100.0 * r2 - r1) / 99.0;
  fit.residual = std::abs(fit.a_E - r2);
  fit.warning = fit.residual > 1e-3 * (1.0 + std::abs(fit.a_E));
  return fit;
}

/// b0 + sum_j (a_j + b_j - 2 c_j), the expansion constant read off from
/// R(u) at infinity. Used as a cross-check of the fit.
inline double aE_closed_form(const FiniteGapSet& set) {
  detail::require_solved(set, "aE_closed_form");
  double s = set.b0;
  for (std::size_t j = 0; j < set.gaps.size(); ++j) s += set.gaps[j].first + set.gaps[j].second - 2.0 * set.c[j];
  return s;
}

struct Band {
  double lo;
  double hi;  // may be +inf
};

inline std::vector<Band> bands_of(const FiniteGapSet& set) {
  std::vector<Band> out;
  double lo = set.b0;
  for (const auto& [a, b] : set.gaps) {
    out.push_back({lo, a});
    lo = b;
  }
  out.push_back({lo, INFINITY});
  return out;
}

/// {xi : dist(xi, E) < delta} union [1/delta, inf) as a finite-gap set
/// (critical points not solved). Bands that touch after fattening merge.
inline FiniteGapSet delta_extension(const std::vector<Band>& bands, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta_extension: delta must lie in (0, 1)");
  if (bands.empty()) throw DomainError("delta_extension: no bands");
  std::vector<Band> fat;
  for (const Band& b : bands) {
    if (!(b.hi >= b.lo)) throw DomainError("delta_extension: reversed band");
    fat.push_back({b.lo - delta, b.hi + delta});
  }
  fat.push_back({1.0 / delta, INFINITY});
  std::sort(fat.begin(), fat.end(), [](const Band& x, const Band& y) { return x.lo < y.lo; });
  std::vector<Band> merged{fat.front()};
  for (std::size_t i = 1; i < fat.size(); ++i) {
    if (fat[i].lo <= merged.back().hi) {
      merged.back().hi = std::max(merged.back().hi, fat[i].hi);
    } else {
      merged.push_back(fat[i]);
    }
  }
  FiniteGapSet out;
  out.b0 = merged.front().lo;
  for (std::size_t i = 0; i + 1 < merged.size(); ++i) out.gaps.emplace_back(merged[i].hi, merged[i + 1].lo);
  out.validate();
  return out;
}

inline FiniteGapSet delta_extension(const FiniteGapSet& set, double delta) {
  return delta_extension(bands_of(set), delta);
}

struct MartinData {
  FiniteGapSet set;
  double a_E = 0.0;
  /// |tau(-1e6) / (i 1e3) - 1|
  double normalization_residual = 0.0;
  AsymptoticFit fit;
  std::vector<double> gap_residuals;
};

inline MartinData martin_data(const FiniteGapSet& raw, double tol = 1e-12) {
  MartinData d;
  d.set = solve_critical_points(raw, tol);
  d.fit = asymptotic_aE(d.set);
  d.a_E = d.fit.a_E;
  d.normalization_residual = std::abs(comb_map(d.set, -1e6) / cplx(0.0, 1e3) - 1.0);
  d.gap_residuals = gap_residuals(d.set);
  return d;
}

}  // namespace clab
