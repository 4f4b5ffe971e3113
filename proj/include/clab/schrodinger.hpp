#pragma once

// Fundamental solutions of -y'' + V y = z y.
//
// v is the Neumann solution (v(0)=1, v'(0)=0) and u the Dirichlet solution
// (u(0)=0, u'(0)=1). States are carried as the fundamental matrix
//   Phi(x) = [[v, u], [v', u']],
// whose columns are solution vectors (y, y'). Piecewise-constant potentials
// are propagated exactly cell by cell; the closed-form periodic kind is
// integrated with an adaptive Runge-Kutta scheme, and whole periods are
// applied through a cached monodromy matrix.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <vector>

#include "clab/core.hpp"
#include "clab/ode.hpp"
#include "clab/potential.hpp"
#include "clab/quadrature.hpp"

namespace clab {

/// (v, v', u, u') at position x for spectral parameter z.
struct SolutionFrame {
  double x = 0.0;
  cplx z{};
  cplx v{1.0}, dv{}, u{}, du{1.0};

  /// v u' - v' u; identically 1.
  cplx wronskian() const { return v * du - dv * u; }
  /// [[v, -u], [-v', u']], the transfer matrix of the canonical-system form.
  Mat2 transfer() const { return {v, -u, -dv, du}; }
  /// [[v, u], [v', u']].
  Mat2 fundamental() const { return {v, u, dv, du}; }
};

struct PropagationOptions {
  /// Relative local error per unit length for the Runge-Kutta path.
  double tol = 1e-10;
};

// ---------------------------------------------------------------------------
// Constant-cell propagation

/// cos(sqrt(q) h), sin(sqrt(q) h)/sqrt(q) and their q-derivatives.
struct CellFunctions {
  cplx C, S, dC, dS;
};

/// Entire in q. Uses the power series when |q| h^2 <= 1, where the closed
/// forms lose digits to the removable singularity at q = 0.
inline CellFunctions cell_functions(cplx q, double h) {
  CellFunctions f;
  const cplx t = -q * (h * h);
  if (std::abs(t) <= 1.0) {
    // C = sum t^n/(2n)!, S = h sum t^n/(2n+1)!, dS/dq = -h^3 sum (m+1) t^m/(2m+3)!
    cplx C = 1.0, S = 1.0, D = 1.0 / 6.0;
    cplx termC = 1.0, termS = 1.0, termD = 1.0 / 6.0;
    for (int n = 1; n < 30; ++n) {
      termC *= t / ((2.0 * n - 1.0) * (2.0 * n));
      termS *= t / ((2.0 * n) * (2.0 * n + 1.0));
      termD *= t / ((2.0 * n + 2.0) * (2.0 * n + 3.0));
      C += termC;
      S += termS;
      D += termD * static_cast<double>(n + 1);
      if (std::abs(termC) + std::abs(termS) + std::abs(termD) < 1e-18) break;
    }
    f.C = C;
    f.S = h * S;
    f.dS = -h * h * h * D;
  } else {
    const cplx k = sqrt_upper(q);
    f.C = std::cos(k * h);
    f.S = std::sin(k * h) / k;
    f.dS = (h * f.C - f.S) / (2.0 * q);
  }
  f.dC = -0.5 * h * f.S;
  return f;
}

/// Propagator over a constant cell: (y, y')(x0+h) = M (y, y')(x0).
inline Mat2 cell_matrix(const CellFunctions& f, cplx q) { return {f.C, f.S, -q * f.S, f.C}; }

/// d/dz of cell_matrix.
inline Mat2 cell_matrix_derivative(const CellFunctions& f, cplx q) { return {f.dC, f.dS, -f.S - q * f.dS, f.dC}; }

// ---------------------------------------------------------------------------
// Propagator

/// Sweeps the fundamental matrix (and optionally its z-derivative) forward in
/// x. Positions must be requested in nondecreasing order.
class Propagator {
 public:
  Propagator(const Potential& V, cplx z, PropagationOptions opt = {}, bool track_derivative = false)
      : V_(V), z_(z), opt_(opt), deriv_(track_derivative) {}

  double position() const { return x_; }
  cplx z() const { return z_; }
  const Mat2& fundamental() const { return phi_; }
  /// d/dz of the fundamental matrix; zero unless derivative tracking is on.
  const Mat2& fundamental_derivative() const { return dphi_; }

  SolutionFrame frame() const { return {x_, z_, phi_.a, phi_.c, phi_.b, phi_.d}; }

  void advance_to(double x) {
    if (x < x_) throw DomainError("Propagator: positions must be nondecreasing");
    if (x > V_.domain_end() * (1.0 + 1e-15)) throw RangeError("Propagator: target past the potential's domain");
    if (x == x_) return;
    if (V_.piecewise_constant()) {
      V_.for_each_cell(x_, x, [&](double a, double b, double value) { apply_cell(b - a, value); });
      x_ = x;
    } else {
      advance_smooth(x);
    }
  }

 private:
  void apply_cell(double h, double value) {
    const cplx q = z_ - value;
    const CellFunctions f = cell_functions(q, h);
    const Mat2 M = cell_matrix(f, q);
    if (deriv_) dphi_ = cell_matrix_derivative(f, q) * phi_ + M * dphi_;
    phi_ = M * phi_;
  }

  // Runge-Kutta state: Phi entries then dPhi entries.
  using State = ode::State<8>;

  State rk_rhs(double x, const State& y) const {
    const cplx q = detail::trig_value(*V_.periodic(), x) - z_;
    // (y, y')' = (y', (V - z) y); columns v and u; derivative: (dy)'' = (V - z) dy - y.
    State out;
    out[0] = y[2];
    out[1] = y[3];
    out[2] = q * y[0];
    out[3] = q * y[1];
    if (deriv_) {
      out[4] = y[6];
      out[5] = y[7];
      out[6] = q * y[4] - y[0];
      out[7] = q * y[5] - y[1];
    } else {
      out[4] = out[5] = out[6] = out[7] = 0.0;
    }
    return out;
  }

  void rk_segment(double a, double b, Mat2& phi, Mat2& dphi) {
    State y{phi.a, phi.b, phi.c, phi.d, dphi.a, dphi.b, dphi.c, dphi.d};
    ode::Options o;
    o.rel_tol = opt_.tol;
    o.abs_tol = opt_.tol * 1e-4;
    o.max_step = std::min(0.25, V_.periodic()->period / 8.0);
    ode::integrate<8>([this](double x, const State& s) { return rk_rhs(x, s); }, a, b, y, o, &h_);
    phi = {y[0], y[1], y[2], y[3]};
    dphi = {y[4], y[5], y[6], y[7]};
  }

  void advance_smooth(double x) {
    const double p = V_.periodic()->period;
    while (x_ < x) {
      const double boundary = (period_index_ + 1) * p;
      const bool at_boundary = (x_ == period_index_ * p);
      if (at_boundary && x >= boundary) {
        if (!monodromy_) {
          Mat2 m = Mat2::identity(), dm{};
          rk_segment(0.0, p, m, dm);
          monodromy_ = m;
          dmonodromy_ = dm;
        }
        if (deriv_) dphi_ = *dmonodromy_ * phi_ + *monodromy_ * dphi_;
        phi_ = *monodromy_ * phi_;
        ++period_index_;
        x_ = period_index_ * p;
        continue;
      }
      const double end = std::min(x, boundary);
      // Local start within the period, using the periodicity of V.
      Mat2 m = Mat2::identity(), dm{};
      const double offset = x_ - period_index_ * p;
      rk_segment(offset, offset + (end - x_), m, dm);
      if (deriv_) dphi_ = dm * phi_ + m * dphi_;
      phi_ = m * phi_;
      if (end == boundary) {
        ++period_index_;
        x_ = period_index_ * p;
      } else {
        x_ = end;
      }
    }
  }

  const Potential& V_;
  cplx z_;
  PropagationOptions opt_;
  bool deriv_;
  double x_ = 0.0;
  Mat2 phi_ = Mat2::identity();
  Mat2 dphi_{};
  long long period_index_ = 0;
  double h_ = 0.0;
  std::optional<Mat2> monodromy_, dmonodromy_;
};

// ---------------------------------------------------------------------------
// Operations

/// Frame (v, v', u, u') at x_target.
inline SolutionFrame integrate_frame(const Potential& V, cplx z, double x_target, double tol = 1e-10) {
  if (!(tol > 0.0)) throw DomainError("integrate_frame: tol must be positive");
  if (x_target < 0.0) throw DomainError("integrate_frame: x must be nonnegative");
  Propagator p(V, z, {tol});
  p.advance_to(x_target);
  return p.frame();
}

/// Frame together with its z-derivative (d/dz of v, v', u, u').
struct FrameWithDerivative {
  SolutionFrame frame;
  SolutionFrame dz;  // x and z copied; entries are the derivatives
};

inline FrameWithDerivative integrate_frame_derivative(const Potential& V, cplx z, double x_target,
                                                      double tol = 1e-10) {
  Propagator p(V, z, {tol}, true);
  p.advance_to(x_target);
  const Mat2& d = p.fundamental_derivative();
  return {p.frame(), {x_target, z, d.a, d.c, d.b, d.d}};
}


// ---------------------------------------------------------------------------
// Volterra series

struct VolterraResult {
  cplx value;
  /// Bound on the omitted terms n > n_max.
  double tail_bound = 0.0;
  int terms = 0;
  /// Set when tail_bound exceeds the requested tolerance.
  bool truncation_warning = false;
};

namespace detail {

/// Panel decomposition of [0, x] with a fixed Gauss rule per panel; panel
/// edges include every breakpoint of a piecewise-constant V.
struct PanelGrid {
  std::vector<double> lo, hi;   // panel bounds
  std::vector<double> nodes;    // all nodes, panel-major
  std::vector<double> weights;
  std::vector<double> values;   // V at nodes
};

inline PanelGrid volterra_panels(const Potential& V, double x, double max_width, int order) {
  PanelGrid g;
  auto add_piece = [&](double a, double b) {
    const int n = std::max(1, static_cast<int>(std::ceil((b - a) / max_width)));
    for (int i = 0; i < n; ++i) {
      g.lo.push_back(a + (b - a) * i / n);
      g.hi.push_back(i + 1 == n ? b : a + (b - a) * (i + 1) / n);
    }
  };
  if (V.piecewise_constant()) {
    V.for_each_cell(0.0, x, [&](double a, double b, double) { add_piece(a, b); });
  } else {
    add_piece(0.0, x);
  }
  const quad::Rule& rule = quad::gauss_legendre(order);
  for (std::size_t p = 0; p < g.lo.size(); ++p) {
    const double half = 0.5 * (g.hi[p] - g.lo[p]);
    const double mid = 0.5 * (g.hi[p] + g.lo[p]);
    for (int i = 0; i < order; ++i) {
      const double t = mid + half * rule.nodes[i];
      g.nodes.push_back(t);
      g.weights.push_back(half * rule.weights[i]);
      g.values.push_back(V(t));
    }
  }
  return g;
}

}  // namespace detail

/// Truncated Volterra series for the Neumann solution,
///   v = c + sum_{n=1}^{n_max} v_n,   v_n(t) = int_0^t s(t - tau) V(tau) v_{n-1}(tau) dtau,
/// with c = cos(sqrt(z) t), s = sin(sqrt(z) t)/sqrt(z). The iterated
/// integrals are evaluated by nested Gauss quadrature on panels aligned with
/// the cells of V; the partial panel below each node uses barycentric
/// interpolation of the previous iterate.
///
/// The tail bound follows from |c(t)| <= e^{Im k t}, |s(t)| <= min(1/|k|, x) e^{Im k t}:
///   |v_n(x)| <= e^{Im k x} (min(1/|k|, x) int_0^x |V|)^n / n!.
inline VolterraResult volterra_series(const Potential& V, cplx z, double x, int n_max,
                                      double tail_tol = INFINITY) {
  if (n_max < 1) throw DomainError("volterra_series: n_max must be at least 1");
  if (x < 0.0) throw DomainError("volterra_series: x must be nonnegative");
  const cplx k = sqrt_upper(z);
  auto c_fun = [&](double t) { return cell_functions(z, t).C; };
  auto s_fun = [&](double t) { return cell_functions(z, t).S; };

  VolterraResult res;
  res.terms = n_max;
  {
    const double rho = std::abs(k) > 0.0 ? std::min(1.0 / std::abs(k), x) : x;
    const double a = rho * V.abs_integral(0.0, x);
    double term = 1.0, tail = 0.0;
    for (int n = 1; n <= n_max; ++n) term *= a / n;
    for (int n = n_max + 1; n < n_max + 400; ++n) {
      term *= a / n;
      tail += term;
      if (term < 1e-18 * tail) break;
    }
    res.tail_bound = std::exp(k.imag() * x) * tail;
    res.truncation_warning = res.tail_bound > tail_tol;
  }
  if (x == 0.0) {
    res.value = 1.0;
    return res;
  }

  constexpr int order = 16;
  const double max_width = std::min(0.25, 0.5 / std::max(1.0, std::abs(k)));
  const detail::PanelGrid g = detail::volterra_panels(V, x, max_width, order);
  const std::size_t N = g.nodes.size();
  const quad::Rule& rule = quad::gauss_legendre(order);

  // Barycentric weights for the reference nodes.
  std::vector<double> bw(order, 1.0);
  for (int j = 0; j < order; ++j)
    for (int m = 0; m < order; ++m)
      if (m != j) bw[j] /= (rule.nodes[j] - rule.nodes[m]);

  auto interp_row = [&](double r, std::vector<double>& row) {
    row.assign(order, 0.0);
    for (int j = 0; j < order; ++j) {
      if (r == rule.nodes[j]) {
        row[j] = 1.0;
        return;
      }
    }
    double den = 0.0;
    for (int j = 0; j < order; ++j) {
      row[j] = bw[j] / (r - rule.nodes[j]);
      den += row[j];
    }
    for (int j = 0; j < order; ++j) row[j] /= den;
  };

  // Partial-panel weights: for target t in panel p,
  //   int_{lo_p}^t s(t - tau) V v(tau) dtau ~ sum_j W_j v(node_j of panel p) * V_p.
  auto partial_weights = [&](std::size_t p, double t) {
    std::vector<cplx> W(order, 0.0);
    std::vector<double> row;
    const double a = g.lo[p];
    const double half = 0.5 * (t - a);
    const double mid = 0.5 * (t + a);
    const double phalf = 0.5 * (g.hi[p] - g.lo[p]);
    const double pmid = 0.5 * (g.hi[p] + g.lo[p]);
    for (int m = 0; m < order; ++m) {
      const double tau = mid + half * rule.nodes[m];
      interp_row((tau - pmid) / phalf, row);
      const cplx sw = half * rule.weights[m] * s_fun(t - tau) * V(tau);
      for (int j = 0; j < order; ++j) W[j] += sw * row[j];
    }
    return W;
  };

  std::vector<std::vector<cplx>> partial(N);
  for (std::size_t i = 0; i < N; ++i) partial[i] = partial_weights(i / order, g.nodes[i]);

  // Kernel matrix over earlier panels, lower block-triangular.
  std::vector<std::vector<cplx>> kern(N);
  for (std::size_t i = 0; i < N; ++i) {
    const std::size_t full = (i / order) * order;
    kern[i].resize(full);
    for (std::size_t j = 0; j < full; ++j) kern[i][j] = g.weights[j] * s_fun(g.nodes[i] - g.nodes[j]) * g.values[j];
  }

  std::vector<cplx> prev(N), next(N);
  for (std::size_t i = 0; i < N; ++i) prev[i] = c_fun(g.nodes[i]);
  cplx total = c_fun(x);
  for (int n = 1; n <= n_max; ++n) {
    for (std::size_t i = 0; i < N; ++i) {
      cplx acc = 0.0;
      for (std::size_t j = 0; j < kern[i].size(); ++j) acc += kern[i][j] * prev[j];
      const std::size_t base = (i / order) * order;
      for (int j = 0; j < order; ++j) acc += partial[i][j] * prev[base + j];
      next[i] = acc;
    }
    // v_n(x): every panel lies below x.
    cplx vx = 0.0;
    for (std::size_t j = 0; j < N; ++j) vx += g.weights[j] * s_fun(x - g.nodes[j]) * g.values[j] * prev[j];
    total += vx;
    std::swap(prev, next);
  }
  res.value = total;
  return res;
}

// ---------------------------------------------------------------------------
// Growth bounds

/// Checks |v(x, xi)| against
///   e^{int_0^x |V| / sqrt(xi)}                 for xi >= 1,
///   e^{(1 + Im sqrt(xi)) x + int_0^x |V|}     for xi < 1.
/// Returns false on violation. A relative slack of 1e-12 absorbs rounding.
inline bool check_growth_bounds(const SolutionFrame& frame, const Potential& V) {
  if (frame.z.imag() != 0.0) throw DomainError("check_growth_bounds: spectral parameter must be real");
  const double xi = frame.z.real();
  const double mass = V.abs_integral(0.0, frame.x);
  const double log_bound = xi >= 1.0 ? mass / std::sqrt(xi)
                                     : (1.0 + sqrt_upper(cplx(xi)).imag()) * frame.x + mass;
  return std::abs(frame.v) <= std::exp(log_bound) * (1.0 + 1e-12);
}

/// (1/x) log|v(x, z)| on an increasing grid of positive x; -inf where v vanishes.
inline std::vector<double> growth_rate(const Potential& V, cplx z, const std::vector<double>& x_grid,
                                       double tol = 1e-10) {
  std::vector<double> out;
  out.reserve(x_grid.size());
  Propagator p(V, z, {tol});
  double last = 0.0;
  for (double x : x_grid) {
    if (!(x > 0.0)) throw DomainError("growth_rate: grid must be positive");
    if (x < last) throw DomainError("growth_rate: grid must be increasing");
    last = x;
    p.advance_to(x);
    const double a = std::abs(p.frame().v);
    out.push_back(a == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(a) / x);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Products of solutions

struct GramResult {
  /// G(i, j) = int_{x1}^{x2} y_i(x, z) conj(y_j(x, w)) dx with y_1 = v, y_2 = u.
  Mat2 G;
  double error = 0.0;
};

/// Integrals of products of fundamental solutions at two spectral parameters.
/// Piecewise-constant V: adaptive Gauss quadrature per cell with the solution
/// evaluated in closed form inside the cell. Closed-form periodic V: the
/// integrals ride along as extra components of the Runge-Kutta system.
inline GramResult solution_gram(const Potential& V, cplx z, cplx w, double x1, double x2, double tol = 1e-12) {
  if (!(x2 >= x1) || x1 < 0.0) throw DomainError("solution_gram: need 0 <= x1 <= x2");
  Propagator pz(V, z, {std::min(tol, 1e-10)});
  Propagator pw(V, w, {std::min(tol, 1e-10)});
  pz.advance_to(x1);
  pw.advance_to(x1);
  GramResult out;
  if (x2 == x1) return out;

  if (V.piecewise_constant()) {
    V.for_each_cell(x1, x2, [&](double a, double b, double value) {
      const Mat2 Fz = pz.fundamental();
      const Mat2 Fw = pw.fundamental();
      const cplx qz = z - value;
      const cplx qw = w - value;
      auto integrand = [&](double x) {
        const double s = x - a;
        const CellFunctions cz = cell_functions(qz, s);
        const CellFunctions cw = cell_functions(qw, s);
        const cplx vz = cz.C * Fz.a + cz.S * Fz.c;
        const cplx uz = cz.C * Fz.b + cz.S * Fz.d;
        const cplx vw = std::conj(cw.C * Fw.a + cw.S * Fw.c);
        const cplx uw = std::conj(cw.C * Fw.b + cw.S * Fw.d);
        return Mat2{vz * vw, vz * uw, uz * vw, uz * uw};
      };
      const double freq = std::max({1.0, std::abs(sqrt_upper(qz)), std::abs(sqrt_upper(qw))});
      const int panels = std::max(1, static_cast<int>(std::ceil((b - a) * freq / 2.0)));
      const auto r = quad::adaptive(integrand, a, b, tol, 0.0, panels);
      out.G += r.value;
      out.error += r.error;
      pz.advance_to(b);
      pw.advance_to(b);
    });
    return out;
  }

  // Runge-Kutta: [v_z, u_z, v_z', u_z', v_w, u_w, v_w', u_w', G11, G12, G21, G22]
  const PeriodicPotential& per = *V.periodic();
  using State = ode::State<12>;
  const Mat2 Fz = pz.fundamental();
  const Mat2 Fw = pw.fundamental();
  State y{Fz.a, Fz.b, Fz.c, Fz.d, Fw.a, Fw.b, Fw.c, Fw.d, 0.0, 0.0, 0.0, 0.0};
  auto rhs = [&](double x, const State& s) {
    const double vx = detail::trig_value(per, x);
    State o;
    o[0] = s[2];
    o[1] = s[3];
    o[2] = (vx - z) * s[0];
    o[3] = (vx - z) * s[1];
    o[4] = s[6];
    o[5] = s[7];
    o[6] = (vx - w) * s[4];
    o[7] = (vx - w) * s[5];
    o[8] = s[0] * std::conj(s[4]);
    o[9] = s[0] * std::conj(s[5]);
    o[10] = s[1] * std::conj(s[4]);
    o[11] = s[1] * std::conj(s[5]);
    return o;
  };
  ode::Options o;
  o.rel_tol = std::max(tol, 1e-13);
  o.abs_tol = o.rel_tol * 1e-4;
  o.max_step = std::min(0.25, per.period / 8.0);
  ode::integrate<12>(rhs, x1, x2, y, o);
  out.G = {y[8], y[9], y[10], y[11]};
  out.error = o.rel_tol * abs(out.G) * (x2 - x1);
  return out;
}

}  // namespace clab
