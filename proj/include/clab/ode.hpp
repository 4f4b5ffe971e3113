#pragma once

// Adaptive Dormand-Prince 5(4) integrator for complex-valued first-order
// systems y' = f(x, y) with fixed dimension N.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>

#include "clab/core.hpp"

namespace clab::ode {

template <std::size_t N>
using State = std::array<cplx, N>;

struct Options {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  double initial_step = 1e-2;
  double min_step = 1e-13;
  double max_step = 0.25;
  long max_steps = 50'000'000;
};

struct Stats {
  long accepted = 0;
  long rejected = 0;
};

namespace detail {

template <std::size_t N>
State<N> axpy(const State<N>& y, double h, std::initializer_list<std::pair<double, const State<N>*>> terms) {
  State<N> out = y;
  for (const auto& [coef, k] : terms) {
    if (coef == 0.0) continue;
    for (std::size_t i = 0; i < N; ++i) out[i] += h * coef * (*k)[i];
  }
  return out;
}

}  // namespace detail

/// Integrates from x0 to x1 (x1 >= x0) in place. `h_inout` carries the step
/// size between calls so that piecewise sweeps do not restart cold.
/// Throws IntegrationError when the step size underflows.
template <std::size_t N, class RHS>
void integrate(const RHS& rhs, double x0, double x1, State<N>& y, const Options& opt,
               double* h_inout = nullptr, Stats* stats = nullptr) {
  if (x1 <= x0) return;
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  constexpr double e1 = b1 - 5179.0 / 57600, e3 = b3 - 7571.0 / 16695, e4 = b4 - 393.0 / 640,
                   e5 = b5 + 92097.0 / 339200, e6 = b6 - 187.0 / 2100, e7 = -1.0 / 40;

  double h = (h_inout && *h_inout > 0) ? *h_inout : opt.initial_step;
  h = std::min(h, opt.max_step);
  double x = x0;
  State<N> k1 = rhs(x, y);
  long steps = 0;
  while (x < x1) {
    if (++steps > opt.max_steps) throw IntegrationError("step budget exhausted", x);
    bool last = false;
    const double h_full = h;
    if (x + h >= x1) {
      h = x1 - x;
      last = true;
    }
    const State<N> k2 = rhs(x + c2 * h, detail::axpy<N>(y, h, {{a21, &k1}}));
    const State<N> k3 = rhs(x + c3 * h, detail::axpy<N>(y, h, {{a31, &k1}, {a32, &k2}}));
    const State<N> k4 = rhs(x + c4 * h, detail::axpy<N>(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const State<N> k5 =
        rhs(x + c5 * h, detail::axpy<N>(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const State<N> k6 =
        rhs(x + h, detail::axpy<N>(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    const State<N> ynew =
        detail::axpy<N>(y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
    const State<N> k7 = rhs(x + h, ynew);

    double err = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const cplx ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double scale = opt.abs_tol + opt.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      err = std::max(err, std::abs(ei) / scale);
    }
    if (err <= 1.0) {
      x = last ? x1 : x + h;
      y = ynew;
      k1 = k7;
      if (stats) ++stats->accepted;
      const double grow = (err == 0.0) ? 5.0 : std::min(5.0, 0.9 * std::pow(err, -0.2));
      h = last ? std::max(h, h_full) : std::min(opt.max_step, h * grow);
    } else {
      if (stats) ++stats->rejected;
      h *= std::max(0.1, 0.9 * std::pow(err, -0.25));
      if (h < opt.min_step) throw IntegrationError("step size underflow", x);
    }
  }
  if (h_inout) *h_inout = h;
}

}  // namespace clab::ode
