#pragma once

// Gauss-Legendre rules and an adaptive composite integrator.

#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include "clab/core.hpp"

namespace clab::quad {

struct Rule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

namespace detail {

inline Rule build_gauss_legendre(int n) {
  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  return r;
}

}  // namespace detail

/// n-point Gauss-Legendre rule, built once per n and cached for the process.
inline const Rule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, Rule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, detail::build_gauss_legendre(n)).first;
  return it->second;
}

template <class F>
auto fixed(const F& f, double a, double b, const Rule& rule) {
  using R = decltype(f(a));
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  R sum{};
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return sum * half;
}

template <class R>
struct Result {
  R value{};
  double error = 0.0;
  int panels = 0;
};

namespace detail {

template <class F, class R>
void adaptive_step(const F& f, double a, double b, R whole, double rel_tol, double abs_tol,
                   int depth, const Rule& rule, Result<R>& out) {
  const double m = 0.5 * (a + b);
  const R left = fixed(f, a, m, rule);
  const R right = fixed(f, m, b, rule);
  const R refined = left + right;
  using std::abs;
  const double err = abs(refined - whole);
  if (err <= std::max(abs_tol, rel_tol * abs(refined)) || depth >= 40 || !(b - a > 1e-15 * std::abs(a))) {
    out.value += refined;
    out.error += err;
    out.panels += 1;
    return;
  }
  adaptive_step(f, a, m, left, rel_tol, 0.5 * abs_tol, depth + 1, rule, out);
  adaptive_step(f, m, b, right, rel_tol, 0.5 * abs_tol, depth + 1, rule, out);
}

}  // namespace detail

/// Adaptive bisection with a 15-point Gauss-Legendre rule on each panel; the
/// error estimate is the difference between a panel and its two halves.
/// `initial_panels` splits [a,b] uniformly before adapting.
template <class F>
auto adaptive(const F& f, double a, double b, double rel_tol = 1e-13, double abs_tol = 0.0,
              int initial_panels = 1) {
  using R = decltype(f(a));
  const Rule& rule = gauss_legendre(15);
  Result<R> out;
  if (a == b) return out;
  const int n = std::max(1, initial_panels);
  const double h = (b - a) / n;
  for (int i = 0; i < n; ++i) {
    const double lo = a + i * h;
    const double hi = (i + 1 == n) ? b : a + (i + 1) * h;
    const R whole = fixed(f, lo, hi, rule);
    detail::adaptive_step(f, lo, hi, whole, rel_tol, abs_tol / n, 0, rule, out);
  }
  return out;
}

}  // namespace clab::quad
