#pragma once

// Bracketing scalar root finders.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "clab/core.hpp"

namespace clab::roots {

struct Result {
  double x;
  int iterations;
  bool converged;
};

/// Plain bisection; f(lo) and f(hi) must differ in sign (a zero at either end
/// is returned immediately).
template <class F>
Result bisect(const F& f, double lo, double hi, double xtol, int max_iter = 200) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return {lo, 0, true};
  if (fhi == 0.0) return {hi, 0, true};
  if ((flo > 0) == (fhi > 0)) throw DomainError("bisect: root not bracketed");
  for (int i = 1; i <= max_iter; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= xtol || mid == lo || mid == hi) return {mid, i, true};
    const double fm = f(mid);
    if (fm == 0.0) return {mid, i, true};
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return {0.5 * (lo + hi), max_iter, false};
}

/// Brent's method (inverse quadratic interpolation with bisection safeguard).
template <class F>
Result brent(const F& f, double a, double b, double xtol, int max_iter = 200) {
  double fa = f(a);
  double fb = f(b);
  if (fa == 0.0) return {a, 0, true};
  if (fb == 0.0) return {b, 0, true};
  if ((fa > 0) == (fb > 0)) throw DomainError("brent: root not bracketed");
  double c = a, fc = fa, d = b - a, e = d;
  for (int iter = 1; iter <= max_iter; ++iter) {
    if ((fb > 0) == (fc > 0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol1 = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) + 0.5 * xtol;
    const double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0.0) return {b, iter, true};
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      double p, q, r;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0) q = -q;
      p = std::abs(p);
      const double min1 = 3.0 * xm * q - std::abs(tol1 * q);
      const double min2 = std::abs(e * q);
      if (2.0 * p < std::min(min1, min2)) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol1) ? d : (xm > 0 ? tol1 : -tol1);
    fb = f(b);
  }
  return {b, max_iter, false};
}

/// Newton iteration kept inside [lo, hi]: any step leaving the bracket, or not
/// shrinking |f|, is replaced by bisection of the current bracket.
/// `f_df` returns the pair (f(x), f'(x)).
template <class FDF>
Result safeguarded_newton(const FDF& f_df, double lo, double hi, double xtol, int max_iter = 100) {
  auto [flo, dlo] = f_df(lo);
  auto [fhi, dhi] = f_df(hi);
  (void)dlo;
  (void)dhi;
  if (flo == 0.0) return {lo, 0, true};
  if (fhi == 0.0) return {hi, 0, true};
  if ((flo > 0) == (fhi > 0)) throw DomainError("safeguarded_newton: root not bracketed");
  const bool rising = fhi > 0;
  double x = 0.5 * (lo + hi);
  for (int i = 1; i <= max_iter; ++i) {
    auto [fx, dfx] = f_df(x);
    if (fx == 0.0) return {x, i, true};
    if ((fx > 0) == rising) {
      hi = x;
    } else {
      lo = x;
    }
    double next = (dfx != 0.0) ? x - fx / dfx : lo - 1.0;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= xtol || hi - lo <= xtol) return {next, i, true};
    x = next;
  }
  return {x, max_iter, false};
}

}  // namespace clab::roots
