#pragma once

// Real potentials V on [0, inf) and the global quantities attached to them.
//
// Every kind except the closed-form periodic one is piecewise constant, and
// the propagation and quadrature layers rely on that: cells are enumerated
// exactly, so integrals of V and |V| carry no quadrature error.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "clab/core.hpp"
#include "clab/quadrature.hpp"

namespace clab {

struct ZeroPotential {};

struct ConstantPotential {
  double value = 0.0;
};

/// V = values[i] on [breakpoints[i], breakpoints[i+1]); the last value extends
/// to infinity. breakpoints[0] must be 0.
struct PiecewiseConstantPotential {
  std::vector<double> breakpoints;
  std::vector<double> values;
};

/// Periodic potential. With `samples` non-empty, V is piecewise constant on the
/// period split into samples.size() equal cells. Otherwise V is the
/// trigonometric polynomial
///   offset + sum_k cos_terms[k-1] cos(2 pi k x / period) + sin_terms[k-1] sin(2 pi k x / period).
struct PeriodicPotential {
  double period = 1.0;
  std::vector<double> samples;
  double offset = 0.0;
  std::vector<double> cos_terms;
  std::vector<double> sin_terms;
};

/// V(x) = (-1)^floor(2n(x-n)) on [n-1, n): on the n-th unit interval, 2n cells
/// of alternating sign starting with +1.
struct OscillatingExample {};

/// V = values[i] on [i*step, (i+1)*step). Undefined past the last cell.
struct TabulatedGrid {
  double step = 1.0;
  std::vector<double> values;
};

class Potential {
 public:
  using Kind = std::variant<ZeroPotential, ConstantPotential, PiecewiseConstantPotential, PeriodicPotential,
                            OscillatingExample, TabulatedGrid>;

  Potential() : kind_(ZeroPotential{}) {}
  Potential(Kind kind) : kind_(std::move(kind)) { validate(); }  // NOLINT(google-explicit-constructor)

  static Potential zero() { return Potential(ZeroPotential{}); }
  static Potential constant(double d0) { return Potential(ConstantPotential{d0}); }
  static Potential piecewise(std::vector<double> breakpoints, std::vector<double> values) {
    return Potential(PiecewiseConstantPotential{std::move(breakpoints), std::move(values)});
  }
  static Potential periodic_samples(double period, std::vector<double> samples) {
    return Potential(PeriodicPotential{period, std::move(samples), 0.0, {}, {}});
  }
  static Potential periodic_trig(double period, double offset, std::vector<double> cos_terms,
                                 std::vector<double> sin_terms = {}) {
    return Potential(PeriodicPotential{period, {}, offset, std::move(cos_terms), std::move(sin_terms)});
  }
  static Potential oscillating_example() { return Potential(OscillatingExample{}); }
  static Potential grid(double step, std::vector<double> values) {
    return Potential(TabulatedGrid{step, std::move(values)});
  }

  const Kind& kind() const { return kind_; }

  std::string tag() const {
    return std::visit(
        [](const auto& k) -> std::string {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, ZeroPotential>) return "zero";
          if constexpr (std::is_same_v<T, ConstantPotential>) return "constant";
          if constexpr (std::is_same_v<T, PiecewiseConstantPotential>) return "piecewise";
          if constexpr (std::is_same_v<T, PeriodicPotential>) return "periodic";
          if constexpr (std::is_same_v<T, OscillatingExample>) return "oscillating_example";
          if constexpr (std::is_same_v<T, TabulatedGrid>) return "grid";
        },
        kind_);
  }

  bool piecewise_constant() const {
    if (const auto* p = std::get_if<PeriodicPotential>(&kind_)) return !p->samples.empty();
    return true;
  }

  const PeriodicPotential* periodic() const { return std::get_if<PeriodicPotential>(&kind_); }

  /// Period for periodic kinds; Zero and Constant count as periodic with any
  /// period and report nullopt here.
  std::optional<double> period() const {
    if (const auto* p = periodic()) return p->period;
    return std::nullopt;
  }

  /// Position X and value d such that V == d on [X, inf), when such X exists.
  std::optional<std::pair<double, double>> constant_tail() const {
    if (std::holds_alternative<ZeroPotential>(kind_)) return std::pair{0.0, 0.0};
    if (const auto* c = std::get_if<ConstantPotential>(&kind_)) return std::pair{0.0, c->value};
    if (const auto* p = std::get_if<PiecewiseConstantPotential>(&kind_))
      return std::pair{p->breakpoints.back(), p->values.back()};
    return std::nullopt;
  }

  /// Right end of the domain where V is defined (infinite except for grids).
  double domain_end() const {
    if (const auto* g = std::get_if<TabulatedGrid>(&kind_)) return g->step * static_cast<double>(g->values.size());
    return INFINITY;
  }

  double operator()(double x) const;

  /// Calls f(x0, x1, value) for consecutive constant cells covering [a, b].
  /// Only valid for piecewise-constant kinds.
  template <class F>
  void for_each_cell(double a, double b, F&& f) const;

  /// Exact (piecewise) or quadrature value of the integral of V over [a, b].
  double integral(double a, double b) const;
  /// Same for |V|.
  double abs_integral(double a, double b) const;

 private:
  void validate() const;
  Kind kind_;
};

// ---------------------------------------------------------------------------

inline void Potential::validate() const {
  std::visit(
      [](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, PiecewiseConstantPotential>) {
          if (k.breakpoints.empty() || k.breakpoints.size() != k.values.size())
            throw DomainError("piecewise potential: need one value per breakpoint");
          if (k.breakpoints.front() != 0.0) throw DomainError("piecewise potential: first breakpoint must be 0");
          for (std::size_t i = 1; i < k.breakpoints.size(); ++i)
            if (!(k.breakpoints[i] > k.breakpoints[i - 1]))
              throw DomainError("piecewise potential: breakpoints must be strictly increasing (index " +
                                std::to_string(i) + ")");
        } else if constexpr (std::is_same_v<T, PeriodicPotential>) {
          if (!(k.period > 0.0)) throw DomainError("periodic potential: period must be positive");
          if (!k.samples.empty() && (!k.cos_terms.empty() || !k.sin_terms.empty()))
            throw DomainError("periodic potential: give either samples or trigonometric terms");
        } else if constexpr (std::is_same_v<T, TabulatedGrid>) {
          if (!(k.step > 0.0)) throw DomainError("grid potential: step must be positive");
          if (k.values.empty()) throw DomainError("grid potential: no values");
        }
      },
      kind_);
}

namespace detail {

inline double trig_value(const PeriodicPotential& p, double x) {
  const double w = 2.0 * pi / p.period;
  double v = p.offset;
  for (std::size_t k = 0; k < p.cos_terms.size(); ++k) v += p.cos_terms[k] * std::cos(w * (k + 1) * x);
  for (std::size_t k = 0; k < p.sin_terms.size(); ++k) v += p.sin_terms[k] * std::sin(w * (k + 1) * x);
  return v;
}

inline double trig_antiderivative(const PeriodicPotential& p, double x) {
  const double w = 2.0 * pi / p.period;
  double v = p.offset * x;
  for (std::size_t k = 0; k < p.cos_terms.size(); ++k) v += p.cos_terms[k] * std::sin(w * (k + 1) * x) / (w * (k + 1));
  for (std::size_t k = 0; k < p.sin_terms.size(); ++k) v -= p.sin_terms[k] * std::cos(w * (k + 1) * x) / (w * (k + 1));
  return v;
}

}  // namespace detail

inline double Potential::operator()(double x) const {
  if (x < 0.0) throw DomainError("potential evaluated at negative x");
  return std::visit(
      [x](const auto& k) -> double {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, ZeroPotential>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, ConstantPotential>) {
          return k.value;
        } else if constexpr (std::is_same_v<T, PiecewiseConstantPotential>) {
          const auto it = std::upper_bound(k.breakpoints.begin(), k.breakpoints.end(), x);
          return k.values[static_cast<std::size_t>(it - k.breakpoints.begin()) - 1];
        } else if constexpr (std::is_same_v<T, PeriodicPotential>) {
          if (k.samples.empty()) return detail::trig_value(k, x);
          const double r = x - k.period * std::floor(x / k.period);
          auto i = static_cast<std::size_t>(r / k.period * static_cast<double>(k.samples.size()));
          return k.samples[std::min(i, k.samples.size() - 1)];
        } else if constexpr (std::is_same_v<T, OscillatingExample>) {
          const double n = std::floor(x) + 1.0;
          const double e = std::floor(2.0 * n * (x - n));
          return std::fmod(e, 2.0) == 0.0 ? 1.0 : -1.0;
        } else {
          const auto i = static_cast<std::size_t>(std::floor(x / k.step));
          if (i >= k.values.size()) throw RangeError("grid potential evaluated past its last cell");
          return k.values[i];
        }
      },
      kind_);
}

template <class F>
void Potential::for_each_cell(double a, double b, F&& f) const {
  if (!(b > a)) return;
  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, ZeroPotential>) {
          f(a, b, 0.0);
        } else if constexpr (std::is_same_v<T, ConstantPotential>) {
          f(a, b, k.value);
        } else if constexpr (std::is_same_v<T, PiecewiseConstantPotential>) {
          const auto& bp = k.breakpoints;
          std::size_t i = static_cast<std::size_t>(std::upper_bound(bp.begin(), bp.end(), a) - bp.begin()) - 1;
          double x = a;
          while (x < b) {
            const double end = (i + 1 < bp.size()) ? std::min(b, bp[i + 1]) : b;
            f(x, end, k.values[i]);
            x = end;
            ++i;
          }
        } else if constexpr (std::is_same_v<T, PeriodicPotential>) {
          if (k.samples.empty()) throw DomainError("closed-form periodic potential has no constant cells");
          const double n = static_cast<double>(k.samples.size());
          const double h = k.period / n;
          double cell = std::floor(a / h);
          double x = a;
          while (x < b) {
            auto idx = static_cast<long long>(cell) % static_cast<long long>(k.samples.size());
            double end = std::min(b, (cell + 1.0) * h);
            if (end <= x) {  // rounding at a cell boundary
              cell += 1.0;
              continue;
            }
            f(x, end, k.samples[static_cast<std::size_t>(idx)]);
            x = end;
            cell += 1.0;
          }
        } else if constexpr (std::is_same_v<T, OscillatingExample>) {
          double x = a;
          while (x < b) {
            const double n = std::floor(x) + 1.0;
            const double left = n - 1.0;
            double m = std::floor((x - left) * 2.0 * n);
            double end = left + (m + 1.0) / (2.0 * n);
            if (end <= x) {
              m += 1.0;
              end = left + (m + 1.0) / (2.0 * n);
            }
            if (m >= 2.0 * n) {  // rounding pushed us into the next unit interval
              end = n;
              m = 2.0 * n - 1.0;
            }
            end = std::min(b, end);
            f(x, end, std::fmod(m, 2.0) == 0.0 ? 1.0 : -1.0);
            x = end;
          }
        } else {
          if (b > k.step * static_cast<double>(k.values.size()) * (1.0 + 1e-15))
            throw RangeError("grid potential needed past its last cell");
          double x = a;
          auto i = static_cast<std::size_t>(std::floor(a / k.step));
          while (x < b && i < k.values.size()) {
            const double end = std::min(b, k.step * static_cast<double>(i + 1));
            if (end > x) f(x, end, k.values[i]);
            x = std::max(x, end);
            ++i;
          }
        }
      },
      kind_);
}

inline double Potential::integral(double a, double b) const {
  if (const auto* p = periodic(); p && p->samples.empty())
    return detail::trig_antiderivative(*p, b) - detail::trig_antiderivative(*p, a);
  double s = 0.0;
  for_each_cell(a, b, [&](double x0, double x1, double v) { s += v * (x1 - x0); });
  return s;
}

inline double Potential::abs_integral(double a, double b) const {
  if (const auto* p = periodic(); p && p->samples.empty()) {
    const auto panels = static_cast<int>(std::ceil((b - a) / p->period * 16.0));
    return quad::adaptive([&](double x) { return std::abs(detail::trig_value(*p, x)); }, a, b, 1e-12, 1e-15,
                          std::max(1, panels))
        .value;
  }
  double s = 0.0;
  for_each_cell(a, b, [&](double x0, double x1, double v) { s += std::abs(v) * (x1 - x0); });
  return s;
}

// ---------------------------------------------------------------------------
// Operations

inline double evaluate(const Potential& V, double x) { return V(x); }

/// (1/L) * integral_0^L V.
inline double cesaro_mean(const Potential& V, double L) {
  if (!(L > 0.0)) throw DomainError("cesaro_mean: L must be positive");
  return V.integral(0.0, L) / L;
}

/// sup over shifts x in [0, horizon] of integral_x^{x+1} |V|.
///
/// For piecewise-constant V the window integral is piecewise linear in x with
/// kinks where x or x+1 crosses a breakpoint, so checking those shifts is
/// exact. Closed-form periodic V is checked on a fixed shift grid of 256
/// points per period.
inline double local_l1_sup(const Potential& V, double horizon) {
  if (!(horizon > 0.0)) throw DomainError("local_l1_sup: horizon must be positive");
  std::vector<double> shifts;
  if (V.piecewise_constant()) {
    shifts = {0.0, horizon};
    V.for_each_cell(0.0, horizon + 1.0, [&](double x0, double, double) {
      if (x0 <= horizon) shifts.push_back(x0);
      if (x0 - 1.0 >= 0.0 && x0 - 1.0 <= horizon) shifts.push_back(x0 - 1.0);
    });
  } else {
    const double p = *V.period();
    const double h = p / 256.0;
    for (int k = 0; k <= 256 && k * h <= horizon; ++k) shifts.push_back(k * h);
  }
  double best = 0.0;
  for (double x : shifts) best = std::max(best, V.abs_integral(x, x + 1.0));
  return best;
}

}  // namespace clab
