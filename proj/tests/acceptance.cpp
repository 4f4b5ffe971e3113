// Acceptance run: one PASS/FAIL line per criterion; nonzero exit if any fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "clab/asymptotics.hpp"
#include "clab/canonical.hpp"
#include "clab/cd_kernel.hpp"
#include "clab/martin.hpp"
#include "clab/potential.hpp"
#include "clab/schrodinger.hpp"
#include "clab/weyl.hpp"

using namespace clab;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double free_fE(double xi) { return 1.0 / (2.0 * pi * std::sqrt(xi)); }

Outcome christoffel_limit(const Potential& V, double shift) {
  const std::vector<double> xi{0.5 + shift, 1.0 + shift, 2.0 + shift, 4.0 + shift};
  auto fmu = [&](double x) { return 1.0 / (pi * std::sqrt(x - shift)); };
  auto fE = [&](double x) { return free_fE(x - shift); };
  const ChristoffelSweep s = christoffel_sweep(V, xi, {500.0}, fmu, fE, 0);
  return {s.sup_deviation[0] <= 0.02, fmt("sup |L lambda_L - 2| = %.3e at L = 500 (limit 0.02)", s.sup_deviation[0])};
}

Outcome c1() { return christoffel_limit(Potential::zero(), 0.0); }
Outcome c2() { return christoffel_limit(Potential::constant(3.0), 3.0); }

Outcome c3() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const Potential pots[] = {Potential::zero(), Potential::constant(2.0), Potential::oscillating_example()};
  auto disk = [&] { return std::polar(50.0 * std::sqrt(U(rng)), 2.0 * pi * U(rng)); };
  double worst = 0.0;
  int n = 0;
  while (n < 100) {
    const double L = 20.0 * U(rng) + 1e-3;
    const cplx z = disk(), w = disk();
    if (std::abs(std::conj(w) - z) < 1e-3) continue;
    const Potential& V = pots[n % 3];
    const cplx q = kernel_quadrature(V, L, z, w).value;
    const cplx b = kernel_boundary(V, L, z, w).value;
    const cplx j = kernel_via_jform(V, L, z, w);
    const double scale = std::max({std::abs(q), std::abs(b), std::abs(j)});
    worst = std::max(worst, std::max({std::abs(q - b), std::abs(q - j), std::abs(b - j)}) / scale);
    ++n;
  }
  return {worst <= 1e-8, fmt("100 tuples, max pairwise relative difference %.3e (limit 1e-8)", worst)};
}

Outcome c4() {
  double worst_kernel = 0.0, worst_peak = 0.0;
  for (auto [d0, xi0] : {std::pair{0.0, 1.0}, std::pair{3.0, 7.5}}) {
    const ExtremalFunction F = make_extremal_function(d0, xi0);
    const Potential V = Potential::constant(d0);
    for (int i = 0; i < 50; ++i) {
      const cplx z(d0 - 10.0 + 40.0 * i / 49.0, 3.0 * std::sin(1.3 * i));
      const cplx f = F(z);
      const cplx k = kernel_boundary(V, F.c, z, xi0).value;
      worst_kernel = std::max(worst_kernel, std::abs(f - 2.0 * k) / std::max(1.0, std::abs(f)));
    }
    const double peak = F(xi0).real();
    for (int i = 0; i <= 100000; ++i) {
      const double xi = d0 + 100.0 * i / 100000.0;
      worst_peak = std::max(worst_peak, std::abs(F(xi)) / peak - 1.0);
    }
  }
  const bool ok = worst_kernel <= 1e-10 && worst_peak <= 1e-12;
  return {ok, fmt("|F_c - 2K| rel %.3e (limit 1e-10); max |F_c|/F_c(xi0) - 1 = %.3e (limit 1e-12)", worst_kernel,
                  worst_peak)};
}

Outcome c5() {
  const FiniteGapSet half = solve_critical_points({0.0, {}, {}});
  double dens = 0.0;
  for (int i = 1; i <= 40; ++i) {
    const double xi = 0.05 * i * i;
    dens = std::max(dens, std::abs(martin_density(half, xi) - 1.0 / (2.0 * pi * std::sqrt(xi))));
  }
  const MartinData one = martin_data({0.0, {{1.0, 2.0}}, {}});
  double fmin = INFINITY;
  for (int i = 1; i < 200; ++i) {
    const double xi = i < 100 ? i / 100.0 : 2.0 + (i - 99) * 0.25;
    fmin = std::min(fmin, martin_density(one.set, xi));
  }
  const double aE = asymptotic_aE(solve_critical_points({5.0, {}, {}})).a_E;
  const bool ok = dens <= 1e-10 && std::abs(one.gap_residuals[0]) <= 1e-10 && fmin > 0.0 &&
                  one.normalization_residual <= 1e-3 && std::abs(aE - 5.0) <= 1e-3;
  return {ok, "g=0 density err " + fmt("%.2e", dens) + ", gap residual " + fmt("%.2e", std::abs(one.gap_residuals[0])) +
                  ", min f_E on bands " + fmt("%.3e", fmin) + ", normalization " +
                  fmt("%.2e", one.normalization_residual) + ", a_E([5,inf)) = " + fmt("%.9f", aE)};
}

Outcome c6() {
  const FiniteGapSet E1 = solve_critical_points({0.0, {{1.0, 2.0}}, {}});
  const FiniteGapSet E2 = solve_critical_points({0.0, {}, {}});
  double worst = -INFINITY;
  for (int i = 0; i < 20; ++i) {
    const double xi = 0.2 + 0.6 * i / 19.0;
    worst = std::max(worst, martin_density(E2, xi) - martin_density(E1, xi));
  }
  return {worst <= 1e-10, fmt("max f_E2 - f_E1 over 20 points = %.3e (must be <= 1e-10)", worst)};
}

Outcome c7() {
  const UniversalityGrid a = universality_grid(Potential::zero(), 500.0, 1.0, 2.0, 21, free_fE(1.0), 0);
  const UniversalityGrid b = universality_grid(Potential::zero(), 1000.0, 1.0, 2.0, 21, free_fE(1.0), 0);
  return {a.sup_deviation <= 0.05 && b.sup_deviation < a.sup_deviation,
          fmt("sup deviation %.3e at L = 500 (limit 0.05), %.3e at L = 1000", a.sup_deviation, b.sup_deviation)};
}

Outcome c8() {
  const double L = 200.0;
  const ClockSpacing c = clock_spacing_check(Potential::zero(), L, 1.0, -5, 5, free_fE);
  double closed = 0.0, unit = 0.0;
  for (std::size_t i = 0; i < c.values.size(); ++i) {
    const double k = std::round(std::sqrt(c.left[i]) * L / pi);
    closed = std::max(closed, std::abs(c.values[i] - (2.0 * k + 1.0) / (2.0 * k)));
    unit = std::max(unit, std::abs(c.values[i] - 1.0));
  }
  const SpectrumSlice s = truncation_spectrum(Potential::zero(), L, 0.5, 2.0, false);
  const bool ok = closed <= 1e-9 && unit <= 0.01 && c.interlacing_ok && s.interlacing_ok;
  return {ok, fmt("max |spacing - (2k+1)/(2k)| = %.2e, max |spacing - 1| = %.3e, ", closed, unit) +
                  "interlacing " + (c.interlacing_ok && s.interlacing_ok ? "ok" : "broken") + " over " +
                  std::to_string(s.eigenvalues.size()) + " eigenvalues"};
}

Outcome c9() {
  const SpectrumSlice s = truncation_spectrum(Potential::zero(), 200.0, 0.5, 4.0, false);
  const FiniteGapSet E = solve_critical_points({0.0, {}, {}});
  std::vector<double> bins;
  for (int i = 0; i <= 7; ++i) bins.push_back(0.5 + 0.5 * i);
  const CountingTable t = counting_measure_compare(s, E, bins);
  return {t.total_variation <= 0.05, fmt("total variation %.3e over 7 bins (limit 0.05)", t.total_variation)};
}

Outcome c10() {
  const Potential V = Potential::oscillating_example();
  const double aE = asymptotic_aE(solve_critical_points({0.0, {}, {}})).a_E;
  const double mean = cesaro_mean(V, 1000.0);
  std::vector<double> x;
  for (int i = 0; i <= 100; ++i) x.push_back(100.0 + i);
  const auto rates = growth_rate(V, 2.0, x);
  const double worst = *std::max_element(rates.begin(), rates.end());
  const bool ok = std::abs(mean - aE) <= 0.02 && worst <= 0.05;
  return {ok, fmt("|Cesaro mean(1000) - a_E| = %.3e (limit 0.02), max (1/x) log|v| on [100,200] = %.3e (limit 0.05)",
                  std::abs(mean - aE), worst)};
}

Outcome c11() {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const Potential pots[] = {Potential::zero(),
                            Potential::constant(-1.0),
                            Potential::oscillating_example(),
                            Potential::piecewise({0.0, 0.7, 2.2}, {3.0, -4.0, 1.0}),
                            Potential::periodic_samples(1.0, {1.0, -1.0}),
                            Potential::periodic_trig(1.0, 0.2, {1.0}, {0.5})};
  constexpr int per_property = 150;
  int cases = 0;
  int wronskian = 0, jmono = 0, herglotz = 0, hb = 0;
  for (int i = 0; i < per_property; ++i) {
    const Potential& V = pots[i % 6];
    const cplx z(-10.0 + 40.0 * U(rng), -4.0 + 8.0 * U(rng));
    const double x = 0.1 + 8.0 * U(rng);
    const SolutionFrame f = integrate_frame(V, z, x, 1e-12);
    const double scale = std::max(1.0, std::abs(f.v) * std::abs(f.du));
    if (!(std::abs(f.wronskian() - 1.0) <= 1e-9 * scale)) ++wronskian;
    ++cases;
  }
  for (int i = 0; i < per_property; ++i) {
    const Potential& V = pots[i % 6];
    const cplx z(-10.0 + 40.0 * U(rng), 3.0 * U(rng));
    const double x1 = 4.0 * U(rng), x2 = x1 + 4.0 * U(rng);
    const JForm j = j_form(V, z, x1, x2);
    if (!(j.min_eigenvalue() >= -1e-10 * std::max(1.0, max_abs(j.matrix)))) ++jmono;
    ++cases;
  }
  for (int i = 0; i < per_property; ++i) {
    const Potential& V = pots[i % 6];
    const cplx z(-5.0 + 25.0 * U(rng), 0.05 + 3.0 * U(rng));
    if (!(m_function(V, z).imag() > 0.0)) ++herglotz;
    ++cases;
  }
  for (int i = 0; i < per_property; ++i) {
    const Potential& V = pots[i % 6];
    const double L = 0.1 + 10.0 * U(rng);
    const cplx z(-10.0 + 40.0 * U(rng), 1e-3 + 4.0 * U(rng));
    if (!hb_check_report(V, L, {z}).ok) ++hb;
    ++cases;
  }
  const int violations = wronskian + jmono + herglotz + hb;
  return {violations == 0 && cases >= 500,
          std::to_string(cases) + " cases; violations: Wronskian " + std::to_string(wronskian) + ", j-monotonicity " +
              std::to_string(jmono) + ", Herglotz " + std::to_string(herglotz) + ", Hermite-Biehler " +
              std::to_string(hb)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"free Christoffel limit", c1},
      {"constant-shift invariance", c2},
      {"kernel method equivalence", c3},
      {"extremal function closed form", c4},
      {"Martin module", c5},
      {"nested-set monotonicity", c6},
      {"sine-kernel universality", c7},
      {"clock spacing", c8},
      {"counting measure", c9},
      {"regularity diagnostics", c10},
      {"property suites", c11},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s  %2zu %-30s %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
