#pragma once

// Experiment runner behind the christoffel_lab tool: JSON config in, CSV
// tables and a manifest out. Data files carry no timing information, and
// every sweep assembles results in input order, so reruns are byte-identical
// for any thread count.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "clab/asymptotics.hpp"
#include "clab/canonical.hpp"
#include "clab/cd_kernel.hpp"
#include "clab/martin.hpp"
#include "clab/parallel.hpp"
#include "clab/potential.hpp"
#include "clab/schrodinger.hpp"
#include "clab/weyl.hpp"

namespace clab::harness {

using json = nlohmann::ordered_json;

inline constexpr const char* version = "0.1.0";

class ConfigError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Config

struct Config {
  json raw;
  std::string text;
  std::string experiment;
  Potential potential;
  FiniteGapSet set;
  std::string set_source;  // "config", "default" or "from_floquet"
  json grids = json::object();
  std::map<std::string, double> tolerances;
  std::string output = "out";
};

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> n{"christoffel", "universality", "clock", "martin", "kernel", "regularity"};
  return n;
}

namespace detail {

inline std::pair<std::size_t, std::size_t> line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

// Best-effort source line for a field path: each object key is searched for
// after the previous one.
inline std::size_t field_line(const std::string& text, const std::vector<std::string>& keys) {
  std::size_t pos = 0;
  bool found = false;
  for (const auto& k : keys) {
    if (k.empty() || k[0] == '[') continue;
    const std::size_t p = text.find("\"" + k + "\"", pos);
    if (p == std::string::npos) break;
    pos = p;
    found = true;
  }
  return found ? line_col(text, pos).first : 0;
}

class Reader {
 public:
  explicit Reader(const std::string& text) : text_(text) {}

  [[noreturn]] void fail(const std::vector<std::string>& path, const std::string& msg) const {
    std::string p;
    for (const auto& k : path) p += (k[0] == '[' || p.empty()) ? k : "." + k;
    const std::size_t line = field_line(text_, path);
    throw ConfigError((line ? "line " + std::to_string(line) + ", " : std::string()) + "field '" + p + "': " + msg);
  }

  const json& member(const json& obj, const std::vector<std::string>& path, const std::string& key) const {
    auto it = obj.find(key);
    if (it == obj.end()) fail(with(path, key), "missing");
    return *it;
  }

  double number(const json& v, const std::vector<std::string>& path) const {
    if (!v.is_number()) fail(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(path, "must be finite");
    return x;
  }

  double number_at(const json& obj, const std::vector<std::string>& path, const std::string& key) const {
    return number(member(obj, path, key), with(path, key));
  }

  double number_or(const json& obj, const std::vector<std::string>& path, const std::string& key, double d) const {
    return obj.contains(key) ? number_at(obj, path, key) : d;
  }

  std::vector<double> numbers(const json& v, const std::vector<std::string>& path) const {
    if (!v.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], with(path, "[" + std::to_string(i) + "]")));
    return out;
  }

  // Either [x0, x1, ...] or {"lo": a, "hi": b, "n": n}, the latter equispaced
  // with both ends included.
  std::vector<double> grid(const json& v, const std::vector<std::string>& path) const {
    if (v.is_array()) {
      auto g = numbers(v, path);
      if (g.empty()) fail(path, "grid is empty");
      return g;
    }
    if (!v.is_object()) fail(path, "expected a list or {lo, hi, n}");
    const double lo = number_at(v, path, "lo"), hi = number_at(v, path, "hi");
    const double nd = number_at(v, path, "n");
    if (nd < 1 || nd != std::floor(nd)) fail(with(path, "n"), "must be a positive integer");
    const int n = static_cast<int>(nd);
    if (n > 1 && !(hi > lo)) fail(path, "hi must exceed lo");
    std::vector<double> g;
    for (int i = 0; i < n; ++i) g.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
    return g;
  }

  static std::vector<std::string> with(std::vector<std::string> p, const std::string& k) {
    p.push_back(k);
    return p;
  }

 private:
  const std::string& text_;
};

inline Potential parse_potential(const Reader& r, const json& p) {
  const std::vector<std::string> path{"potential"};
  if (!p.is_object()) r.fail(path, "expected an object with a \"type\"");
  const json& t = r.member(p, path, "type");
  if (!t.is_string()) r.fail(Reader::with(path, "type"), "expected a string");
  const std::string type = t.get<std::string>();
  try {
    if (type == "zero") return Potential::zero();
    if (type == "constant") return Potential::constant(r.number_at(p, path, "value"));
    if (type == "oscillating_example") return Potential::oscillating_example();
    if (type == "piecewise")
      return Potential::piecewise(r.numbers(r.member(p, path, "breakpoints"), Reader::with(path, "breakpoints")),
                                  r.numbers(r.member(p, path, "values"), Reader::with(path, "values")));
    if (type == "grid")
      return Potential::grid(r.number_at(p, path, "step"),
                             r.numbers(r.member(p, path, "values"), Reader::with(path, "values")));
    if (type == "periodic") {
      const double period = r.number_at(p, path, "period");
      if (p.contains("samples"))
        return Potential::periodic_samples(period, r.numbers(p["samples"], Reader::with(path, "samples")));
      std::vector<double> cs, sn;
      if (p.contains("cos")) cs = r.numbers(p["cos"], Reader::with(path, "cos"));
      if (p.contains("sin")) sn = r.numbers(p["sin"], Reader::with(path, "sin"));
      return Potential::periodic_trig(period, r.number_or(p, path, "offset", 0.0), cs, sn);
    }
  } catch (const DomainError& e) {
    r.fail(path, e.what());
  }
  r.fail(Reader::with(path, "type"),
         "unknown type '" + type + "' (zero, constant, piecewise, periodic, oscillating_example, grid)");
}

inline FiniteGapSet parse_set(const Reader& r, const json& s) {
  const std::vector<std::string> path{"set"};
  if (!s.is_object()) r.fail(path, "expected {b0, gaps} or \"from_floquet\"");
  FiniteGapSet set;
  set.b0 = r.number_at(s, path, "b0");
  if (s.contains("gaps")) {
    const json& g = s["gaps"];
    if (!g.is_array()) r.fail(Reader::with(path, "gaps"), "expected an array of [a, b] pairs");
    for (std::size_t j = 0; j < g.size(); ++j) {
      const auto p = Reader::with(Reader::with(path, "gaps"), "[" + std::to_string(j) + "]");
      const auto pair = r.numbers(g[j], p);
      if (pair.size() != 2) r.fail(p, "expected [a, b]");
      set.gaps.emplace_back(pair[0], pair[1]);
    }
  }
  try {
    set.validate();
  } catch (const DomainError& e) {
    r.fail(Reader::with(path, "gaps"), e.what());
  }
  return set;
}

}  // namespace detail

/// Parses and validates a config document. Throws ConfigError with a line
/// number (syntax) or a field path (content).
inline Config parse_config(const std::string& text) {
  Config c;
  c.text = text;
  try {
    c.raw = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = detail::line_col(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ConfigError("line " + std::to_string(line) + ", column " + std::to_string(col) + ": syntax error: " +
                      e.what());
  }
  const detail::Reader r(c.text);
  if (!c.raw.is_object()) throw ConfigError("line 1: top level must be an object");
  static const std::vector<std::string> known{"experiment", "potential", "set", "grids", "tolerances", "output"};
  for (const auto& [k, v] : c.raw.items())
    if (std::find(known.begin(), known.end(), k) == known.end()) r.fail({k}, "unknown key");

  if (c.raw.contains("experiment")) {
    if (!c.raw["experiment"].is_string()) r.fail({"experiment"}, "expected a string");
    c.experiment = c.raw["experiment"].get<std::string>();
  }
  c.potential = detail::parse_potential(r, r.member(c.raw, {}, "potential"));

  if (c.raw.contains("grids")) {
    c.grids = c.raw["grids"];
    if (!c.grids.is_object()) r.fail({"grids"}, "expected an object");
  }
  if (c.raw.contains("set") && c.raw["set"].is_string()) {
    if (c.raw["set"] != "from_floquet") r.fail({"set"}, "the only string form is \"from_floquet\"");
    if (!c.potential.period()) r.fail({"set"}, "from_floquet needs a periodic potential");
    const auto win = r.numbers(r.member(c.grids, {"grids"}, "floquet_window"), {"grids", "floquet_window"});
    if (win.size() != 2 || !(win[1] > win[0])) r.fail({"grids", "floquet_window"}, "expected [lo, hi] with lo < hi");
    const double ng = r.number_or(c.grids, {"grids"}, "n_gaps", 4.0);
    if (ng < 0 || ng != std::floor(ng)) r.fail({"grids", "n_gaps"}, "must be a nonnegative integer");
    const FloquetBands fb = floquet_bands(c.potential, win[0], win[1], static_cast<int>(ng));
    if (!fb.set.gaps.empty() || !fb.edges.empty()) {
      c.set = fb.set;
    } else {
      r.fail({"grids", "floquet_window"}, "no band edge found in the window");
    }
    c.set_source = "from_floquet";
  } else if (c.raw.contains("set")) {
    c.set = detail::parse_set(r, c.raw["set"]);
    c.set_source = "config";
  } else if (auto t = c.potential.constant_tail(); t && t->first == 0.0) {
    c.set.b0 = t->second;
    c.set_source = "default";
  } else {
    c.set_source = "none";
  }

  if (c.raw.contains("tolerances")) {
    const json& t = c.raw["tolerances"];
    if (!t.is_object()) r.fail({"tolerances"}, "expected an object of named positive numbers");
    for (const auto& [k, v] : t.items()) {
      const double x = r.number(v, {"tolerances", k});
      if (!(x > 0.0)) r.fail({"tolerances", k}, "must be positive");
      c.tolerances[k] = x;
    }
  }
  if (c.raw.contains("output")) {
    if (!c.raw["output"].is_string() || c.raw["output"].get<std::string>().empty())
      r.fail({"output"}, "expected a nonempty path");
    c.output = c.raw["output"].get<std::string>();
  }
  return c;
}

inline Config load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

// ---------------------------------------------------------------------------
// Tables

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// Header row, then one line per row, every value as %.17g.
inline std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.header.size(); ++i) out += (i ? "," : "") + t.header[i];
  out += '\n';
  char buf[32];
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", row[i]);
      if (i) out += ',';
      out += buf;
    }
    out += '\n';
  }
  return out;
}

struct RunResult {
  std::map<std::string, Table> tables;  // file stem -> table
  json summary = json::object();
  std::map<std::string, double> tolerances;  // every tolerance consulted
  std::vector<std::string> breaches;
};

// ---------------------------------------------------------------------------
// Experiments

namespace detail {

class Run {
 public:
  Run(const Config& c, unsigned threads) : c_(c), r_(c.text), threads_(threads) {}

  double tol(const std::string& name, double fallback) {
    auto it = c_.tolerances.find(name);
    const double v = it == c_.tolerances.end() ? fallback : it->second;
    out.tolerances[name] = v;
    return v;
  }

  void check(const std::string& what, double value, double limit) {
    if (!(value <= limit)) out.breaches.push_back(what + " = " + json(value).dump() + " exceeds " + json(limit).dump());
  }

  std::vector<double> grid(const std::string& key) const {
    return r_.grid(r_.member(c_.grids, {"grids"}, key), {"grids", key});
  }
  std::vector<double> grid_or(const std::string& key, std::vector<double> d) const {
    return c_.grids.contains(key) ? grid(key) : d;
  }
  double scalar(const std::string& key) const { return r_.number_at(c_.grids, {"grids"}, key); }
  double scalar_or(const std::string& key, double d) const { return r_.number_or(c_.grids, {"grids"}, key, d); }
  int integer_or(const std::string& key, int d, int min) const {
    const double v = scalar_or(key, d);
    if (v != std::floor(v) || v < min) r_.fail({"grids", key}, "must be an integer >= " + std::to_string(min));
    return static_cast<int>(v);
  }
  std::vector<double> positive_increasing(const std::string& key) const {
    auto g = grid(key);
    for (std::size_t i = 0; i < g.size(); ++i)
      if (!(g[i] > 0.0) || (i && !(g[i] > g[i - 1]))) r_.fail({"grids", key}, "must be positive and increasing");
    return g;
  }

  const FiniteGapSet& set() {
    if (c_.set_source == "none") r_.fail({"set"}, "this potential needs an explicit set");
    if (!solved_) {
      const double t = tol("critical_point", 1e-12);
      md_ = martin_data(c_.set, t);
      solved_ = true;
      json s;
      s["b0"] = md_.set.b0;
      s["gaps"] = json::array();
      for (const auto& [a, b] : md_.set.gaps) s["gaps"].push_back({a, b});
      s["c"] = md_.set.c;
      s["source"] = c_.set_source;
      s["a_E"] = md_.a_E;
      s["a_E_closed_form"] = aE_closed_form(md_.set);
      s["gap_residuals"] = md_.gap_residuals;
      s["normalization_residual"] = md_.normalization_residual;
      out.summary["set"] = s;
    }
    return md_.set;
  }
  const MartinData& martin() {
    set();
    return md_;
  }

  double f_E(double xi) { return martin_density(set(), xi); }

  // Exact boundary value for constant tails, ladder extrapolation otherwise.
  double f_mu(double xi) {
    if (auto t = c_.potential.constant_tail(); t && xi > t->second) return spectral_density_tail(c_.potential, xi);
    const SpectralDensity s = spectral_density(c_.potential, xi, default_eps_ladder(), MMethod::Auto,
                                               tol("edge_exclusion", 1e-3));
    ladder_residual_ = std::max(ladder_residual_, s.extrapolation_residual);
    return s.f_mu;
  }

  void christoffel() {
    const auto xi = grid("xi");
    const auto L = positive_increasing("L");
    const double limit = tol("christoffel_deviation", 0.02);
    tol("kernel_quadrature", 1e-12);
    std::vector<double> fmu, fe;
    for (double x : xi) {
      if (!set().in_band_interior(x)) r_.fail({"grids", "xi"}, "xi = " + json(x).dump() + " is not inside a band");
      fmu.push_back(f_mu(x));
      fe.push_back(f_E(x));
    }
    auto lookup = [&](const std::vector<double>& v) {
      return [&xi, p = &v](double x) { return (*p)[std::find(xi.begin(), xi.end(), x) - xi.begin()]; };
    };
    const ChristoffelSweep s = christoffel_sweep(c_.potential, xi, L, lookup(fmu), lookup(fe), threads_);
    Table t{{"xi", "L", "L_lambda", "reference", "deviation"}, {}};
    for (const auto& row : s.rows) t.rows.push_back({row.xi, row.L, row.L_lambda, row.reference, row.deviation});
    out.tables["christoffel"] = t;
    out.summary["sup_deviation_by_L"] = json::object();
    for (std::size_t i = 0; i < L.size(); ++i) out.summary["sup_deviation_by_L"][json(L[i]).dump()] = s.sup_deviation[i];
    if (ladder_residual_ > 0.0) out.summary["f_mu_extrapolation_residual"] = ladder_residual_;
    check("sup deviation at L = " + json(L.back()).dump(), s.sup_deviation.back(), limit);
  }

  void universality() {
    const double xi = scalar("xi");
    const auto L = positive_increasing("L");
    const double hw = scalar_or("halfwidth", 2.0);
    const int n = integer_or("n", 21, 3);
    const double limit = tol("universality_deviation", 0.05);
    tol("kernel_quadrature", 1e-12);
    if (!set().in_band_interior(xi)) r_.fail({"grids", "xi"}, "xi is not inside a band");
    const double fe = f_E(xi);
    out.summary["f_E"] = fe;
    json dev = json::object();
    std::vector<double> sups;
    for (double l : L) {
      const UniversalityGrid g = universality_grid(c_.potential, l, xi, hw, n, fe, threads_);
      Table t{{"z", "w", "ratio_re", "ratio_im", "sinc", "deviation"}, {}};
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          t.rows.push_back({g.z_grid[i].real(), g.w_grid[j].real(), g.ratio[i][j].real(), g.ratio[i][j].imag(),
                            g.sinc_ref[i][j].real(), std::abs(g.ratio[i][j] - g.sinc_ref[i][j])});
      std::ostringstream name;
      name << "universality_L" << l;
      out.tables[name.str()] = t;
      dev[json(l).dump()] = {{"sup_deviation", g.sup_deviation}, {"hermitian_defect", g.hermitian_defect}};
      sups.push_back(g.sup_deviation);
    }
    out.summary["by_L"] = dev;
    check("sup deviation at L = " + json(L.back()).dump(), sups.back(), limit);
    for (std::size_t i = 1; i < sups.size(); ++i)
      if (!(sups[i] < sups[i - 1]))
        out.breaches.push_back("deviation does not decrease from L = " + json(L[i - 1]).dump() + " to " +
                               json(L[i]).dump());
  }

  void clock() {
    const double xi = scalar("xi");
    const auto L = positive_increasing("L");
    const auto j = r_.numbers(c_.grids.value("j", json::array({-3, 3})), {"grids", "j"});
    if (j.size() != 2 || j[0] > j[1] || j[0] != std::floor(j[0]) || j[1] != std::floor(j[1]))
      r_.fail({"grids", "j"}, "expected [j_lo, j_hi] integers with j_lo <= j_hi");
    const double limit = tol("clock_spacing", 0.01);
    if (!set().in_band_interior(xi)) r_.fail({"grids", "xi"}, "xi is not inside a band");
    auto fe = [&](double x) { return f_E(x); };
    Table t{{"L", "j", "xi_j", "xi_j1", "spacing", "deviation"}, {}};
    double last = 0.0;
    bool interlacing = true;
    for (double l : L) {
      const ClockSpacing cs =
          clock_spacing_check(c_.potential, l, xi, static_cast<int>(j[0]), static_cast<int>(j[1]), fe);
      interlacing = interlacing && cs.interlacing_ok;
      last = 0.0;
      for (std::size_t i = 0; i < cs.values.size(); ++i) {
        t.rows.push_back({l, static_cast<double>(cs.j[i]), cs.left[i], cs.right[i], cs.values[i],
                          std::abs(cs.values[i] - 1.0)});
        last = std::max(last, std::abs(cs.values[i] - 1.0));
      }
    }
    out.tables["clock"] = t;
    out.summary["interlacing_ok"] = interlacing;
    out.summary["sup_deviation_at_largest_L"] = last;
    check("clock spacing deviation at L = " + json(L.back()).dump(), last, limit);
    if (!interlacing) out.breaches.push_back("eigenvalue/zero interlacing failed");
  }

  void martin_exp() {
    const MartinData& m = martin();
    const double res_limit = tol("gap_residual", 1e-10);
    const double norm_limit = tol("normalization", 1e-3);
    const auto xi = grid("xi");
    Table t{{"xi", "f_E", "M_E"}, {}};
    for (double x : xi) {
      const double fe = m.set.in_band_interior(x) ? martin_density(m.set, x) : 0.0;
      t.rows.push_back({x, fe, martin_function(m.set, x)});
    }
    out.tables["martin"] = t;
    double worst = 0.0;
    for (double g : m.gap_residuals) worst = std::max(worst, std::abs(g));
    check("gap condition residual", worst, res_limit);
    check("normalization residual", m.normalization_residual, norm_limit);
  }

  void kernel() {
    const int samples = integer_or("samples", 100, 1);
    const auto seed = static_cast<std::uint64_t>(integer_or("seed", 1, 0));
    const double L_max = scalar_or("L_max", 20.0), z_max = scalar_or("z_max", 50.0);
    if (!(L_max > 0.0) || !(z_max > 0.0)) r_.fail({"grids"}, "L_max and z_max must be positive");
    const double limit = tol("kernel_relative", 1e-8);
    const double sep = tol("diagonal_separation", 1e-3);
    tol("kernel_quadrature", 1e-12);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    auto disk = [&] {
      const double rad = z_max * std::sqrt(u01(rng)), ang = 2.0 * pi * u01(rng);
      return std::polar(rad, ang);
    };
    struct Tuple {
      double L;
      cplx z, w;
    };
    std::vector<Tuple> tuples;
    while (static_cast<int>(tuples.size()) < samples) {
      const double L = L_max * (0.05 + 0.95 * u01(rng));
      const cplx z = disk(), w = disk();
      if (std::abs(std::conj(w) - z) < sep) continue;
      tuples.push_back({L, z, w});
    }
    const auto& V = c_.potential;
    const auto rows = parallel_map(
        tuples.size(),
        [&](std::size_t i) {
          const auto& tp = tuples[i];
          const cplx q = kernel_quadrature(V, tp.L, tp.z, tp.w).value;
          const cplx b = kernel_boundary(V, tp.L, tp.z, tp.w).value;
          const cplx j = kernel_via_jform(V, tp.L, tp.z, tp.w);
          const double scale = std::max({std::abs(q), std::abs(b), std::abs(j)});
          const double rel = std::max({std::abs(q - b), std::abs(q - j), std::abs(b - j)}) / scale;
          return std::vector<double>{tp.L, tp.z.real(), tp.z.imag(), tp.w.real(), tp.w.imag(), q.real(), q.imag(),
                                     b.real(), b.imag(), j.real(), j.imag(), rel};
        },
        threads_);
    Table t{{"L", "z_re", "z_im", "w_re", "w_im", "quadrature_re", "quadrature_im", "boundary_re", "boundary_im",
             "jform_re", "jform_im", "max_relative_difference"},
            rows};
    double worst = 0.0;
    for (const auto& r : rows) worst = std::max(worst, r.back());
    out.tables["kernel"] = t;
    out.summary["max_relative_difference"] = worst;
    check("kernel method disagreement", worst, limit);
  }

  void regularity() {
    const MartinData& m = martin();
    const auto L = positive_increasing("L");
    const auto x = positive_increasing("x");
    const double xi = scalar("xi");
    const double c_limit = tol("cesaro", 0.02), g_limit = tol("growth", 0.05);
    tol("propagation", 1e-10);
    Table ct{{"L", "cesaro_mean", "a_E", "deviation"}, {}};
    for (double l : L) {
      const double mean = cesaro_mean(c_.potential, l);
      ct.rows.push_back({l, mean, m.a_E, std::abs(mean - m.a_E)});
    }
    const double ME = martin_function(m.set, xi);
    const auto rates = growth_rate(c_.potential, xi, x, 1e-10);
    Table gt{{"x", "growth_rate", "M_E", "excess"}, {}};
    double excess = -INFINITY;
    for (std::size_t i = 0; i < x.size(); ++i) {
      gt.rows.push_back({x[i], rates[i], ME, rates[i] - ME});
      excess = std::max(excess, rates[i] - ME);
    }
    out.tables["cesaro"] = ct;
    out.tables["growth"] = gt;
    out.summary["cesaro_deviation_at_largest_L"] = ct.rows.back()[3];
    out.summary["max_growth_excess"] = excess;
    check("Cesaro mean deviation at L = " + json(L.back()).dump(), ct.rows.back()[3], c_limit);
    check("growth rate excess over M_E", excess, g_limit);
  }

  RunResult out;

 private:
  const Config& c_;
  Reader r_;
  unsigned threads_;
  MartinData md_;
  bool solved_ = false;
  double ladder_residual_ = 0.0;
};

}  // namespace detail

/// Runs the configured experiment. Config content problems surface as
/// ConfigError; numerical failures propagate as the library's errors.
inline RunResult run(const Config& c, unsigned threads = 1) {
  detail::Run r(c, threads);
  const std::string& e = c.experiment;
  if (e.empty()) detail::Reader(c.text).fail({"experiment"}, "missing (set it in the config or with --experiment)");
  try {
    if (e == "christoffel") {
      r.christoffel();
    } else if (e == "universality") {
      r.universality();
    } else if (e == "clock") {
      r.clock();
    } else if (e == "martin") {
      r.martin_exp();
    } else if (e == "kernel") {
      r.kernel();
    } else if (e == "regularity") {
      r.regularity();
    } else {
      detail::Reader(c.text).fail({"experiment"}, "unknown experiment '" + e +
                                                       "' (christoffel, universality, clock, martin, kernel, regularity)");
    }
  } catch (const json::type_error& err) {
    throw ConfigError(std::string("grids: ") + err.what());
  }
  return std::move(r.out);
}

// ---------------------------------------------------------------------------
// Artifacts

inline std::string compiler_string() {
#if defined(__clang__)
  return "clang " __clang_version__;
#elif defined(__GNUC__)
  return "gcc " __VERSION__;
#else
  return "unknown";
#endif
}

inline json manifest(const Config& c, const RunResult& r, double wall_seconds, unsigned threads) {
  json m;
  m["experiment"] = c.experiment;
  m["config"] = c.raw;
  m["potential"] = c.potential.tag();
  m["versions"] = {{"christoffel_lab", version},
                   {"compiler", compiler_string()},
                   {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                         std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                         std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                   {"cxx_standard", static_cast<long>(__cplusplus)}};
  m["threads"] = threads;
  m["wall_time_seconds"] = wall_seconds;
  m["tolerances"] = r.tolerances;
  m["summary"] = r.summary;
  m["data_files"] = json::array();
  for (const auto& [stem, t] : r.tables) m["data_files"].push_back("data/" + stem + ".csv");
  m["breaches"] = r.breaches;
  return m;
}

inline void write_artifacts(const std::filesystem::path& dir, const Config& c, const RunResult& r, double wall,
                            unsigned threads) {
  std::filesystem::create_directories(dir / "data");
  for (const auto& [stem, t] : r.tables) {
    std::ofstream f(dir / "data" / (stem + ".csv"), std::ios::binary);
    f << to_csv(t);
    if (!f) throw Error("cannot write " + (dir / "data" / (stem + ".csv")).string());
  }
  std::ofstream f(dir / "manifest.json", std::ios::binary);
  f << manifest(c, r, wall, threads).dump(2) << '\n';
  if (!f) throw Error("cannot write " + (dir / "manifest.json").string());
}

}  // namespace clab::harness
