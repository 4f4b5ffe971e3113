// christoffel_lab: run one experiment from a JSON config and write
// <out>/data/*.csv plus <out>/manifest.json.
//
// exit 0 ok, 1 config or runtime error, 2 threshold breach under --strict

#include <chrono>
#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"

#include "clab/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Christoffel-Darboux kernel experiments for half-line Schrodinger operators"};
  std::string config_path, experiment, out_dir;
  bool strict = false;
  int threads = -1;
  app.add_option("--config", config_path, "experiment config (JSON)")->required();
  app.add_option("--experiment", experiment, "override the config's experiment")
      ->check(CLI::IsMember(clab::harness::experiment_names()));
  app.add_flag("--strict", strict, "exit 2 if any acceptance threshold is breached");
  app.add_option("--out", out_dir, "output directory (overrides the config)");
  app.add_option("--threads", threads, "worker threads, 0 = all cores; falls back to CHRISTOFFEL_LAB_THREADS")
      ->check(CLI::NonNegativeNumber);
  CLI11_PARSE(app, argc, argv);

  if (threads < 0) {
    threads = 0;
    if (const char* env = std::getenv("CHRISTOFFEL_LAB_THREADS")) {
      char* end = nullptr;
      const long v = std::strtol(env, &end, 10);
      if (end == env || *end != '\0' || v < 0) {
        std::cerr << "error: CHRISTOFFEL_LAB_THREADS must be a nonnegative integer, got '" << env << "'\n";
        return 1;
      }
      threads = static_cast<int>(v);
    }
  }
  const unsigned n_threads = clab::resolve_threads(static_cast<unsigned>(threads));

  try {
    clab::harness::Config cfg = clab::harness::load_config(config_path);
    if (!experiment.empty()) cfg.experiment = experiment;
    if (!out_dir.empty()) cfg.output = out_dir;

    const auto t0 = std::chrono::steady_clock::now();
    const clab::harness::RunResult r = clab::harness::run(cfg, n_threads);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    clab::harness::write_artifacts(cfg.output, cfg, r, wall, n_threads);

    std::cout << cfg.experiment << ": " << r.tables.size() << " table(s) written to " << cfg.output << " in "
              << wall << " s\n";
    for (const auto& b : r.breaches) std::cout << "threshold breach: " << b << '\n';
    if (strict && !r.breaches.empty()) return 2;
    return 0;
  } catch (const clab::harness::ConfigError& e) {
    std::cerr << config_path << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
