#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "vdbtherm/cli/config.hpp"
#include "vdbtherm/cli/runner.hpp"
#include "vdbtherm/errors.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 1;

}  // namespace

int main(int argc, char** argv) {
  using namespace vdbtherm::cli;

  CLI::App app{"Thermalization regimes of a three-dot ring coupled to a 1D gas"};
  std::string config_path;
  std::string mode;
  std::string out_dir;
  std::optional<int> threads;
  std::optional<double> tol;
  std::optional<unsigned long long> seed;
  app.add_option("--config", config_path, "Experiment config (key = value, [sections])")
      ->required();
  app.add_option("--mode", mode,
                 "Override the mode: single, trajectory, freq_curve, phase_diagram, tep_scan, "
                 "lowT_scan, bound_scan");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--threads", threads, "Worker threads, 0 = one per hardware thread");
  app.add_option("--tol", tol, "Relative quadrature tolerance per rate");
  app.add_option("--seed", seed, "RNG seed recorded with the run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  ExperimentConfig cfg;
  int nthreads = 1;
  try {
    cfg = load_config(config_path);
    if (!mode.empty()) {
      auto m = parse_mode(mode);
      if (!m) throw ConfigError("--mode", 0, "unknown mode '" + mode + "'");
      cfg.mode = *m;
    }
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (tol) cfg.rate_tol = *tol;
    if (seed) cfg.seed = *seed;
    cfg.validate(config_path);
    nthreads = resolve_threads(threads, cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    std::vector<std::string> notes;
    const auto path = run(cfg, nthreads, &notes);
    for (const auto& n : notes) std::cout << n << '\n';
    std::cout << "wrote " << path.string() << '\n';
  } catch (const NumericalFailure& e) {
    std::cerr << e.what() << '\n';
    return kExitNumerical;
  } catch (const vdbtherm::Error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return 0;
}
