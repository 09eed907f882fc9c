// Command-line front end: parameter sweeps over the transition ensemble or
// the coupled kicked rotors, analytic prediction curves, histograms, and the
// Lambda calibration utility.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "entrans/dynamics.hpp"
#include "entrans/harness.hpp"
#include "entrans/theory.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;

entrans::harness::SweepConfig load_config(const std::string& path,
                                          std::uint64_t seed, bool seed_set,
                                          int workers, const std::string& out) {
  entrans::harness::SweepConfig cfg = entrans::harness::SweepConfig::parse_file(path);
  if (seed_set) cfg.seed = seed;
  if (workers > 0) cfg.workers = workers;
  if (!out.empty()) cfg.out = out;
  return cfg;
}

int run_sweep_command(const std::string& config_path, std::uint64_t seed, bool seed_set,
                      int workers, const std::string& out, bool require_histograms) {
  entrans::harness::SweepConfig cfg;
  try {
    cfg = load_config(config_path, seed, seed_set, workers, out);
    if (require_histograms && cfg.histograms.empty()) {
      throw entrans::harness::ConfigError(
          "hist: config must request at least one histogram kind");
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  }
  const entrans::harness::TransitionSweepResult result = entrans::harness::run_sweep(cfg);
  entrans::harness::write_outputs(result);
  for (const auto& p : result.points) {
    for (const auto& err : p.errors) std::fprintf(stderr, "point error: %s\n", err.c_str());
  }
  std::printf("sweep: %zu points, %d realizations/point, %.1f s -> %s\n",
              result.points.size(), result.meta.realizations, result.meta.wall_seconds,
              cfg.out.empty() ? "." : cfg.out.c_str());
  if (result.meta.failures > cfg.failure_budget) {
    std::fprintf(stderr, "numerical failures (%ld) exceed budget (%d)\n",
                 result.meta.failures, cfg.failure_budget);
    return kExitNumerical;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"entanglement transition laboratory"};
  app.require_subcommand(1);

  std::string config_path, out;
  std::uint64_t seed = 0;
  int workers = 0;

  auto add_common = [&](CLI::App* cmd, bool config_required) {
    auto* copt = cmd->add_option("--config", config_path, "config file path");
    if (config_required) copt->required();
    cmd->add_option("--seed", seed, "override RNG seed");
    cmd->add_option("--workers", workers, "override worker count");
    cmd->add_option("--out", out, "override output directory");
  };

  CLI::App* sweep = app.add_subcommand("sweep", "run a coupling sweep");
  add_common(sweep, true);

  CLI::App* hist = app.add_subcommand("hist", "run a sweep and write histograms");
  add_common(hist, true);

  CLI::App* predict = app.add_subcommand("predict", "emit analytic prediction curves");
  add_common(predict, true);

  CLI::App* lambda_cmd =
      app.add_subcommand("lambda", "print the transition parameter for a coupling");
  std::string system = "rmt";
  long n_a = 0, n_b = 0, n = 0;
  double epsilon = -1.0, b = -1.0;
  lambda_cmd->add_option("--system", system, "rmt or kicked_rotor");
  lambda_cmd->add_option("--n-a", n_a, "subsystem dimension N_A");
  lambda_cmd->add_option("--n-b", n_b, "subsystem dimension N_B");
  lambda_cmd->add_option("--n", n, "rotor dimension N");
  lambda_cmd->add_option("--epsilon", epsilon, "ensemble coupling strength");
  lambda_cmd->add_option("--b", b, "rotor coupling strength");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (sweep->parsed()) {
      return run_sweep_command(config_path, seed, sweep->count("--seed") > 0, workers,
                               out, false);
    }
    if (hist->parsed()) {
      return run_sweep_command(config_path, seed, hist->count("--seed") > 0, workers,
                               out, true);
    }
    if (predict->parsed()) {
      entrans::harness::SweepConfig cfg;
      try {
        cfg = load_config(config_path, seed, false, workers, out);
      } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
      }
      const auto curves = entrans::harness::emit_predictions(cfg);
      const std::string dir = cfg.out.empty() ? "." : cfg.out;
      std::filesystem::create_directories(dir);
      std::ofstream f(dir + "/predictions.csv", std::ios::binary);
      f << entrans::harness::predictions_csv(curves);
      std::printf("predict: %zu curves -> %s/predictions.csv\n", curves.size(),
                  dir.c_str());
      return kExitOk;
    }
    if (lambda_cmd->parsed()) {
      if (system == "rmt") {
        if (n_a < 2 || n_b < n_a || epsilon < 0) {
          std::fprintf(stderr, "lambda: rmt requires --n-a, --n-b and --epsilon\n");
          return kExitConfig;
        }
        const double l = entrans::theory::lambda_rmt(n_a, n_b, epsilon);
        std::printf("lambda = %.12g\nsqrt_lambda = %.12g\nsmall_eps_approx = %.12g\n",
                    l, std::sqrt(l),
                    entrans::theory::lambda_rmt_small_eps(n_a, n_b, epsilon));
      } else if (system == "kicked_rotor") {
        if (n < 2 || b < 0) {
          std::fprintf(stderr, "lambda: kicked_rotor requires --n and --b\n");
          return kExitConfig;
        }
        entrans::dynamics::KickedRotorParams p;
        p.n = n;
        p.b = b;
        const auto l = entrans::dynamics::lambda_kicked_rotor(p);
        std::printf("lambda = %.12g\nsqrt_lambda = %.12g\nsmall_b_approx = %.12g\n"
                    "small_b_regime = %s\nepsilon_calibration = %.12g\n",
                    l.exact, std::sqrt(l.exact), l.small_b_approx,
                    l.small_b_regime ? "yes" : "no",
                    entrans::dynamics::epsilon_from_b(p));
      } else {
        std::fprintf(stderr, "lambda: unknown system '%s'\n", system.c_str());
        return kExitConfig;
      }
      return kExitOk;
    }
  } catch (const entrans::harness::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumerical;
  }
  return kExitOk;
}
