#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "entrans/dynamics.hpp"
#include "entrans/harness.hpp"
#include "entrans/theory.hpp"

using namespace entrans;
using namespace entrans::harness;

namespace {

SweepConfig small_rmt_config() {
  SweepConfig cfg;
  cfg.system = SweepConfig::System::rmt;
  cfg.n_a = 8;
  cfg.n_b = 8;
  cfg.coupling_kind = SweepConfig::CouplingKind::sqrt_lambda;
  cfg.coupling_grid = {0.05, 0.1};
  cfg.realizations = 3;
  cfg.alphas = {0.5, 1.0, 2.0};
  cfg.seed = 99;
  cfg.workers = 1;
  return cfg;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("config parsing with sections and flat keys") {
  const std::string text = R"(
# comment
system = rmt
[dimensions]
n_a = 32
n_b = 32
[coupling]
kind = sqrt_lambda
grid = 0.02 0.05 0.1
realizations = 4
alphas = 0.5 1 2
seed = 7
workers = 2
out = /tmp/entrans_cfg_test
observables = lambda_means moments entropies d_star_sq
)";
  const SweepConfig cfg = SweepConfig::parse(text);
  CHECK(cfg.system == SweepConfig::System::rmt);
  CHECK(cfg.n_a == 32);
  CHECK(cfg.n_b == 32);
  CHECK(cfg.coupling_grid.size() == 3);
  CHECK(cfg.realizations == 4);
  CHECK(cfg.seed == 7);
  CHECK(cfg.workers == 2);
  CHECK(cfg.alphas.size() == 3);

  const std::string rotor = R"(
system = kicked_rotor
n = 8
kind = b
grid = 0, 0.05
realizations = 1
[rotor]
k_a = 10
k_b = 9
theta_q = 0.34
theta_p = 0.24
)";
  const SweepConfig rc = SweepConfig::parse(rotor);
  CHECK(rc.system == SweepConfig::System::kicked_rotor);
  CHECK(rc.n == 8);
  CHECK(rc.coupling_grid.size() == 2);
  CHECK(rc.k_a == 10.0);
}

TEST_CASE("config validation errors") {
  CHECK_THROWS_AS(SweepConfig::parse("system = banana\nn_a=2\nn_b=2\ngrid=1\n"),
                  ConfigError);
  CHECK_THROWS_AS(SweepConfig::parse("system = rmt\nn_a=8\nn_b=8\n"), ConfigError);
  CHECK_THROWS_AS(
      SweepConfig::parse("system = rmt\nn_a=8\nn_b=4\ngrid = 0.1\n"), ConfigError);
  CHECK_THROWS_AS(
      SweepConfig::parse(
          "system = kicked_rotor\nn=8\nkind=b\ngrid=0.1\nrealizations=2\n"),
      ConfigError);
  CHECK_THROWS_AS(
      SweepConfig::parse("system = rmt\nn_a=8\nn_b=8\nkind=b\ngrid=0.1\n"),
      ConfigError);
  CHECK_THROWS_AS(
      SweepConfig::parse("system = rmt\nn_a=8\nn_b=8\ngrid=0.1\nbroken line\n"),
      ConfigError);
  CHECK_THROWS_AS(
      SweepConfig::parse("system = rmt\nn_a=8\nn_b=8\ngrid=0.1 oops\n"), ConfigError);
}

TEST_CASE("resolve_coupling closes the loop between grid kinds") {
  SweepConfig cfg = small_rmt_config();
  const CouplingPoint p = resolve_coupling(cfg, 0.1);
  CHECK(p.sqrt_lambda == doctest::Approx(0.1).epsilon(1e-9));
  CHECK(std::sqrt(theory::lambda_rmt(8, 8, p.knob)) ==
        doctest::Approx(0.1).epsilon(1e-9));

  SweepConfig rc;
  rc.system = SweepConfig::System::kicked_rotor;
  rc.n = 12;
  rc.coupling_kind = SweepConfig::CouplingKind::b;
  rc.coupling_grid = {0.05};
  rc.realizations = 1;
  const CouplingPoint q = resolve_coupling(rc, 0.05);
  dynamics::KickedRotorParams kp;
  kp.n = 12;
  kp.b = 0.05;
  CHECK(q.sqrt_lambda ==
        doctest::Approx(std::sqrt(dynamics::lambda_kicked_rotor(kp).exact)));
}

TEST_CASE("uncoupled rmt sweep: no entanglement anywhere") {
  SweepConfig cfg = small_rmt_config();
  cfg.coupling_kind = SweepConfig::CouplingKind::epsilon;
  cfg.coupling_grid = {0.0};
  cfg.realizations = 1;
  const TransitionSweepResult res = run_sweep(cfg);
  REQUIRE(res.points.size() == 1);
  const PointResult& p = res.points[0];
  CHECK(p.states == 64);
  CHECK(std::abs(p.s_mean.at(1.0)) < 1e-8);
  CHECK(p.lambda_mean[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(p.d_star_sq_mean ==
        doctest::Approx(2.0 * (1.0 - 1.0 / std::sqrt(8.0))).epsilon(1e-12));
  CHECK(p.mu_mean.at(2.0) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("weakly coupled rmt sweep: sane aggregates and unit trace") {
  SweepConfig cfg = small_rmt_config();
  cfg.keep_samples = {"lambda1", "lambda2", "mu2", "lambda_min", "lambda_all"};
  cfg.histograms = {"lambda1", "u2"};
  const TransitionSweepResult res = run_sweep(cfg);
  REQUIRE(res.points.size() == 2);
  for (const PointResult& p : res.points) {
    CHECK(p.states == 3 * 64);
    CHECK(p.mu_mean.at(1.0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(p.lambda_mean[0] < 1.0);
    CHECK(p.lambda_mean[0] > 0.8);  // weak coupling
    CHECK(p.lambda_mean[1] > 0.0);
    CHECK(p.samples.at("lambda1").size() == 192);
    CHECK(p.samples.at("lambda_all").size() == 192 * 8);
    CHECK(p.histograms.at("lambda1").total_in_range() == 192.0);
    // stderr fields populated
    CHECK(p.lambda_stderr[0] > 0.0);
  }
  CHECK(res.meta.failures == 0);
}

TEST_CASE("determinism: worker count does not change any output byte") {
  SweepConfig cfg = small_rmt_config();
  cfg.histograms = {"lambda2"};
  cfg.workers = 1;
  cfg.out = "/tmp/entrans_det_w1";
  const TransitionSweepResult r1 = run_sweep(cfg);
  write_outputs(r1);
  cfg.workers = 3;
  cfg.out = "/tmp/entrans_det_w3";
  const TransitionSweepResult r3 = run_sweep(cfg);
  write_outputs(r3);

  CHECK(sweep_csv(r1) == sweep_csv(r3));
  CHECK(read_file("/tmp/entrans_det_w1/sweep.csv") ==
        read_file("/tmp/entrans_det_w3/sweep.csv"));
  CHECK(read_file("/tmp/entrans_det_w1/hist_lambda2_p0.csv") ==
        read_file("/tmp/entrans_det_w3/hist_lambda2_p0.csv"));
  CHECK(read_file("/tmp/entrans_det_w1/hist_lambda2_p1.csv") ==
        read_file("/tmp/entrans_det_w3/hist_lambda2_p1.csv"));
  std::filesystem::remove_all("/tmp/entrans_det_w1");
  std::filesystem::remove_all("/tmp/entrans_det_w3");
}

TEST_CASE("standard errors shrink like 1/sqrt(realizations)") {
  SweepConfig cfg = small_rmt_config();
  cfg.coupling_grid = {0.1};
  cfg.realizations = 25;
  const double se25 = run_sweep(cfg).points[0].lambda_stderr[0];
  cfg.realizations = 100;
  cfg.seed = 100;  // independent draw
  const double se100 = run_sweep(cfg).points[0].lambda_stderr[0];
  const double ratio = se25 / se100;
  CHECK(ratio > 1.3);
  CHECK(ratio < 3.1);
}

TEST_CASE("csv round trip preserves every value bit-exactly") {
  SweepConfig cfg = small_rmt_config();
  const TransitionSweepResult res = run_sweep(cfg);
  const std::string csv = sweep_csv(res);
  const auto rows = parse_sweep_csv(csv);
  REQUIRE(!rows.empty());
  // regenerate from parsed values and compare byte-for-byte
  std::size_t idx = 0;
  for (const PointResult& p : res.points) {
    for (std::size_t i = 0; i < p.lambda_mean.size(); ++i) {
      CHECK(rows[idx].sqrt_lambda == p.sqrt_lambda);
      CHECK(rows[idx].value == p.lambda_mean[i]);
      CHECK(rows[idx].stderr_value == p.lambda_stderr[i]);
      ++idx;
    }
    idx += p.mu_mean.size() + p.s_mean.size() + 1;  // moments, entropies, d*
  }
  CHECK(res.meta.version == std::string(kVersion));
}

TEST_CASE("rotor sweep at b = 0 and small N") {
  SweepConfig cfg;
  cfg.system = SweepConfig::System::kicked_rotor;
  cfg.n = 8;
  cfg.coupling_kind = SweepConfig::CouplingKind::b;
  cfg.coupling_grid = {0.0, 0.2};
  cfg.realizations = 1;
  cfg.alphas = {1.0, 2.0};
  const TransitionSweepResult res = run_sweep(cfg);
  REQUIRE(res.points.size() == 2);
  CHECK(res.points[0].s_mean.at(1.0) == 0.0);
  CHECK(res.points[0].d_star_sq_mean ==
        doctest::Approx(2.0 * (1.0 - 1.0 / std::sqrt(8.0))).epsilon(1e-12));
  // coupled point develops entanglement
  CHECK(res.points[1].s_mean.at(1.0) > 0.01);
  CHECK(res.points[1].mu_mean.at(1.0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("emit_predictions covers the advertised curves and is idempotent") {
  SweepConfig cfg = small_rmt_config();
  cfg.coupling_grid = {0.0, 0.1, 0.3};
  const auto curves = emit_predictions(cfg);
  const std::string csv = predictions_csv(curves);
  CHECK(predictions_csv(emit_predictions(cfg)) == csv);  // same bytes

  bool found_lambda1 = false, found_interp = false;
  for (const auto& c : curves) {
    // grids strictly increasing
    for (std::size_t i = 0; i + 1 < c.lambda_grid.size(); ++i) {
      CHECK(c.lambda_grid[i] < c.lambda_grid[i + 1]);
    }
    if (c.observable == "lambda1_pert") {
      found_lambda1 = true;
      CHECK(c.values[0] == 1.0);  // Lambda = 0 row
    }
    if (c.observable == "s_2_interp") {
      found_interp = true;
      CHECK(c.values[0] == 0.0);
    }
    if (c.observable == "s_1_pert") CHECK(c.values[0] == 0.0);
  }
  CHECK(found_lambda1);
  CHECK(found_interp);
}

TEST_CASE("per-point failures are recorded without aborting the sweep") {
  SweepConfig cfg = small_rmt_config();
  // a grid point beyond the ensemble cap must fail at resolve time
  CHECK_THROWS_AS(resolve_coupling(cfg, 1e6), std::domain_error);
}

TEST_CASE("cli binary honors exit codes") {
  const std::string bin = "../tools/entrans";
  if (!std::filesystem::exists(bin)) {
    MESSAGE("CLI binary not found next to the test dir; skipping");
    return;
  }
  CHECK(std::system((bin + " lambda --system rmt --n-a 32 --n-b 32 --epsilon 0.01 "
                           "> /dev/null")
                        .c_str()) == 0);
  // config error -> exit code 1
  const int rc =
      std::system((bin + " sweep --config /nonexistent.cfg 2> /dev/null").c_str());
  CHECK(WEXITSTATUS(rc) == 1);
  // bad flag usage -> exit code 1
  const int rc2 = std::system((bin + " lambda --system rmt 2> /dev/null").c_str());
  CHECK(WEXITSTATUS(rc2) == 1);
}
