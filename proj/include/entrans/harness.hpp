#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "entrans/distributions.hpp"
#include "entrans/matrix.hpp"
#include "entrans/theory.hpp"

namespace entrans::harness {

inline constexpr const char* kVersion = "entrans 0.1.0";

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SweepConfig {
  enum class System { rmt, kicked_rotor };
  enum class CouplingKind { sqrt_lambda, epsilon, b };

  System system = System::rmt;
  Index n_a = 0;              // rmt dimensions
  Index n_b = 0;
  Index n = 0;                // kicked_rotor dimension per rotor
  CouplingKind coupling_kind = CouplingKind::sqrt_lambda;
  std::vector<double> coupling_grid;
  int realizations = 1;
  std::vector<std::string> observables = {"lambda_means", "moments", "entropies",
                                          "d_star_sq"};
  std::vector<std::string> histograms;    // kinds: lambda1 lambda2 u2 u1 purity_u mp tw_max exp_min
  std::vector<std::string> keep_samples;  // kinds: lambda1 lambda2 mu2 lambda_min lambda_all
  std::vector<double> alphas = {0.5, 1.0, 2.0, 3.0, 4.0};
  std::uint64_t seed = 0;
  std::string out;
  int workers = 0;  // 0: hardware concurrency
  int failure_budget = 0;
  // kicked_rotor parameters
  double k_a = 10.0;
  double k_b = 9.0;
  double theta_q = 0.34;
  double theta_p = 0.24;

  static SweepConfig parse(const std::string& text);
  static SweepConfig parse_file(const std::string& path);
  void validate() const;
  bool wants(const std::string& observable) const;
};

struct PointResult {
  double sqrt_lambda = 0.0;   // actual value from the closed-form calibration
  double coupling = 0.0;      // epsilon or b
  long realizations = 0;
  long states = 0;
  std::vector<double> lambda_mean;    // descending Schmidt levels, first 7
  std::vector<double> lambda_stderr;
  std::map<double, double> mu_mean, mu_stderr;
  std::map<double, double> s_mean, s_stderr;
  double d_star_sq_mean = 0.0;
  double d_star_sq_stderr = 0.0;
  std::map<std::string, distributions::Histogram> histograms;
  std::map<std::string, std::vector<double>> samples;
  std::vector<std::string> errors;
};

struct SweepMetadata {
  std::uint64_t seed = 0;
  int realizations = 0;
  int workers = 0;
  double wall_seconds = 0.0;
  std::string version;
  long failures = 0;
};

struct TransitionSweepResult {
  SweepConfig config;
  std::vector<PointResult> points;
  SweepMetadata meta;
};

TransitionSweepResult run_sweep(const SweepConfig& config);

// Aggregate CSV with columns sqrt_lambda,observable,value,stderr.
std::string sweep_csv(const TransitionSweepResult& result);
// Parse it back (round-trip check; returns rows as tuples).
struct CsvRow {
  double sqrt_lambda;
  std::string observable;
  double value;
  double stderr_value;
};
std::vector<CsvRow> parse_sweep_csv(const std::string& text);

std::string histogram_csv(const distributions::Histogram& h);
std::string metadata_json(const TransitionSweepResult& result);

// Write sweep.csv, sweep_meta.json and hist_<kind>_p<i>.csv under config.out.
void write_outputs(const TransitionSweepResult& result);

// Analytic curves on the sweep's Lambda grid: perturbative eigenvalues,
// moments, entropies, marginal-moment pair and the recursive interpolation.
std::vector<theory::PredictionCurve> emit_predictions(const SweepConfig& config);
std::string predictions_csv(const std::vector<theory::PredictionCurve>& curves);

// Coupling-grid resolution: the actual (epsilon-or-b, sqrt_lambda) pair per
// grid entry, applying the closed-form calibrations.
struct CouplingPoint {
  double knob;
  double sqrt_lambda;
};
CouplingPoint resolve_coupling(const SweepConfig& config, double grid_value);

}  // namespace entrans::harness
