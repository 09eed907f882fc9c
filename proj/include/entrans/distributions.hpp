#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "entrans/matrix.hpp"

namespace entrans::distributions {

// Perturbation-theory rescaling g_L(x) = x(1-x) / (Lambda (1-2x)^2);
// symmetric under x -> 1-x, pole at x = 1/2.
double g_lambda(double x, double lambda);

// Universal density of u2 = g_L(lambda_2):
// -1/u^2 + sqrt(pi)/(2 u^(5/2)) (2+u) e^(1/u) erfc(1/sqrt(u)),
// with series/asymptotic branches below u = 2e-3 and above u = 1e4.
double density_u2(double u);
double cdf_u2(double u);

// Levy density of u1 = g_L(lambda_1): sqrt(pi)/(2 u^(3/2)) exp(-pi^2/(4u)).
double density_levy(double u);
double cdf_levy(double u);
inline double levy_mode() { return M_PI * M_PI / 6.0; }

// Rescaled purity variable u = sqrt(2 Lambda (2 mu2 - 1)/(1 - mu2)); the
// companion half-normal density sqrt(pi) exp(-pi^2 x^2 / 4).
// mu2 = 1 maps to +infinity (unentangled limit); mu2 <= 1/2 is outside the
// perturbative regime and rejected.
double purity_u(double mu2, double lambda);
double density_half_normal(double x);
double cdf_half_normal(double x);

// Marchenko-Pastur density for rescaled Schmidt eigenvalues, ratio Q >= 1.
double marcenko_pastur(double x, double q);
double cdf_marcenko_pastur_q1(double x);

struct RescaledSample {
  enum class Kind { u2, u1, purity_u, mp, tw_max, exp_min };
  Kind kind;
  std::vector<double> values;
  std::size_t excluded = 0;  // pole/regime exclusions
  double lambda = 0.0;
  Index n = 0;
};

// g_L transforms with the 1/2-pole exclusion rule; Lambda = 0 yields an empty
// sample (every input is a degenerate point there).
RescaledSample transform_u2(const std::vector<double>& lambda2, double lambda);
RescaledSample transform_u1(const std::vector<double>& lambda1, double lambda);
RescaledSample transform_purity(const std::vector<double>& mu2, double lambda);

// lambda~ = N lambda for comparison against Marchenko-Pastur.
RescaledSample rescale_all(const std::vector<double>& lambdas, Index n);

struct ExtremeSamples {
  RescaledSample tw_max;   // (lambda_1 - 4/N) / (2^(4/3) N^(-5/3))
  RescaledSample exp_min;  // N (N^2 - 1) lambda_N
};
ExtremeSamples rescale_extremes(const std::vector<RealVector>& spectra, Index n);

// One-sample Kolmogorov-Smirnov distance against a reference CDF.
double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf);
// Same, conditioned on the window [lo, hi].
double ks_distance_conditional(const std::vector<double>& sample,
                               const std::function<double(double)>& cdf, double lo,
                               double hi);

class Histogram {
 public:
  static Histogram linear(double lo, double hi, int bins);
  static Histogram logarithmic(double lo, double hi, int bins);

  void add(double x);
  void merge(const Histogram& other);
  std::vector<double> density() const;  // integrates to 1 over the bins

  const std::vector<double>& edges() const { return edges_; }
  const std::vector<double>& counts() const { return counts_; }
  double total_in_range() const;
  std::size_t underflow() const { return underflow_; }
  std::size_t overflow() const { return overflow_; }
  bool log_bins() const { return log_bins_; }

 private:
  std::vector<double> edges_;
  std::vector<double> counts_;
  std::size_t underflow_ = 0;
  std::size_t overflow_ = 0;
  bool log_bins_ = false;
};

// Least-squares slope of log(density) vs log(u) over log-spaced bins.
struct TailFit {
  double slope = 0.0;
  double stderr_slope = 0.0;
  int bins_used = 0;
};
TailFit log_log_tail_slope(const std::vector<double>& sample, double lo, double hi,
                           int bins);

// Tracy-Widom F2 reference table (x, density, cdf), cubic interpolation,
// FNV-1a checksum verified at load.
class Tw2Table {
 public:
  static const Tw2Table& instance();
  explicit Tw2Table(const std::string& path);

  double cdf(double x) const;
  double density(double x) const;
  double x_min() const { return x0_; }
  double x_max() const { return x0_ + step_ * (static_cast<double>(cdf_.size()) - 1); }
  const std::string& version() const { return version_; }

  static std::uint64_t fnv1a(const std::string& data);

 private:
  double interpolate(const std::vector<double>& table, double x, double clamp_lo,
                     double clamp_hi) const;
  double x0_ = 0.0;
  double step_ = 0.0;
  std::vector<double> density_;
  std::vector<double> cdf_;
  std::string version_;
};

}  // namespace entrans::distributions
