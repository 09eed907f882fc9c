#include "entrans/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace entrans::distributions {

namespace {
constexpr double kPoleExclusion = 1e-9;  // distance to 1/2 below which g blows up
const double kSqrtPi = std::sqrt(M_PI);
}  // namespace

double g_lambda(double x, double lambda) {
  if (lambda <= 0.0) throw std::domain_error("g_lambda: Lambda > 0 required");
  if (x < 0.0 || x > 1.0) throw std::domain_error("g_lambda: x in [0,1] required");
  const double d = 1.0 - 2.0 * x;
  if (d == 0.0) throw std::domain_error("g_lambda: pole at x = 1/2");
  return x * (1.0 - x) / (lambda * d * d);
}

double density_u2(double u) {
  if (u <= 0.0) return 0.0;
  if (u < 2e-3) {
    return 0.5 - 1.5 * u + 45.0 / 8.0 * u * u - 105.0 / 4.0 * u * u * u;
  }
  if (u > 1e4) {
    const double r = std::sqrt(u);
    return kSqrtPi / (2.0 * u * r) - 2.0 / (u * u) +
           1.5 * kSqrtPi / (u * u * r) - 8.0 / (3.0 * u * u * u);
  }
  const double r = std::sqrt(u);
  return -1.0 / (u * u) +
         kSqrtPi / (2.0 * u * u * r) * (2.0 + u) * std::exp(1.0 / u) *
             std::erfc(1.0 / r);
}

double cdf_u2(double u) {
  if (u <= 0.0) return 0.0;
  if (u < 2e-3) {
    return 0.5 * u - 0.75 * u * u + 15.0 / 8.0 * u * u * u;
  }
  if (u > 1e4) {
    const double r = std::sqrt(u);
    return 1.0 - kSqrtPi / r + 2.0 / u - kSqrtPi / (u * r) + 4.0 / (3.0 * u * u);
  }
  const double r = std::sqrt(u);
  return 1.0 - kSqrtPi / r * std::exp(1.0 / u) * std::erfc(1.0 / r);
}

double density_levy(double u) {
  if (u <= 0.0) return 0.0;
  return kSqrtPi / (2.0 * u * std::sqrt(u)) * std::exp(-M_PI * M_PI / (4.0 * u));
}

double cdf_levy(double u) {
  if (u <= 0.0) return 0.0;
  return std::erfc(0.5 * M_PI / std::sqrt(u));
}

double purity_u(double mu2, double lambda) {
  if (lambda <= 0.0) throw std::domain_error("purity_u: Lambda > 0 required");
  if (mu2 <= 0.5) {
    throw std::domain_error("purity_u: mu2 <= 1/2 outside the perturbative regime");
  }
  if (mu2 >= 1.0) return INFINITY;  // unentangled limit
  return std::sqrt(2.0 * lambda * (2.0 * mu2 - 1.0) / (1.0 - mu2));
}

double density_half_normal(double x) {
  if (x < 0.0) return 0.0;
  return kSqrtPi * std::exp(-M_PI * M_PI * x * x / 4.0);
}

double cdf_half_normal(double x) {
  if (x <= 0.0) return 0.0;
  return std::erf(0.5 * M_PI * x);
}

double marcenko_pastur(double x, double q) {
  if (q < 1.0) throw std::domain_error("marcenko_pastur: Q >= 1 required");
  const double sq = std::sqrt(q);
  const double lo = 1.0 + 1.0 / q - 2.0 / sq;
  const double hi = 1.0 + 1.0 / q + 2.0 / sq;
  if (x <= lo || x >= hi) return 0.0;
  return q / (2.0 * M_PI) * std::sqrt((hi - x) * (x - lo)) / x;
}

double cdf_marcenko_pastur_q1(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 4.0) return 1.0;
  const double theta = std::acos(1.0 - 0.5 * x);
  return (theta + std::sin(theta)) / M_PI;
}

namespace {

RescaledSample transform_g(const std::vector<double>& xs, double lambda,
                           RescaledSample::Kind kind) {
  RescaledSample out;
  out.kind = kind;
  out.lambda = lambda;
  if (lambda == 0.0) {
    out.excluded = xs.size();
    return out;
  }
  out.values.reserve(xs.size());
  for (double x : xs) {
    if (std::abs(x - 0.5) < kPoleExclusion || x < 0.0 || x > 1.0) {
      ++out.excluded;
      continue;
    }
    out.values.push_back(g_lambda(x, lambda));
  }
  return out;
}

}  // namespace

RescaledSample transform_u2(const std::vector<double>& lambda2, double lambda) {
  return transform_g(lambda2, lambda, RescaledSample::Kind::u2);
}

RescaledSample transform_u1(const std::vector<double>& lambda1, double lambda) {
  return transform_g(lambda1, lambda, RescaledSample::Kind::u1);
}

RescaledSample transform_purity(const std::vector<double>& mu2, double lambda) {
  RescaledSample out;
  out.kind = RescaledSample::Kind::purity_u;
  out.lambda = lambda;
  if (lambda == 0.0) {
    out.excluded = mu2.size();
    return out;
  }
  for (double m : mu2) {
    if (m <= 0.5 || m >= 1.0) {
      ++out.excluded;
      continue;
    }
    out.values.push_back(purity_u(m, lambda));
  }
  return out;
}

RescaledSample rescale_all(const std::vector<double>& lambdas, Index n) {
  RescaledSample out;
  out.kind = RescaledSample::Kind::mp;
  out.n = n;
  out.values.reserve(lambdas.size());
  for (double l : lambdas) out.values.push_back(l * static_cast<double>(n));
  return out;
}

ExtremeSamples rescale_extremes(const std::vector<RealVector>& spectra, Index n) {
  ExtremeSamples out;
  out.tw_max.kind = RescaledSample::Kind::tw_max;
  out.exp_min.kind = RescaledSample::Kind::exp_min;
  out.tw_max.n = n;
  out.exp_min.n = n;
  const double nd = static_cast<double>(n);
  const double tw_scale = std::pow(2.0, 4.0 / 3.0) * std::pow(nd, -5.0 / 3.0);
  const double min_scale = nd * (nd * nd - 1.0);
  for (const RealVector& spec : spectra) {
    if (spec.size() != n) {
      throw std::invalid_argument("rescale_extremes: spectrum size != N (square case)");
    }
    out.tw_max.values.push_back((spec[0] - 4.0 / nd) / tw_scale);
    out.exp_min.values.push_back(spec[spec.size() - 1] * min_scale);
  }
  return out;
}

double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw std::invalid_argument("ks_distance: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max(d, std::abs((static_cast<double>(i) + 1.0) / n - f));
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
  }
  return d;
}

double ks_distance_conditional(const std::vector<double>& sample,
                               const std::function<double(double)>& cdf, double lo,
                               double hi) {
  std::vector<double> window;
  for (double x : sample) {
    if (x >= lo && x <= hi) window.push_back(x);
  }
  const double flo = cdf(lo);
  const double fhi = cdf(hi);
  if (fhi <= flo) throw std::invalid_argument("ks_distance_conditional: empty window");
  return ks_distance(std::move(window), [&](double x) {
    return (cdf(x) - flo) / (fhi - flo);
  });
}

Histogram Histogram::linear(double lo, double hi, int bins) {
  if (bins < 1 || hi <= lo) throw std::invalid_argument("Histogram::linear: bad range");
  Histogram h;
  h.edges_.resize(bins + 1);
  for (int i = 0; i <= bins; ++i) {
    h.edges_[i] = lo + (hi - lo) * static_cast<double>(i) / bins;
  }
  h.counts_.assign(bins, 0.0);
  return h;
}

Histogram Histogram::logarithmic(double lo, double hi, int bins) {
  if (bins < 1 || lo <= 0.0 || hi <= lo) {
    throw std::invalid_argument("Histogram::logarithmic: bad range");
  }
  Histogram h;
  h.log_bins_ = true;
  const double llo = std::log(lo);
  const double lhi = std::log(hi);
  h.edges_.resize(bins + 1);
  for (int i = 0; i <= bins; ++i) {
    h.edges_[i] = std::exp(llo + (lhi - llo) * static_cast<double>(i) / bins);
  }
  h.counts_.assign(bins, 0.0);
  return h;
}

void Histogram::add(double x) {
  if (x < edges_.front()) {
    ++underflow_;
    return;
  }
  if (x >= edges_.back()) {
    ++overflow_;
    return;
  }
  // binary search over (possibly log) edges
  const auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
  const std::size_t idx = static_cast<std::size_t>(it - edges_.begin()) - 1;
  counts_[std::min(idx, counts_.size() - 1)] += 1.0;
}

void Histogram::merge(const Histogram& other) {
  if (other.edges_ != edges_ || other.log_bins_ != log_bins_) {
    throw std::invalid_argument("Histogram::merge: incompatible binning");
  }
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  underflow_ += other.underflow_;
  overflow_ += other.overflow_;
}

double Histogram::total_in_range() const {
  double t = 0.0;
  for (double c : counts_) t += c;
  return t;
}

std::vector<double> Histogram::density() const {
  const double total = total_in_range();
  std::vector<double> d(counts_.size(), 0.0);
  if (total == 0.0) return d;
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    d[i] = counts_[i] / (total * (edges_[i + 1] - edges_[i]));
  }
  return d;
}

TailFit log_log_tail_slope(const std::vector<double>& sample, double lo, double hi,
                           int bins) {
  Histogram h = Histogram::logarithmic(lo, hi, bins);
  for (double x : sample) h.add(x);
  const std::vector<double> dens = h.density();
  // unweighted least squares on log(density) vs log(bin center)
  std::vector<double> xs, ys;
  for (int i = 0; i < bins; ++i) {
    if (h.counts()[i] < 3.0) continue;  // too noisy to log
    xs.push_back(0.5 * (std::log(h.edges()[i]) + std::log(h.edges()[i + 1])));
    ys.push_back(std::log(dens[i]));
  }
  TailFit fit;
  fit.bins_used = static_cast<int>(xs.size());
  if (xs.size() < 3) return fit;
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double denom = n * sxx - sx * sx;
  fit.slope = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - fit.slope * sx) / n;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (intercept + fit.slope * xs[i]);
    ss += r * r;
  }
  if (xs.size() > 2) {
    fit.stderr_slope = std::sqrt(ss / (n - 2.0) * n / denom);
  }
  return fit;
}

std::uint64_t Tw2Table::fnv1a(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

const Tw2Table& Tw2Table::instance() {
  static std::mutex mu;
  static Tw2Table* table = nullptr;
  std::lock_guard<std::mutex> lock(mu);
  if (!table) {
    const char* override_path = std::getenv("ENTRANS_TW2_TABLE");
    const std::string path =
        override_path ? override_path : std::string(ENTRANS_DATA_DIR) + "/tw2_table.csv";
    table = new Tw2Table(path);
  }
  return *table;
}

Tw2Table::Tw2Table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("Tw2Table: cannot open " + path);
  std::string line;
  std::uint64_t expected_hash = 0;
  std::string data;
  std::vector<double> xs;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto vpos = line.find("version=");
      if (vpos != std::string::npos) version_ = line.substr(vpos + 8);
      const auto hpos = line.find("fnv1a64=");
      if (hpos != std::string::npos) {
        expected_hash = std::stoull(line.substr(hpos + 8), nullptr, 16);
      }
      continue;
    }
    data += line;
    data += '\n';
    std::istringstream row(line);
    double x, f, cdf;
    char comma;
    row >> x >> comma >> f >> comma >> cdf;
    xs.push_back(x);
    density_.push_back(f);
    cdf_.push_back(cdf);
  }
  if (xs.size() < 4) throw std::runtime_error("Tw2Table: table too short");
  if (expected_hash == 0 || fnv1a(data) != expected_hash) {
    throw std::runtime_error("Tw2Table: checksum mismatch for " + path);
  }
  x0_ = xs.front();
  step_ = (xs.back() - xs.front()) / (static_cast<double>(xs.size()) - 1.0);
}

double Tw2Table::interpolate(const std::vector<double>& table, double x,
                             double clamp_lo, double clamp_hi) const {
  const double pos = (x - x0_) / step_;
  if (pos <= 0.0) return clamp_lo;
  const double last = static_cast<double>(table.size()) - 1.0;
  if (pos >= last) return clamp_hi;
  // Catmull-Rom cubic on the uniform grid
  const auto idx = static_cast<std::ptrdiff_t>(pos);
  const double t = pos - static_cast<double>(idx);
  const auto at = [&](std::ptrdiff_t i) {
    i = std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(table.size()) - 1);
    return table[static_cast<std::size_t>(i)];
  };
  const double p0 = at(idx - 1), p1 = at(idx), p2 = at(idx + 1), p3 = at(idx + 2);
  return p1 + 0.5 * t *
                  (p2 - p0 +
                   t * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 +
                        t * (3.0 * (p1 - p2) + p3 - p0)));
}

double Tw2Table::cdf(double x) const {
  return std::clamp(interpolate(cdf_, x, 0.0, 1.0), 0.0, 1.0);
}
double Tw2Table::density(double x) const { return interpolate(density_, x, 0.0, 0.0); }

}  // namespace entrans::distributions
