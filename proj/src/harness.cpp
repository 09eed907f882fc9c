#include "entrans/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "entrans/dynamics.hpp"
#include "entrans/ensembles.hpp"
#include "entrans/linalg.hpp"
#include "entrans/rng.hpp"
#include "entrans/schmidt.hpp"

namespace entrans::harness {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) {
    if (!tok.empty() && tok.back() == ',') tok.pop_back();
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

std::vector<double> parse_doubles(const std::string& s, const std::string& key) {
  std::vector<double> out;
  for (const std::string& tok : split_ws(s)) {
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw ConfigError("config: bad number '" + tok + "' in " + key);
    }
  }
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_alpha(double a) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", a);
  return buf;
}

// per-realization accumulation; merged in fixed order afterwards
struct Partial {
  long states = 0;
  std::vector<double> lam_sum, lam_sumsq;
  std::vector<double> mu_sum, mu_sumsq;  // parallel to config.alphas
  std::vector<double> s_sum, s_sumsq;
  double d_sum = 0.0, d_sumsq = 0.0;
  std::map<std::string, distributions::Histogram> hists;
  std::map<std::string, std::vector<double>> samples;
  std::string error;
};

distributions::Histogram make_histogram(const std::string& kind) {
  using distributions::Histogram;
  if (kind == "lambda1" || kind == "lambda2") return Histogram::linear(0.0, 1.0, 100);
  if (kind == "u2" || kind == "u1") return Histogram::logarithmic(1e-2, 1e6, 96);
  if (kind == "purity_u") return Histogram::linear(0.0, 3.0, 60);
  if (kind == "mp") return Histogram::linear(0.0, 5.0, 100);
  if (kind == "tw_max") return Histogram::linear(-10.0, 6.0, 80);
  if (kind == "exp_min") return Histogram::linear(0.0, 10.0, 50);
  throw ConfigError("unknown histogram kind '" + kind + "'");
}

void check_sample_kind(const std::string& kind) {
  static const char* known[] = {"lambda1", "lambda2", "mu2", "lambda_min", "lambda_all"};
  for (const char* k : known) {
    if (kind == k) return;
  }
  throw ConfigError("unknown keep_samples kind '" + kind + "'");
}

struct PointSpec {
  double knob;          // epsilon or b
  double lambda;        // transition parameter at the knob
  double sqrt_lambda;
};

void accumulate_state(const SweepConfig& cfg, const PointSpec& point,
                      const RealVector& lambdas_desc, Index n_a, Partial& acc) {
  const Index nl = std::min<Index>(7, n_a);
  acc.states += 1;
  for (Index i = 0; i < nl; ++i) {
    const double v = i < lambdas_desc.size() ? lambdas_desc[i] : 0.0;
    acc.lam_sum[i] += v;
    acc.lam_sumsq[i] += v * v;
  }
  double mu2_value = 0.0;
  for (std::size_t ai = 0; ai < cfg.alphas.size(); ++ai) {
    const double alpha = cfg.alphas[ai];
    double mu;
    if (alpha == 0.0) {
      mu = static_cast<double>(n_a);
    } else {
      mu = 0.0;
      for (Index i = 0; i < lambdas_desc.size(); ++i) {
        const double l = lambdas_desc[i];
        if (l > 0.0) mu += std::pow(l, alpha);
      }
    }
    if (alpha == 2.0) mu2_value = mu;
    double s;
    if (alpha == 1.0) {
      s = schmidt::von_neumann_entropy(lambdas_desc);
    } else if (alpha > 0.0) {
      s = (1.0 - mu) / (alpha - 1.0);
    } else {
      s = 0.0;
    }
    acc.mu_sum[ai] += mu;
    acc.mu_sumsq[ai] += mu * mu;
    acc.s_sum[ai] += s;
    acc.s_sumsq[ai] += s * s;
  }
  const double d = schmidt::d_star_sq_from_lambdas(lambdas_desc, n_a);
  acc.d_sum += d;
  acc.d_sumsq += d * d;

  const double l1 = lambdas_desc.size() > 0 ? lambdas_desc[0] : 0.0;
  const double l2 = lambdas_desc.size() > 1 ? lambdas_desc[1] : 0.0;
  const double lmin = lambdas_desc.size() > 0 ? lambdas_desc[lambdas_desc.size() - 1] : 0.0;
  if (mu2_value == 0.0) {
    for (Index i = 0; i < lambdas_desc.size(); ++i) {
      mu2_value += lambdas_desc[i] * lambdas_desc[i];
    }
  }

  for (auto& [kind, hist] : acc.hists) {
    if (kind == "lambda1") {
      hist.add(l1);
    } else if (kind == "lambda2") {
      hist.add(l2);
    } else if (kind == "mp") {
      for (Index i = 0; i < lambdas_desc.size(); ++i) {
        hist.add(lambdas_desc[i] * static_cast<double>(n_a));
      }
    } else if (kind == "tw_max") {
      const double nd = static_cast<double>(n_a);
      hist.add((l1 - 4.0 / nd) / (std::pow(2.0, 4.0 / 3.0) * std::pow(nd, -5.0 / 3.0)));
    } else if (kind == "exp_min") {
      const double nd = static_cast<double>(n_a);
      hist.add(lmin * nd * (nd * nd - 1.0));
    } else if (point.lambda > 0.0) {
      if (kind == "u2") {
        if (std::abs(l2 - 0.5) >= 1e-9) hist.add(distributions::g_lambda(l2, point.lambda));
      } else if (kind == "u1") {
        if (std::abs(l1 - 0.5) >= 1e-9) hist.add(distributions::g_lambda(l1, point.lambda));
      } else if (kind == "purity_u") {
        if (mu2_value > 0.5 && mu2_value < 1.0) {
          hist.add(distributions::purity_u(mu2_value, point.lambda));
        }
      }
    }
  }
  for (auto& [kind, vec] : acc.samples) {
    if (kind == "lambda1") {
      vec.push_back(l1);
    } else if (kind == "lambda2") {
      vec.push_back(l2);
    } else if (kind == "mu2") {
      vec.push_back(mu2_value);
    } else if (kind == "lambda_min") {
      vec.push_back(lmin);
    } else if (kind == "lambda_all") {
      for (Index i = 0; i < lambdas_desc.size(); ++i) vec.push_back(lambdas_desc[i]);
    }
  }
}

Partial make_partial(const SweepConfig& cfg, Index n_a) {
  Partial p;
  const Index nl = std::min<Index>(7, n_a);
  p.lam_sum.assign(nl, 0.0);
  p.lam_sumsq.assign(nl, 0.0);
  p.mu_sum.assign(cfg.alphas.size(), 0.0);
  p.mu_sumsq.assign(cfg.alphas.size(), 0.0);
  p.s_sum.assign(cfg.alphas.size(), 0.0);
  p.s_sumsq.assign(cfg.alphas.size(), 0.0);
  for (const std::string& kind : cfg.histograms) p.hists.emplace(kind, make_histogram(kind));
  for (const std::string& kind : cfg.keep_samples) p.samples.emplace(kind, std::vector<double>{});
  return p;
}

RealVector schmidt_values_desc(const ComplexVector& state, Index n_a, Index n_b) {
  const ComplexMatrix c = linalg::reshape_state(state, n_a, n_b);
  RealVector sv = linalg::singular_values(c);
  RealVector lam(sv.size());
  for (Index i = 0; i < sv.size(); ++i) {
    const double l = sv[i] * sv[i];
    lam[i] = l < 1e-14 ? 0.0 : l;
  }
  return lam;
}

void run_items(int workers, int n, const std::function<void(int)>& fn) {
  std::atomic<int> next{0};
  const auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      fn(i);
    }
  };
  std::vector<std::thread> threads;
  for (int w = 0; w + 1 < workers; ++w) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
}

}  // namespace

SweepConfig SweepConfig::parse(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("config line " + std::to_string(lineno) + ": bad section");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    kv[section.empty() ? key : section + "." + key] = value;
  }

  const auto get = [&kv](const std::string& key) -> std::optional<std::string> {
    // accept both flat and sectioned spellings
    for (const auto& [k, v] : kv) {
      if (k == key) return v;
      const auto dot = k.find('.');
      if (dot != std::string::npos && k.substr(dot + 1) == key) return v;
    }
    return std::nullopt;
  };

  SweepConfig cfg;
  if (auto v = get("system")) {
    if (*v == "rmt") {
      cfg.system = System::rmt;
    } else if (*v == "kicked_rotor") {
      cfg.system = System::kicked_rotor;
    } else {
      throw ConfigError("config: system must be rmt or kicked_rotor, got '" + *v + "'");
    }
  }
  if (auto v = get("n_a")) cfg.n_a = std::stol(*v);
  if (auto v = get("n_b")) cfg.n_b = std::stol(*v);
  if (auto v = get("n")) cfg.n = std::stol(*v);
  if (auto v = get("kind")) {
    if (*v == "sqrt_lambda") {
      cfg.coupling_kind = CouplingKind::sqrt_lambda;
    } else if (*v == "epsilon") {
      cfg.coupling_kind = CouplingKind::epsilon;
    } else if (*v == "b") {
      cfg.coupling_kind = CouplingKind::b;
    } else {
      throw ConfigError("config: coupling kind must be sqrt_lambda, epsilon or b");
    }
  }
  if (auto v = get("grid")) cfg.coupling_grid = parse_doubles(*v, "grid");
  if (auto v = get("realizations")) cfg.realizations = std::stoi(*v);
  if (auto v = get("observables")) cfg.observables = split_ws(*v);
  if (auto v = get("histograms")) cfg.histograms = split_ws(*v);
  if (auto v = get("keep_samples")) cfg.keep_samples = split_ws(*v);
  if (auto v = get("alphas")) cfg.alphas = parse_doubles(*v, "alphas");
  if (auto v = get("seed")) cfg.seed = std::stoull(*v);
  if (auto v = get("out")) cfg.out = *v;
  if (auto v = get("workers")) cfg.workers = std::stoi(*v);
  if (auto v = get("failure_budget")) cfg.failure_budget = std::stoi(*v);
  if (auto v = get("k_a")) cfg.k_a = std::stod(*v);
  if (auto v = get("k_b")) cfg.k_b = std::stod(*v);
  if (auto v = get("theta_q")) cfg.theta_q = std::stod(*v);
  if (auto v = get("theta_p")) cfg.theta_p = std::stod(*v);
  cfg.validate();
  return cfg;
}

SweepConfig SweepConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

void SweepConfig::validate() const {
  if (coupling_grid.empty()) throw ConfigError("config: coupling grid is empty");
  if (realizations < 1) throw ConfigError("config: realizations >= 1 required");
  for (double g : coupling_grid) {
    if (g < 0.0) throw ConfigError("config: negative coupling grid value");
  }
  if (system == System::rmt) {
    if (n_a < 2 || n_b < n_a) {
      throw ConfigError("config: rmt requires 2 <= n_a <= n_b");
    }
    if (coupling_kind == CouplingKind::b) {
      throw ConfigError("config: coupling kind 'b' applies to kicked_rotor only");
    }
  } else {
    if (n < 2) throw ConfigError("config: kicked_rotor requires n >= 2");
    if (coupling_kind == CouplingKind::epsilon) {
      throw ConfigError("config: coupling kind 'epsilon' applies to rmt only");
    }
    if (realizations != 1) {
      throw ConfigError("config: kicked_rotor is deterministic, realizations must be 1");
    }
  }
  for (const std::string& kind : histograms) make_histogram(kind);
  for (const std::string& kind : keep_samples) check_sample_kind(kind);
  for (double a : alphas) {
    if (a < 0.0) throw ConfigError("config: negative alpha");
  }
}

bool SweepConfig::wants(const std::string& observable) const {
  for (const std::string& o : observables) {
    if (o == observable) return true;
  }
  return false;
}

CouplingPoint resolve_coupling(const SweepConfig& config, double grid_value) {
  CouplingPoint out{};
  if (config.system == SweepConfig::System::rmt) {
    const double eps = (config.coupling_kind == SweepConfig::CouplingKind::epsilon)
                           ? grid_value
                           : theory::epsilon_from_lambda_rmt(config.n_a, config.n_b,
                                                             grid_value * grid_value);
    out.knob = eps;
    out.sqrt_lambda = std::sqrt(theory::lambda_rmt(config.n_a, config.n_b, eps));
  } else {
    const double b = (config.coupling_kind == SweepConfig::CouplingKind::b)
                         ? grid_value
                         : dynamics::b_from_sqrt_lambda(config.n, grid_value);
    dynamics::KickedRotorParams p;
    p.n = config.n;
    p.k_a = config.k_a;
    p.k_b = config.k_b;
    p.b = b;
    p.theta_q = config.theta_q;
    p.theta_p = config.theta_p;
    out.knob = b;
    out.sqrt_lambda = std::sqrt(std::max(0.0, dynamics::lambda_kicked_rotor(p).exact));
  }
  return out;
}

TransitionSweepResult run_sweep(const SweepConfig& config) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();

  const bool rotor = config.system == SweepConfig::System::kicked_rotor;
  const Index n_a = rotor ? config.n : config.n_a;
  const Index n_b = rotor ? config.n : config.n_b;

  std::vector<PointSpec> points;
  points.reserve(config.coupling_grid.size());
  for (double g : config.coupling_grid) {
    const CouplingPoint cp = resolve_coupling(config, g);
    points.push_back({cp.knob, cp.sqrt_lambda * cp.sqrt_lambda, cp.sqrt_lambda});
  }

  // rotor subsystem propagators are coupling-independent
  ComplexMatrix rotor_a, rotor_b;
  if (rotor) {
    dynamics::KickedRotorParams p;
    p.n = config.n;
    p.k_a = config.k_a;
    p.k_b = config.k_b;
    p.theta_q = config.theta_q;
    p.theta_p = config.theta_p;
    rotor_a = dynamics::build_single_rotor(p, dynamics::Subsystem::a);
    rotor_b = dynamics::build_single_rotor(p, dynamics::Subsystem::b);
  }

  const int n_points = static_cast<int>(points.size());
  const int reals = config.realizations;
  std::vector<std::vector<Partial>> slots(n_points);
  for (auto& s : slots) {
    s.reserve(reals);
    for (int r = 0; r < reals; ++r) s.push_back(make_partial(config, n_a));
  }

  const auto run_item = [&](int item) {
    const int p = item / reals;
    const int r = item % reals;
    Partial& acc = slots[p][r];
    try {
      const PointSpec& point = points[p];
      ComplexMatrix ua, ub;
      ComplexVector diag;
      if (rotor) {
        ua = rotor_a;
        ub = rotor_b;
        dynamics::KickedRotorParams kp;
        kp.n = config.n;
        kp.k_a = config.k_a;
        kp.k_b = config.k_b;
        kp.b = point.knob;
        kp.theta_q = config.theta_q;
        kp.theta_p = config.theta_p;
        diag = dynamics::coupling_diagonal(kp);
      } else {
        RngStream rng = RngStream::keyed(config.seed, static_cast<std::uint64_t>(p),
                                         static_cast<std::uint64_t>(r));
        ensembles::TransitionEnsembleParams ep;
        ep.n_a = config.n_a;
        ep.n_b = config.n_b;
        ep.epsilon = point.knob;
        ep.seed = config.seed;
        const ensembles::EnsembleRealization real =
            ensembles::build_transition_operator(ep, rng);
        ua = real.u_a;
        ub = real.u_b;
        diag = real.coupling_diag();
      }

      if (point.knob == 0.0) {
        // exactly a tensor product: every eigenstate is a product state
        RealVector lam = RealVector::Zero(n_a);
        lam[0] = 1.0;
        for (Index s = 0; s < n_a * n_b; ++s) {
          accumulate_state(config, point, lam, n_a, acc);
        }
        return;
      }

      const linalg::EigenDecomposition dec = linalg::eig_unitary_product(ua, ub, diag);
      for (Index s = 0; s < dec.eigenvectors.cols(); ++s) {
        const RealVector lam = schmidt_values_desc(dec.eigenvectors.col(s), n_a, n_b);
        accumulate_state(config, point, lam, n_a, acc);
      }
    } catch (const std::exception& e) {
      acc.error = e.what();
    }
  };

  int workers = config.workers > 0 ? config.workers
                                   : static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  run_items(workers, n_points * reals, run_item);

  TransitionSweepResult result;
  result.config = config;
  result.points.resize(n_points);
  long failures = 0;
  for (int p = 0; p < n_points; ++p) {
    PointResult& pr = result.points[p];
    pr.sqrt_lambda = points[p].sqrt_lambda;
    pr.coupling = points[p].knob;

    std::vector<const Partial*> ok;
    for (int r = 0; r < reals; ++r) {
      const Partial& part = slots[p][r];
      if (!part.error.empty()) {
        pr.errors.push_back("realization " + std::to_string(r) + ": " + part.error);
        ++failures;
        continue;
      }
      ok.push_back(&part);
    }
    pr.realizations = static_cast<long>(ok.size());
    if (ok.empty()) continue;

    long states = 0;
    for (const Partial* part : ok) states += part->states;
    pr.states = states;

    const std::size_t nl = ok.front()->lam_sum.size();
    const std::size_t na_ = config.alphas.size();

    // mean of each observable; stderr across realizations when there are
    // several, otherwise from the per-state spread
    const auto reduce = [&](auto sum_of, auto sumsq_of, double& mean, double& se) {
      if (ok.size() > 1) {
        std::vector<double> means;
        means.reserve(ok.size());
        for (const Partial* part : ok) {
          means.push_back(sum_of(*part) / static_cast<double>(part->states));
        }
        double m = 0.0;
        for (double v : means) m += v;
        m /= static_cast<double>(means.size());
        double var = 0.0;
        for (double v : means) var += (v - m) * (v - m);
        var /= static_cast<double>(means.size() - 1);
        mean = m;
        se = std::sqrt(var / static_cast<double>(means.size()));
      } else {
        const Partial& part = *ok.front();
        const double ns = static_cast<double>(part.states);
        const double m = sum_of(part) / ns;
        double var = sumsq_of(part) / ns - m * m;
        if (var < 0) var = 0;
        mean = m;
        se = std::sqrt(var / ns);
      }
    };

    pr.lambda_mean.resize(nl);
    pr.lambda_stderr.resize(nl);
    for (std::size_t i = 0; i < nl; ++i) {
      reduce([i](const Partial& q) { return q.lam_sum[i]; },
             [i](const Partial& q) { return q.lam_sumsq[i]; }, pr.lambda_mean[i],
             pr.lambda_stderr[i]);
    }
    for (std::size_t ai = 0; ai < na_; ++ai) {
      const double alpha = config.alphas[ai];
      double m, se;
      reduce([ai](const Partial& q) { return q.mu_sum[ai]; },
             [ai](const Partial& q) { return q.mu_sumsq[ai]; }, m, se);
      pr.mu_mean[alpha] = m;
      pr.mu_stderr[alpha] = se;
      reduce([ai](const Partial& q) { return q.s_sum[ai]; },
             [ai](const Partial& q) { return q.s_sumsq[ai]; }, m, se);
      pr.s_mean[alpha] = m;
      pr.s_stderr[alpha] = se;
    }
    reduce([](const Partial& q) { return q.d_sum; },
           [](const Partial& q) { return q.d_sumsq; }, pr.d_star_sq_mean,
           pr.d_star_sq_stderr);

    for (const std::string& kind : config.histograms) {
      distributions::Histogram merged = make_histogram(kind);
      for (const Partial* part : ok) merged.merge(part->hists.at(kind));
      pr.histograms.emplace(kind, std::move(merged));
    }
    for (const std::string& kind : config.keep_samples) {
      std::vector<double>& all = pr.samples[kind];
      for (const Partial* part : ok) {
        const std::vector<double>& v = part->samples.at(kind);
        all.insert(all.end(), v.begin(), v.end());
      }
    }
  }

  result.meta.seed = config.seed;
  result.meta.realizations = config.realizations;
  result.meta.workers = workers;
  result.meta.version = kVersion;
  result.meta.failures = failures;
  result.meta.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

std::string sweep_csv(const TransitionSweepResult& result) {
  std::ostringstream out;
  out << "sqrt_lambda,observable,value,stderr\n";
  const SweepConfig& cfg = result.config;
  for (const PointResult& pr : result.points) {
    const std::string sl = fmt(pr.sqrt_lambda);
    if (cfg.wants("lambda_means")) {
      for (std::size_t i = 0; i < pr.lambda_mean.size(); ++i) {
        out << sl << ",lambda_" << (i + 1) << ',' << fmt(pr.lambda_mean[i]) << ','
            << fmt(pr.lambda_stderr[i]) << '\n';
      }
    }
    if (cfg.wants("moments")) {
      for (const auto& [alpha, v] : pr.mu_mean) {
        out << sl << ",mu_" << fmt_alpha(alpha) << ',' << fmt(v) << ','
            << fmt(pr.mu_stderr.at(alpha)) << '\n';
      }
    }
    if (cfg.wants("entropies")) {
      for (const auto& [alpha, v] : pr.s_mean) {
        out << sl << ",s_" << fmt_alpha(alpha) << ',' << fmt(v) << ','
            << fmt(pr.s_stderr.at(alpha)) << '\n';
      }
    }
    if (cfg.wants("d_star_sq")) {
      out << sl << ",d_star_sq," << fmt(pr.d_star_sq_mean) << ','
          << fmt(pr.d_star_sq_stderr) << '\n';
    }
  }
  return out.str();
}

std::vector<CsvRow> parse_sweep_csv(const std::string& text) {
  std::vector<CsvRow> rows;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string a, b, c, d;
    std::getline(row, a, ',');
    std::getline(row, b, ',');
    std::getline(row, c, ',');
    std::getline(row, d, ',');
    rows.push_back({std::stod(a), b, std::stod(c), std::stod(d)});
  }
  return rows;
}

std::string histogram_csv(const distributions::Histogram& h) {
  std::ostringstream out;
  out << "edge_lo,edge_hi,density,count\n";
  const std::vector<double> dens = h.density();
  for (std::size_t i = 0; i < dens.size(); ++i) {
    out << fmt(h.edges()[i]) << ',' << fmt(h.edges()[i + 1]) << ',' << fmt(dens[i])
        << ',' << fmt(h.counts()[i]) << '\n';
  }
  return out.str();
}

std::string metadata_json(const TransitionSweepResult& result) {
  nlohmann::json j;
  const SweepConfig& cfg = result.config;
  j["version"] = result.meta.version;
  j["seed"] = result.meta.seed;
  j["realizations"] = result.meta.realizations;
  j["workers"] = result.meta.workers;
  j["wall_seconds"] = result.meta.wall_seconds;
  j["failures"] = result.meta.failures;
  j["system"] = cfg.system == SweepConfig::System::rmt ? "rmt" : "kicked_rotor";
  if (cfg.system == SweepConfig::System::rmt) {
    j["n_a"] = cfg.n_a;
    j["n_b"] = cfg.n_b;
  } else {
    j["n"] = cfg.n;
    j["k_a"] = cfg.k_a;
    j["k_b"] = cfg.k_b;
    j["theta_q"] = cfg.theta_q;
    j["theta_p"] = cfg.theta_p;
  }
  j["alphas"] = cfg.alphas;
  j["grid"] = cfg.coupling_grid;
  for (const auto& pr : result.points) {
    nlohmann::json p;
    p["sqrt_lambda"] = pr.sqrt_lambda;
    p["coupling"] = pr.coupling;
    p["realizations"] = pr.realizations;
    p["states"] = pr.states;
    p["errors"] = pr.errors;
    j["points"].push_back(p);
  }
  return j.dump(2);
}

void write_outputs(const TransitionSweepResult& result) {
  const std::string dir = result.config.out.empty() ? "." : result.config.out;
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir + "/sweep.csv", std::ios::binary);
    f << sweep_csv(result);
  }
  {
    std::ofstream f(dir + "/sweep_meta.json", std::ios::binary);
    f << metadata_json(result);
  }
  for (std::size_t p = 0; p < result.points.size(); ++p) {
    for (const auto& [kind, hist] : result.points[p].histograms) {
      std::ofstream f(dir + "/hist_" + kind + "_p" + std::to_string(p) + ".csv",
                      std::ios::binary);
      f << histogram_csv(hist);
    }
  }
}

std::vector<theory::PredictionCurve> emit_predictions(const SweepConfig& config) {
  config.validate();
  std::vector<double> lambdas;
  for (double g : config.coupling_grid) {
    const CouplingPoint cp = resolve_coupling(config, g);
    lambdas.push_back(cp.sqrt_lambda * cp.sqrt_lambda);
  }
  std::sort(lambdas.begin(), lambdas.end());
  lambdas.erase(std::unique(lambdas.begin(), lambdas.end()), lambdas.end());

  const Index n = config.system == SweepConfig::System::rmt ? config.n_a : config.n;
  using Curve = theory::PredictionCurve;
  std::vector<Curve> curves;
  const auto add = [&](const std::string& name, Curve::Regime regime, double valid,
                       const std::function<double(double)>& f) {
    Curve c;
    c.lambda_grid = lambdas;
    c.observable = name;
    c.regime = regime;
    c.sqrt_lambda_valid_max = valid;
    for (double l : lambdas) c.values.push_back(f(l));
    curves.push_back(std::move(c));
  };

  add("lambda1_pert", Curve::Regime::perturbative, 0.5,
      [](double l) { return theory::predicted_lambda1_lambda2(l).lambda1; });
  add("lambda2_full", Curve::Regime::perturbative, 0.5,
      [](double l) { return theory::predicted_lambda1_lambda2(l).lambda2_full; });
  add("lambda2_series", Curve::Regime::perturbative, 0.5,
      [](double l) { return theory::predicted_lambda1_lambda2(l).lambda2_series; });
  add("sqrt_lambda1_pert", Curve::Regime::perturbative, 0.5,
      [](double l) { return theory::predicted_sqrt_lambda1_moment(l); });
  add("mu_half_pert", Curve::Regime::perturbative,
      theory::perturbative_sqrt_lambda_max("mu_half"),
      [n](double l) { return theory::predicted_mu_half(l, n); });
  add("d_star_sq_pert", Curve::Regime::perturbative,
      theory::perturbative_sqrt_lambda_max("d_star_sq"),
      [n](double l) { return theory::predicted_d_star_sq(l, n); });
  for (double alpha : config.alphas) {
    if (alpha <= 0.5) continue;
    const std::string tag = fmt_alpha(alpha);
    add("mu_" + tag + "_pert", Curve::Regime::perturbative, 0.5,
        [alpha](double l) { return theory::predicted_moment(l, alpha); });
    add("s_" + tag + "_pert", Curve::Regime::perturbative, 0.5,
        [alpha](double l) { return theory::predicted_entropy(l, alpha); });
    if (alpha >= 1.0) {
      add("mu_" + tag + "_interp", Curve::Regime::interpolated,
          std::numeric_limits<double>::infinity(),
          [alpha, n](double l) { return theory::interpolated_moment(l, alpha, n); });
      add("s_" + tag + "_interp", Curve::Regime::interpolated,
          std::numeric_limits<double>::infinity(),
          [alpha, n](double l) { return theory::interpolated_entropy(l, alpha, n); });
    }
  }
  return curves;
}

std::string predictions_csv(const std::vector<theory::PredictionCurve>& curves) {
  std::ostringstream out;
  out << "sqrt_lambda,observable,value,regime,sqrt_lambda_valid_max\n";
  for (const auto& c : curves) {
    const char* regime = c.regime == theory::PredictionCurve::Regime::perturbative
                             ? "perturbative"
                             : (c.regime == theory::PredictionCurve::Regime::interpolated
                                    ? "interpolated"
                                    : "asymptotic");
    for (std::size_t i = 0; i < c.lambda_grid.size(); ++i) {
      out << fmt(std::sqrt(c.lambda_grid[i])) << ',' << c.observable << ','
          << fmt(c.values[i]) << ',' << regime << ',' << fmt(c.sqrt_lambda_valid_max)
          << '\n';
    }
  }
  return out.str();
}

}  // namespace entrans::harness
