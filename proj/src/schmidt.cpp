#include "entrans/schmidt.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "entrans/linalg.hpp"
#include "entrans/specfun.hpp"

namespace entrans::schmidt {

namespace {
constexpr double kNormTol = 1e-10;
constexpr double kLambdaClamp = 1e-14;
constexpr double kTieTol = 1e-12;
}  // namespace

BipartiteState::BipartiteState(ComplexVector amps, Index na, Index nb)
    : amplitudes(std::move(amps)), n_a(na), n_b(nb) {
  if (amplitudes.size() != n_a * n_b) {
    throw std::invalid_argument("BipartiteState: length " +
                                std::to_string(amplitudes.size()) +
                                " does not factor as " + std::to_string(n_a) + "*" +
                                std::to_string(n_b));
  }
  const double norm = amplitudes.norm();
  if (std::abs(norm - 1.0) > kNormTol) {
    throw std::invalid_argument("BipartiteState: norm deviates from 1 by " +
                                std::to_string(std::abs(norm - 1.0)));
  }
}

ComplexMatrix BipartiteState::coefficient_matrix() const {
  return linalg::reshape_state(amplitudes, n_a, n_b);
}

SchmidtSpectrum schmidt_spectrum(const BipartiteState& psi, bool with_vectors) {
  const ComplexMatrix c = psi.coefficient_matrix();
  SchmidtSpectrum out;
  if (with_vectors) {
    linalg::Svd dec = linalg::svd(c);
    out.lambdas = dec.singular_values.array().square();
    out.vectors_a = dec.u;
    // columns of conj(v) carry the B-side Schmidt vectors
    out.vectors_b = dec.v.conjugate();
    // gauge: leading component of each A-vector real positive
    for (Index k = 0; k < out.vectors_a.cols(); ++k) {
      Index piv = 0;
      while (piv < out.vectors_a.rows() &&
             std::abs(out.vectors_a(piv, k)) < 1e-12) {
        ++piv;
      }
      if (piv == out.vectors_a.rows()) continue;
      const Complex z = out.vectors_a(piv, k);
      const Complex phase = std::conj(z) / std::abs(z);
      out.vectors_a.col(k) *= phase;
      out.vectors_b.col(k) *= std::conj(phase);
    }
  } else {
    out.lambdas = linalg::singular_values(c).array().square();
  }
  for (Index i = 0; i < out.lambdas.size(); ++i) {
    if (out.lambdas[i] < kLambdaClamp) out.lambdas[i] = 0.0;
  }
  for (Index i = 0; i + 1 < out.lambdas.size(); ++i) {
    if (std::abs(out.lambdas[i] - out.lambdas[i + 1]) <= kTieTol) {
      out.degenerate = true;
      break;
    }
  }
  return out;
}

std::map<double, double> moments(const SchmidtSpectrum& spectrum,
                                 const std::vector<double>& alphas) {
  std::map<double, double> out;
  for (double alpha : alphas) {
    if (alpha < 0.0) {
      throw std::domain_error("moments: alpha < 0 rejected");
    }
    if (alpha == 0.0) {
      out[alpha] = static_cast<double>(spectrum.lambdas.size());
      continue;
    }
    double sum = 0.0;
    for (Index i = 0; i < spectrum.lambdas.size(); ++i) {
      const double l = spectrum.lambdas[i];
      if (l > 0.0) sum += std::pow(l, alpha);
    }
    out[alpha] = sum;
  }
  return out;
}

double von_neumann_entropy(const RealVector& lambdas) {
  double s = 0.0;
  for (Index i = 0; i < lambdas.size(); ++i) {
    const double l = lambdas[i];
    if (l > 0.0) s -= l * std::log(l);
  }
  return s;
}

EntropySet entropies(const SchmidtSpectrum& spectrum, const std::vector<double>& alphas) {
  EntropySet out;
  for (double alpha : alphas) {
    if (alpha <= 0.0) throw std::domain_error("entropies: alpha must be positive");
    if (alpha == 1.0) {
      const double s1 = von_neumann_entropy(spectrum.lambdas);
      out.hct[alpha] = s1;
      out.renyi[alpha] = s1;
      continue;
    }
    double mu = 0.0;
    for (Index i = 0; i < spectrum.lambdas.size(); ++i) {
      const double l = spectrum.lambdas[i];
      if (l > 0.0) mu += std::pow(l, alpha);
    }
    out.hct[alpha] = (1.0 - mu) / (alpha - 1.0);
    out.renyi[alpha] = std::log(mu) / (1.0 - alpha);
  }
  return out;
}

EntanglementSummary summarize(const SchmidtSpectrum& spectrum, Index n_a,
                              const std::vector<double>& alphas) {
  EntanglementSummary out;
  out.moments = moments(spectrum, alphas);
  EntropySet es = entropies(spectrum, alphas);
  out.entropies = std::move(es.hct);
  out.renyi = std::move(es.renyi);
  out.d_star_sq = d_star_sq_from_lambdas(spectrum.lambdas, n_a);
  return out;
}

double d_star_sq_from_lambdas(const RealVector& lambdas, Index n_a) {
  double root_sum = 0.0;
  for (Index i = 0; i < lambdas.size(); ++i) {
    if (lambdas[i] > 0.0) root_sum += std::sqrt(lambdas[i]);
  }
  return 2.0 * (1.0 - root_sum / std::sqrt(static_cast<double>(n_a)));
}

ClosestMaxEntangled closest_maximally_entangled(const BipartiteState& psi) {
  SchmidtSpectrum spec = schmidt_spectrum(psi, true);
  const Index na = psi.n_a;
  const Index nb = psi.n_b;
  ComplexVector amps = ComplexVector::Zero(na * nb);
  const double w = 1.0 / std::sqrt(static_cast<double>(na));
  for (Index k = 0; k < na; ++k) {
    for (Index i = 0; i < na; ++i) {
      const Complex a = spec.vectors_a(i, k);
      for (Index j = 0; j < nb; ++j) {
        amps[i * nb + j] += w * a * spec.vectors_b(j, k);
      }
    }
  }
  ClosestMaxEntangled out{BipartiteState(std::move(amps), na, nb),
                          d_star_sq_from_lambdas(spec.lambdas, na),
                          spec.degenerate};
  return out;
}

HaarReference haar_reference(double q, Index n_a) {
  if (q < 1.0) throw std::domain_error("haar_reference: requires Q >= 1");
  HaarReference out;
  const double na = static_cast<double>(n_a);
  const double nb = q * na;
  out.s1 = std::log(na) - 0.5 / q;
  out.s2_asymptotic = 1.0 - (q + 1.0) / (na * q);
  out.s2_exact = 1.0 - (na + nb) / (1.0 + na * nb);
  if (q == 1.0) {
    out.d_star_sq = 2.0 * (1.0 - 8.0 / (3.0 * M_PI));
  } else {
    const double qq = std::pow(q, 0.25);
    const double kappa = 2.0 / (qq + 1.0 / qq);
    const double ek = specfun::elliptic_e(kappa);
    const double kk = specfun::elliptic_k(kappa);
    const double sq = std::sqrt(q);
    out.d_star_sq = 2.0 - 4.0 / (3.0 * M_PI) * (1.0 + 1.0 / sq) *
                              ((q + 1.0) * ek - (sq - 1.0) * (sq - 1.0) * kk);
  }
  out.d_star_sq_large_q = 1.0 / (4.0 * q);
  return out;
}

}  // namespace entrans::schmidt
