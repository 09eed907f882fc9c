#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "entrans/ensembles.hpp"
#include "entrans/linalg.hpp"
#include "entrans/quadrature.hpp"
#include "entrans/rng.hpp"
#include "entrans/specfun.hpp"
#include "entrans/theory.hpp"

using namespace entrans;
using namespace entrans::theory;

namespace {

// independent double quadrature of the regularized second-eigenvalue average
// with the closer-neighbor weight 2 e^(-2s)
double lambda2_by_quadrature(double lambda) {
  return quadrature::integrate(
      [lambda](double s) {
        const double inner = quadrature::integrate(
            [lambda, s](double w) {
              return std::exp(-w) * regularized_weight(s, w, lambda);
            },
            0.0, 45.0, {1e-12, 1e-12, 8000});
        return 2.0 * std::exp(-2.0 * s) * inner;
      },
      0.0, 26.0, {1e-11, 1e-11, 8000});
}

}  // namespace

TEST_CASE("lambda_from_coupling vanishing cases") {
  const ComplexVector ones = ComplexVector::Constant(12, Complex(1.0, 0.0));
  CHECK(lambda_from_coupling(ones, 3, 4).lambda == doctest::Approx(0.0).epsilon(1e-14));

  // phases constant along the B index: a function of one coordinate alone
  ComplexVector sep(12);
  for (Index i = 0; i < 3; ++i) {
    const Complex f = std::polar(1.0, 0.4 * static_cast<double>(i) + 0.2);
    for (Index j = 0; j < 4; ++j) sep[i * 4 + j] = f;
  }
  CHECK(std::abs(lambda_from_coupling(sep, 3, 4).lambda) < 1e-12);

  CHECK_THROWS_AS(lambda_from_coupling(ones, 3, 5), std::invalid_argument);
}

TEST_CASE("lambda_from_coupling matches the ensemble average") {
  const Index n = 32;
  const double eps = 0.08;
  const int reps = 100;
  double sum = 0.0, sumsq = 0.0;
  for (int r = 0; r < reps; ++r) {
    RngStream rng = RngStream::keyed(99, 1, static_cast<std::uint64_t>(r));
    ComplexVector diag(n * n);
    for (Index i = 0; i < n * n; ++i) {
      diag[i] = std::polar(1.0, 2.0 * M_PI * eps * rng.uniform_symmetric());
    }
    const double l = lambda_from_coupling(diag, n, n, eps).lambda;
    sum += l;
    sumsq += l * l;
  }
  const double mean = sum / reps;
  const double se = std::sqrt((sumsq / reps - mean * mean) / reps);
  const double expected = lambda_rmt(n, n, eps);
  CHECK(std::abs(mean - expected) < 3.5 * se);
}

TEST_CASE("lambda_rmt limits") {
  CHECK(lambda_rmt(32, 32, 0.0) == 0.0);
  // Taylor remainder of the sinc bracket at N = 100, eps = 0.01: expanding
  // only in eps leaves the finite-N prefactor intact
  const double exact = lambda_rmt(100, 100, 0.01);
  const double pref = max_lambda_rmt(100, 100);
  const double eps_series = pref * M_PI * M_PI * 1e-4 / 3.0;
  // next series term is (2/15)(pi eps)^2 = 1.3e-4 of the leading one
  CHECK(std::abs(exact / eps_series - 1.0) < 2e-4);
  // the N_A N_B eps^2 / 12 form differs by the (N/(N+1))^2 factor, ~2% here
  const double approx = lambda_rmt_small_eps(100, 100, 0.01);
  CHECK(std::abs(exact / approx - 1.0) < 0.025);
  // saturation: the sinc bracket tends to 1
  CHECK(lambda_rmt(100, 100, 50.0) ==
        doctest::Approx(max_lambda_rmt(100, 100)).epsilon(1e-4));
  // inversion round trip and cap reporting
  for (double target : {1e-6, 1e-2, 1.0, 20.0}) {
    const double eps = epsilon_from_lambda_rmt(32, 32, target);
    CHECK(lambda_rmt(32, 32, eps) == doctest::Approx(target).epsilon(1e-9));
  }
  CHECK_THROWS_AS(epsilon_from_lambda_rmt(50, 50, 100.0), std::domain_error);
}

TEST_CASE("regularized weight") {
  CHECK(regularized_weight(0.0, 1.0, 0.5) == doctest::Approx(0.5));
  CHECK(regularized_weight(3.0, 1.0, 0.0) == 0.0);
  const double w = regularized_weight(10.0, 1.0, 1e-3);
  CHECK(std::abs(w / 1e-5 - 1.0) < 0.01);

  // monotone decreasing in |s|, increasing in Lambda w
  double prev = regularized_weight(0.0, 1.0, 0.2);
  for (double s : {0.5, 1.0, 2.0, 5.0, 20.0}) {
    const double cur = regularized_weight(s, 1.0, 0.2);
    CHECK(cur <= prev);
    prev = cur;
  }
  prev = 0.0;
  for (double lw : {0.01, 0.1, 1.0, 10.0}) {
    const double cur = regularized_weight(1.0, 1.0, lw);
    CHECK(cur >= prev);
    CHECK(cur <= 0.5);
    prev = cur;
  }
}

TEST_CASE("predicted lambda1/lambda2: limits, series, sum rule") {
  const Lambda12 zero = predicted_lambda1_lambda2(0.0);
  CHECK(zero.lambda1 == 1.0);
  CHECK(zero.lambda2_full == 0.0);
  CHECK(zero.lambda2_series == 0.0);

  // closed form vs its small-Lambda expansion
  const Lambda12 p = predicted_lambda1_lambda2(1e-3);
  CHECK(std::abs(p.lambda2_full - p.lambda2_series) < 1e-4);

  // sum rule deviation is O(Lambda ln Lambda) and shrinks with Lambda
  const auto deviation = [](double lambda) {
    const Lambda12 l = predicted_lambda1_lambda2(lambda);
    return std::abs(l.lambda1 + l.lambda2_full - 1.0);
  };
  CHECK(deviation(1e-4) < 2.0 * std::abs(1e-4 * std::log(1e-4)));
  CHECK(deviation(1e-5) < deviation(1e-4));
  CHECK(deviation(1e-6) < deviation(1e-5));
}

TEST_CASE("lambda2 closed form equals the regularized double integral") {
  for (double lambda : {1e-6, 1e-4, 1e-2, 0.3, 1.0}) {
    const double quad = lambda2_by_quadrature(lambda);
    const double closed = predicted_lambda1_lambda2(lambda).lambda2_full;
    CHECK(std::abs(quad - closed) < 1e-8);
  }
}

TEST_CASE("moment coefficients: printed anchors") {
  CHECK(c1_coefficient(1.0) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-12));
  CHECK(c1_coefficient(2.0) ==
        doctest::Approx(std::sqrt(M_PI) * (1.0 + M_PI / 4.0)).epsilon(1e-12));
  CHECK(c2_coefficient(1.0) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-11));
  CHECK(c_coefficient(1.0) == 0.0);
  CHECK(c_coefficient(2.0) == doctest::Approx(0.5 * std::pow(M_PI, 1.5)).epsilon(1e-12));
  CHECK(c3_coefficient(2.0) == doctest::Approx(M_PI));
  CHECK(c3_coefficient(3.0) == doctest::Approx(0.75 * M_PI * M_PI));
  CHECK(c3_coefficient(4.0) ==
        doctest::Approx(2.0 * M_PI + 3.0 * std::pow(M_PI, 3) / 16.0));
  CHECK(c3_log_coefficient() == doctest::Approx(M_PI * M_PI * (4.0 - M_PI) / 4.0));
  CHECK(c3_coefficient(1.0) == 0.0);
  CHECK_THROWS_AS(c2_coefficient(0.5), std::domain_error);
  CHECK_THROWS_AS(coefficients(0.5), std::domain_error);
}

TEST_CASE("coefficient quadrature routes agree with the closed forms") {
  for (double alpha : {1.0, 1.5, 2.0, 3.0}) {
    CHECK(std::abs(c1_quadrature(alpha) - c1_coefficient(alpha)) < 1e-8);
    CHECK(std::abs(c2_quadrature(alpha) - c2_coefficient(alpha)) < 1e-8);
  }
  for (double alpha : {2.0, 3.0, 4.0}) {
    CHECK(std::abs(c3_quadrature(alpha) - c3_coefficient(alpha)) < 1e-7);
  }
  CHECK(std::abs(c3_log_quadrature() - c3_log_coefficient()) < 1e-7);
}

TEST_CASE("C identity: middle integral equals the Gamma ratio") {
  for (double alpha : {0.75, 1.5, 2.0, 3.0, 4.0}) {
    const double gamma_form = c_coefficient(alpha);
    CHECK(std::abs(c_middle_integral(alpha) - gamma_form) < 1e-8);
  }
}

TEST_CASE("C1 - C2 = C wherever both converge") {
  for (double alpha : {0.8, 1.0, 1.5, 2.0, 3.0, 4.0}) {
    const double lhs = c1_coefficient(alpha) - c2_coefficient(alpha);
    const double rhs = c_coefficient(alpha);
    CHECK(std::abs(lhs - rhs) < 1e-8);
  }
}

TEST_CASE("C(alpha)/(alpha-1) limits to pi^(3/2) at alpha = 1") {
  const double h = 1e-5;
  const double up = c_coefficient(1.0 + h) / h;
  const double dn = c_coefficient(1.0 - h) / (-h);
  CHECK(std::abs(0.5 * (up + dn) - std::pow(M_PI, 1.5)) < 1e-4);
}

TEST_CASE("perturbative moments and entropies") {
  CHECK(predicted_moment(0.0, 2.0) == 1.0);
  CHECK(predicted_entropy(0.0, 2.0) == 0.0);
  CHECK(predicted_entropy(0.0, 1.0) == 0.0);
  // purity at Lambda = 0.01
  const double expected = 1.0 - 0.5 * std::pow(M_PI, 1.5) * 0.1 + M_PI * 0.01;
  CHECK(predicted_moment(0.01, 2.0) == doctest::Approx(expected).epsilon(1e-12));
  CHECK_THROWS_AS(predicted_moment(0.01, 0.3), std::domain_error);

  CHECK(predicted_d_star_sq(0.0, 100) == doctest::Approx(1.8).epsilon(1e-12));
  CHECK(predicted_mu_half(0.0, 100) == 1.0);
  CHECK(predicted_sqrt_lambda1_moment(0.0) == 1.0);
  // entropy relation: S_alpha = (1 - mu_alpha)/(alpha - 1) at the printed orders
  for (double lambda : {1e-4, 1e-2}) {
    for (double alpha : {1.5, 2.0, 3.0}) {
      const double via_moment = (1.0 - predicted_moment(lambda, alpha)) / (alpha - 1.0);
      CHECK(predicted_entropy(lambda, alpha) ==
            doctest::Approx(via_moment).epsilon(1e-10));
    }
  }
}

TEST_CASE("recursive interpolation limits and slope matching") {
  CHECK(interpolated_entropy(0.0, 2.0, 50) == 0.0);
  CHECK(interpolated_entropy(0.0, 1.0, 50) == 0.0);
  // Lambda -> infinity reaches the asymptotic entropies
  for (double alpha : {2.0, 3.0, 4.0}) {
    const double s_inf = asymptotic_entropy(alpha, 50);
    CHECK(interpolated_entropy(1e6, alpha, 50) == doctest::Approx(s_inf).epsilon(1e-10));
  }
  CHECK(asymptotic_entropy(2.0, 50) == doctest::Approx(1.0 - 2.0 / 50.0).epsilon(1e-8));
  CHECK(asymptotic_entropy(1.0, 50) == doctest::Approx(std::log(50.0) - 0.5));
  CHECK(asymptotic_moment(2.0, 50) == doctest::Approx(2.0 / 50.0).epsilon(1e-8));

  // small-Lambda slope of the interpolated entropy matches C(2) = pi^(3/2)/2
  const double h = 1e-8;  // in sqrt(Lambda)
  const double slope =
      (interpolated_entropy(4.0 * h * h, 2.0, 50) - interpolated_entropy(h * h, 2.0, 50)) /
      h;
  CHECK(std::abs(slope - c_coefficient(2.0)) < 1e-6);

  // moments interpolate between 1 and the Catalan asymptote
  CHECK(interpolated_moment(0.0, 2.0, 50) ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK(interpolated_moment(1e6, 2.0, 50) ==
        doctest::Approx(asymptotic_moment(2.0, 50)).epsilon(1e-8));

  // perturbative and interpolated slopes agree as Lambda -> 0
  for (double alpha : {1.0, 2.0, 3.0}) {
    const double si =
        (interpolated_entropy(4.0 * h * h, alpha, 50) -
         interpolated_entropy(h * h, alpha, 50)) /
        h;
    const double sp =
        (predicted_entropy(4.0 * h * h, alpha) - predicted_entropy(h * h, alpha)) / h;
    CHECK(std::abs(si - sp) < 1e-6);
  }
}

TEST_CASE("unitary perturbation theory: zero coupling and reality of phi2") {
  RngStream rng(12);
  const auto da = linalg::eig_unitary(ensembles::sample_cue(4, rng));
  const auto db = linalg::eig_unitary(ensembles::sample_cue(4, rng));
  RealVector v(16);
  for (Index i = 0; i < 16; ++i) v[i] = 2.0 * M_PI * rng.uniform_symmetric();

  const UnitaryPerturbation pert = unitary_perturbation(da, db, v, 0.0, 2);
  CHECK(pert.max_imag_phi2 <= 1e-12);
  // all phi are finite, corrections enter only multiplied by epsilon
  const ComplexMatrix w = linalg::kron(da.eigenvectors, db.eigenvectors);
  CHECK((pert.vectors - w).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("unitary perturbation theory: exact minus second order scales as eps^3") {
  RngStream rng(2718);
  const ComplexMatrix ua = ensembles::sample_cue(4, rng);
  const ComplexMatrix ub = ensembles::sample_cue(4, rng);
  const auto da = linalg::eig_unitary(ua);
  const auto db = linalg::eig_unitary(ub);
  RealVector v(16);
  for (Index i = 0; i < 16; ++i) v[i] = 2.0 * M_PI * rng.uniform_symmetric();

  const UnitaryPerturbation pert = unitary_perturbation(da, db, v, 1.0, 2);
  CHECK(pert.max_imag_phi2 <= 1e-12);

  std::vector<double> log_eps, log_diff, log_vdiff;
  for (double eps = 1e-4; eps < 1.05e-2; eps *= std::pow(100.0, 1.0 / 6.0)) {
    // exact operator (u_a kron u_b) exp(i eps diag(v))
    ComplexVector diag(16);
    for (Index i = 0; i < 16; ++i) diag[i] = std::polar(1.0, eps * v[i]);
    const auto exact = linalg::eig_unitary_product(ua, ub, diag);

    const UnitaryPerturbation p2 = unitary_perturbation(da, db, v, eps, 2);

    // match exact states to perturbed states by maximal overlap
    double sum_angle = 0.0, sum_vec = 0.0;
    for (Index s = 0; s < 16; ++s) {
      Index best = 0;
      double best_ov = 0.0;
      for (Index e = 0; e < 16; ++e) {
        const double ov = std::abs(p2.vectors.col(s).dot(exact.eigenvectors.col(e)));
        if (ov > best_ov) {
          best_ov = ov;
          best = e;
        }
      }
      const double predicted_angle =
          p2.theta0[s] + eps * p2.phi1[s] + eps * eps * p2.phi2[s];
      sum_angle += std::abs(
          linalg::circular_difference(exact.eigenangles[best], predicted_angle));
      // phase-align the exact vector before differencing
      const Complex ov = exact.eigenvectors.col(best).dot(p2.vectors.col(s));
      const Complex phase = ov / std::abs(ov);
      sum_vec += (p2.vectors.col(s) - phase * exact.eigenvectors.col(best)).norm();
    }
    log_eps.push_back(std::log(eps));
    log_diff.push_back(std::log(sum_angle / 16.0));
    log_vdiff.push_back(std::log(sum_vec / 16.0));
  }

  const auto fit_slope = [](const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      sx += x[i];
      sy += y[i];
      sxx += x[i] * x[i];
      sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
  };
  const double angle_slope = fit_slope(log_eps, log_diff);
  CHECK(angle_slope == doctest::Approx(3.0).epsilon(0.034));  // 3.0 +- 0.1
  const double vector_slope = fit_slope(log_eps, log_vdiff);
  CHECK(vector_slope > 2.6);
  CHECK(vector_slope < 3.4);

  // first order alone degrades the eigenvector error to eps^2
  std::vector<double> log_v1;
  for (std::size_t i = 0; i < log_eps.size(); ++i) {
    const double eps = std::exp(log_eps[i]);
    const UnitaryPerturbation p1 = unitary_perturbation(da, db, v, eps, 1);
    ComplexVector diag(16);
    for (Index k = 0; k < 16; ++k) diag[k] = std::polar(1.0, eps * v[k]);
    const auto exact = linalg::eig_unitary_product(ua, ub, diag);
    double sum_vec = 0.0;
    for (Index s = 0; s < 16; ++s) {
      Index best = 0;
      double best_ov = 0.0;
      for (Index e = 0; e < 16; ++e) {
        const double ov = std::abs(p1.vectors.col(s).dot(exact.eigenvectors.col(e)));
        if (ov > best_ov) {
          best_ov = ov;
          best = e;
        }
      }
      const Complex ov = exact.eigenvectors.col(best).dot(p1.vectors.col(s));
      sum_vec += (p1.vectors.col(s) - ov / std::abs(ov) * exact.eigenvectors.col(best))
                     .norm();
    }
    log_v1.push_back(std::log(sum_vec / 16.0));
  }
  const double v1_slope = fit_slope(log_eps, log_v1);
  CHECK(v1_slope > 1.6);
  CHECK(v1_slope < 2.4);
}

TEST_CASE("unitary perturbation rejects gap-floor violations") {
  linalg::EigenDecomposition da, db;
  da.eigenangles = RealVector(2);
  da.eigenangles << 0.3, 0.3 + 1e-12;  // forced near-degeneracy
  da.eigenvectors = ComplexMatrix::Identity(2, 2);
  db.eigenangles = RealVector(2);
  db.eigenangles << 1.0, 2.0;
  db.eigenvectors = ComplexMatrix::Identity(2, 2);
  RealVector v = RealVector::Ones(4);
  CHECK_THROWS_AS(unitary_perturbation(da, db, v, 0.01, 2), std::runtime_error);
}

TEST_CASE("perturbative validity ceilings") {
  CHECK(perturbative_sqrt_lambda_max("mu_2") == 0.5);
  CHECK(perturbative_sqrt_lambda_max("mu_half") == 0.6);
  CHECK(perturbative_sqrt_lambda_max("d_star_sq") == 0.6);
}
