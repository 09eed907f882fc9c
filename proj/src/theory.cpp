#include "entrans/theory.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "entrans/quadrature.hpp"
#include "entrans/specfun.hpp"

namespace entrans::theory {

namespace {

// 1 - sinc^2(pi eps), stable for small arguments
double one_minus_sinc_sq(double eps) {
  const double y = M_PI * eps;
  if (std::abs(y) < 1e-2) {
    const double y2 = y * y;
    return y2 / 3.0 - 2.0 * y2 * y2 / 45.0 + y2 * y2 * y2 / 315.0;
  }
  const double s = std::sin(y) / y;
  return 1.0 - s * s;
}

// numerator 1 + (1-t1-t2)^a - (1-t1)^a - (1-t2)^a, series branch for tiny t
double moment_kernel_numerator(double alpha, double t1, double t2) {
  if (t1 + t2 < 1e-3) {
    const double a2 = alpha - 2.0;
    const double a3 = alpha - 3.0;
    return alpha * (alpha - 1.0) * t1 * t2 *
           (1.0 - a2 * (t1 + t2) / 2.0 + a2 * a3 * (t1 * t1 + t2 * t2) / 6.0 +
            a2 * a3 * t1 * t2 / 4.0);
  }
  return 1.0 + std::pow(1.0 - t1 - t2, alpha) - std::pow(1.0 - t1, alpha) -
         std::pow(1.0 - t2, alpha);
}

// (1-t1-t2)ln(1-t1-t2) - (1-t1)ln(1-t1) - (1-t2)ln(1-t2)
double log_kernel_numerator(double t1, double t2) {
  if (t1 + t2 < 1e-3) {
    return t1 * t2 *
           (1.0 + (t1 + t2) / 2.0 + (t1 * t1 + t2 * t2) / 3.0 + t1 * t2 / 2.0);
  }
  const auto phi = [](double s) { return (1.0 - s) * std::log1p(-s); };
  return phi(t1 + t2) - phi(t1) - phi(t2);
}

// scaled exponential integral e^-x Ei(x) for large x
double ei_scaled_asymptotic(double x) {
  double term = 1.0 / x;
  double sum = term;
  for (int k = 1; k < 40; ++k) {
    const double next = term * k / x;
    if (next > term) break;
    term = next;
    sum += term;
  }
  return sum;
}

// Dawson function for large argument
double dawson_asymptotic(double y) {
  const double y2 = y * y;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 30; ++k) {
    const double next = term * (2.0 * k - 1.0) / (2.0 * y2);
    if (next > term) break;
    term = next;
    sum += term;
  }
  return sum / (2.0 * y);
}

}  // namespace

TransitionParameter lambda_from_coupling(const ComplexVector& u_ab_diagonal,
                                         Index n_a, Index n_b,
                                         double coupling_knob) {
  if (u_ab_diagonal.size() != n_a * n_b) {
    throw std::invalid_argument("lambda_from_coupling: diagonal length " +
                                std::to_string(u_ab_diagonal.size()) +
                                " != " + std::to_string(n_a * n_b));
  }
  const double na = static_cast<double>(n_a);
  const double nb = static_cast<double>(n_b);
  Complex trace(0, 0);
  ComplexVector trace_a = ComplexVector::Zero(n_a);  // partial trace over B
  ComplexVector trace_b = ComplexVector::Zero(n_b);  // partial trace over A
  for (Index i = 0; i < n_a; ++i) {
    for (Index j = 0; j < n_b; ++j) {
      const Complex d = u_ab_diagonal[i * n_b + j];
      trace += d;
      trace_a[i] += d;
      trace_b[j] += d;
    }
  }
  const double bracket = 1.0 + std::norm(trace / (na * nb)) -
                         trace_a.squaredNorm() / (nb * nb * na) -
                         trace_b.squaredNorm() / (na * na * nb);
  TransitionParameter out;
  out.mean_spacing = 2.0 * M_PI / (na * nb);
  out.v_squared = na * nb * bracket / ((na * na - 1.0) * (nb * nb - 1.0));
  out.lambda = out.v_squared / (out.mean_spacing * out.mean_spacing);
  if (out.lambda < 0.0 && out.lambda > -1e-12) out.lambda = 0.0;  // rounding
  out.epsilon_or_b = coupling_knob;
  return out;
}

double lambda_rmt(Index n_a, Index n_b, double epsilon) {
  if (epsilon < 0) throw std::domain_error("lambda_rmt: epsilon >= 0 required");
  const double na = static_cast<double>(n_a);
  const double nb = static_cast<double>(n_b);
  const double pref =
      na * na * nb * nb / (4.0 * M_PI * M_PI * (na + 1.0) * (nb + 1.0));
  return pref * one_minus_sinc_sq(epsilon);
}

double lambda_rmt_small_eps(Index n_a, Index n_b, double epsilon) {
  return static_cast<double>(n_a) * static_cast<double>(n_b) * epsilon * epsilon / 12.0;
}

double max_lambda_rmt(Index n_a, Index n_b) {
  const double na = static_cast<double>(n_a);
  const double nb = static_cast<double>(n_b);
  return na * na * nb * nb / (4.0 * M_PI * M_PI * (na + 1.0) * (nb + 1.0));
}

double epsilon_from_lambda_rmt(Index n_a, Index n_b, double lambda) {
  if (lambda < 0) throw std::domain_error("epsilon_from_lambda_rmt: negative target");
  if (lambda == 0) return 0.0;
  const double cap = max_lambda_rmt(n_a, n_b);
  if (lambda > cap) {
    throw std::domain_error(
        "coupling target sqrt(Lambda) = " + std::to_string(std::sqrt(lambda)) +
        " unreachable for the transition ensemble at N_A = " + std::to_string(n_a) +
        ", N_B = " + std::to_string(n_b) +
        "; cap is sqrt(Lambda) = " + std::to_string(std::sqrt(cap)));
  }
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (lambda_rmt(n_a, n_b, mid) < lambda) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double regularized_weight(double s, double w, double lambda) {
  if (w < 0 || lambda < 0) {
    throw std::domain_error("regularized_weight: w >= 0 and Lambda >= 0 required");
  }
  const double q = 4.0 * lambda * w;
  if (q == 0.0) return 0.0;
  const double as = std::abs(s);
  return 0.5 * (1.0 - as / std::sqrt(s * s + q));
}

Lambda12 predicted_lambda1_lambda2(double lambda) {
  if (lambda < 0) throw std::domain_error("predicted_lambda1_lambda2: Lambda >= 0");
  Lambda12 out;
  const double root = std::sqrt(M_PI * lambda);
  out.lambda1 = 1.0 - root;
  if (lambda == 0.0) {
    out.lambda2_full = 0.0;
    out.lambda2_series = 0.0;
    return out;
  }
  const double x = 4.0 * lambda;
  const double y = 2.0 * std::sqrt(lambda);
  double scaled;  // e^-x (Ei(x) - pi erfi(y))
  if (x <= 45.0) {
    scaled = std::exp(-x) * (specfun::ei(x) - M_PI * specfun::erfi(y));
  } else {
    scaled = ei_scaled_asymptotic(x) - 2.0 * std::sqrt(M_PI) * dawson_asymptotic(y);
  }
  out.lambda2_full = root + 2.0 * lambda * scaled;
  out.lambda2_series = root + 2.0 * lambda * (specfun::kEulerGamma + std::log(x)) -
                       8.0 * std::sqrt(M_PI) * std::pow(lambda, 1.5);
  return out;
}

double c1_coefficient(double alpha) {
  if (alpha <= 0) throw std::domain_error("c1_coefficient: alpha > 0 required");
  return std::sqrt(2.0 * M_PI) * specfun::hyp2f1(-0.5, 1.5 - alpha, 0.5, 0.5);
}

double c2_coefficient(double alpha) {
  if (alpha <= 0.5) {
    throw std::domain_error("c2_coefficient diverges for alpha <= 1/2");
  }
  return 0.5 * std::sqrt(M_PI) * specfun::incomplete_beta(0.5, alpha - 0.5, -0.5);
}

double c_coefficient(double alpha) {
  if (alpha <= 0.5) throw std::domain_error("c_coefficient: alpha > 1/2 required");
  if (alpha == 1.0) return 0.0;  // Gamma(0) pole in the denominator
  return M_PI * specfun::gamma_fn(alpha - 0.5) / specfun::gamma_fn(alpha - 1.0);
}

double c3_coefficient(double alpha) {
  if (alpha == 0.0 || alpha == 1.0) return 0.0;
  if (alpha == 2.0) return M_PI;
  if (alpha == 3.0) return 3.0 * M_PI * M_PI / 4.0;
  if (alpha == 4.0) return 2.0 * M_PI + 3.0 * std::pow(M_PI, 3) / 16.0;
  return c3_quadrature(alpha);
}

double c3_log_coefficient() { return M_PI * M_PI * (4.0 - M_PI) / 4.0; }

double c1_quadrature(double alpha) {
  // 2 sqrt(pi) int_0^(pi/2) (1 - cos^(2 alpha)(t/2)) / sin^2 t dt
  const auto f = [alpha](double t) {
    const double c = std::cos(0.5 * t);
    const double s = std::sin(t);
    const double num = -std::expm1(2.0 * alpha * std::log(c));
    return num / (s * s);
  };
  return 2.0 * std::sqrt(M_PI) * quadrature::integrate(f, 0.0, M_PI_2, {1e-10, 1e-10, 8000});
}

double c2_quadrature(double alpha) {
  // 2 sqrt(pi) int_0^(pi/2) sin^(2 alpha)(t/2) / sin^2 t dt
  const auto f = [alpha](double t) {
    const double s2 = std::sin(0.5 * t);
    const double s = std::sin(t);
    return std::pow(s2, 2.0 * alpha) / (s * s);
  };
  return 2.0 * std::sqrt(M_PI) * quadrature::integrate(f, 1e-14, M_PI_2, {1e-10, 1e-10, 8000});
}

double c_middle_integral(double alpha) {
  // (sqrt(pi)/4) int_0^1 (1 - t^a - (1-t)^a) / (t(1-t))^(3/2) dt, mapped by
  // t = sin^2(u/2) and then u = (pi/2) v^2 so the endpoint stays mild for
  // alpha slightly above 1/2
  const auto numerator = [alpha](double t) {
    if (t >= 1e-3) {
      return 1.0 - std::pow(t, alpha) - std::pow(1.0 - t, alpha);
    }
    // 1 - (1-t)^a loses all digits against the -t^a term near t = 0
    double binom = alpha;
    double sum = 0.0;
    double tk = t;
    for (int k = 1; k <= 6; ++k) {
      sum += binom * tk;
      binom *= -(alpha - k) / (k + 1.0);
      tk *= t;
    }
    return sum - std::pow(t, alpha);
  };
  const auto f = [&numerator](double v) {
    const double u = 0.5 * M_PI * v * v;
    const double du = M_PI * v;
    const double t = std::sin(0.5 * u) * std::sin(0.5 * u);
    const double s = std::sin(u);
    if (s == 0.0) return 0.0;
    return numerator(t) * 4.0 / (s * s) * du;
  };
  // symmetric integrand: integrate half range and double
  return 0.25 * std::sqrt(M_PI) * 2.0 *
         quadrature::integrate(f, 0.0, 1.0, {1e-10, 1e-10, 8000});
}

double c3_quadrature(double alpha, int order) {
  if (alpha < 1.0) {
    throw std::domain_error("c3_quadrature: alpha >= 1 required");
  }
  // t_i = sin^2(u_i/2) removes both endpoint singularities
  const auto f = [alpha](double u1, double u2) {
    const double t1 = std::sin(0.5 * u1) * std::sin(0.5 * u1);
    const double t2 = std::sin(0.5 * u2) * std::sin(0.5 * u2);
    const double s1 = std::sin(u1);
    const double s2 = std::sin(u2);
    if (s1 == 0.0 || s2 == 0.0) return 0.0;
    return moment_kernel_numerator(alpha, t1, t2) * 16.0 / (s1 * s1 * s2 * s2);
  };
  return M_PI / 8.0 * quadrature::integrate_2d(f, 0, M_PI_2, 0, M_PI_2, order);
}

double c3_log_quadrature(int order) {
  const auto f = [](double u1, double u2) {
    const double t1 = std::sin(0.5 * u1) * std::sin(0.5 * u1);
    const double t2 = std::sin(0.5 * u2) * std::sin(0.5 * u2);
    const double s1 = std::sin(u1);
    const double s2 = std::sin(u2);
    if (s1 == 0.0 || s2 == 0.0) return 0.0;
    return log_kernel_numerator(t1, t2) * 16.0 / (s1 * s1 * s2 * s2);
  };
  return M_PI / 8.0 * quadrature::integrate_2d(f, 0, M_PI_2, 0, M_PI_2, order);
}

Coefficients coefficients(double alpha) {
  Coefficients out{};
  out.c1 = c1_coefficient(alpha);
  out.c2 = c2_coefficient(alpha);  // throws at alpha <= 1/2 (divergent)
  out.c = c_coefficient(alpha);
  out.c3 = c3_coefficient(alpha);
  return out;
}

double predicted_moment(double lambda, double alpha) {
  if (lambda < 0) throw std::domain_error("predicted_moment: Lambda >= 0");
  if (alpha < 0.5) {
    throw std::domain_error("predicted_moment: alpha >= 1/2 required");
  }
  if (alpha == 1.0) return 1.0;
  return 1.0 - c_coefficient(alpha) * std::sqrt(lambda) +
         c3_coefficient(alpha) * lambda;
}

double predicted_entropy(double lambda, double alpha) {
  if (lambda < 0) throw std::domain_error("predicted_entropy: Lambda >= 0");
  if (alpha == 1.0) {
    return std::pow(M_PI, 1.5) * std::sqrt(lambda) - c3_log_coefficient() * lambda;
  }
  if (alpha <= 0.5) {
    throw std::domain_error("predicted_entropy: alpha > 1/2 required");
  }
  const double leading =
      M_PI * specfun::gamma_fn(alpha - 0.5) / specfun::gamma_fn(alpha);
  return leading * std::sqrt(lambda) - c3_coefficient(alpha) / (alpha - 1.0) * lambda;
}

double predicted_mu_half(double lambda, Index n) {
  if (lambda == 0.0) return 1.0;
  const double nd = static_cast<double>(n);
  const double root = std::sqrt(M_PI * lambda);
  return 1.0 + root * (std::log(2.0 * (nd - 1.0) / std::sqrt(lambda)) +
                       0.5 * specfun::kEulerGamma - 2.0);
}

double predicted_d_star_sq(double lambda, Index n) {
  const double nd = static_cast<double>(n);
  const double product = 2.0 * (1.0 - 1.0 / std::sqrt(nd));
  if (lambda == 0.0) return product;
  return product - 2.0 * std::sqrt(M_PI * lambda / nd) *
                       (std::log(2.0 * (nd - 1.0) / std::sqrt(lambda)) +
                        0.5 * specfun::kEulerGamma - 2.0);
}

double predicted_sqrt_lambda1_moment(double lambda) {
  return 1.0 - std::sqrt(M_PI * lambda) * (std::sqrt(2.0) - std::log(1.0 + std::sqrt(2.0)));
}

double asymptotic_moment(double alpha, Index n) {
  return specfun::catalan_alpha(alpha) * std::pow(static_cast<double>(n), 1.0 - alpha);
}

double asymptotic_entropy(double alpha, Index n) {
  if (alpha == 1.0) return std::log(static_cast<double>(n)) - 0.5;
  return (1.0 - asymptotic_moment(alpha, n)) / (alpha - 1.0);
}

double interpolated_moment(double lambda, double alpha, Index n) {
  if (lambda < 0) throw std::domain_error("interpolated_moment: Lambda >= 0");
  if (alpha == 1.0) return 1.0;
  const double mu_inf = asymptotic_moment(alpha, n);
  const double c = c_coefficient(alpha);
  return std::exp(-c * std::sqrt(lambda) / (1.0 - mu_inf)) * (1.0 - mu_inf) + mu_inf;
}

double interpolated_entropy(double lambda, double alpha, Index n) {
  if (lambda < 0) throw std::domain_error("interpolated_entropy: Lambda >= 0");
  if (alpha < 1.0) throw std::domain_error("interpolated_entropy: alpha >= 1 required");
  const double s_inf = asymptotic_entropy(alpha, n);
  const double rate = (alpha == 1.0)
                          ? std::pow(M_PI, 1.5)
                          : c_coefficient(alpha) / (alpha - 1.0);
  return (1.0 - std::exp(-rate * std::sqrt(lambda) / s_inf)) * s_inf;
}

double perturbative_sqrt_lambda_max(const std::string& observable) {
  if (observable == "mu_half" || observable == "d_star_sq") return 0.6;
  return 0.5;
}

UnitaryPerturbation unitary_perturbation(const linalg::EigenDecomposition& ua,
                                         const linalg::EigenDecomposition& ub,
                                         const RealVector& v_diagonal,
                                         double epsilon, int order,
                                         double gap_floor) {
  if (order != 1 && order != 2) {
    throw std::invalid_argument("unitary_perturbation: order must be 1 or 2");
  }
  const Index na = ua.eigenangles.size();
  const Index nb = ub.eigenangles.size();
  const Index n = na * nb;
  if (v_diagonal.size() != n) {
    throw std::invalid_argument("unitary_perturbation: diagonal length mismatch");
  }

  RealVector theta(n);
  for (Index j = 0; j < na; ++j) {
    for (Index k = 0; k < nb; ++k) {
      double t = ua.eigenangles[j] + ub.eigenangles[k];
      if (t >= 2.0 * M_PI) t -= 2.0 * M_PI;
      theta[j * nb + k] = t;
    }
  }

  // gap floor on the unperturbed spectrum
  {
    RealVector sorted = theta;
    std::sort(sorted.begin(), sorted.end());
    std::ostringstream bad;
    int nbad = 0;
    for (Index i = 0; i < n; ++i) {
      const double next = (i + 1 < n) ? sorted[i + 1] : sorted[0] + 2.0 * M_PI;
      if (next - sorted[i] < gap_floor) {
        if (nbad < 8) {
          bad << " (" << sorted[i] << ", " << next << ")";
        }
        ++nbad;
      }
    }
    if (nbad > 0) {
      throw std::runtime_error(
          "unitary_perturbation: unperturbed gaps below floor at angle pairs:" +
          bad.str() + (nbad > 8 ? " ..." : ""));
    }
  }

  // coupling generator in the product eigenbasis
  const ComplexMatrix w = linalg::kron(ua.eigenvectors, ub.eigenvectors);
  ComplexMatrix v = w.adjoint() * (v_diagonal.asDiagonal() * w);
  v = 0.5 * (v + ComplexMatrix(v.adjoint()));

  UnitaryPerturbation out;
  out.theta0 = theta;
  out.phi1.resize(n);
  out.phi2 = RealVector::Zero(n);
  out.max_imag_phi2 = 0.0;
  for (Index s = 0; s < n; ++s) out.phi1[s] = v(s, s).real();

  if (order == 2) {
    for (Index s = 0; s < n; ++s) {
      Complex acc(0, 0);
      for (Index p = 0; p < n; ++p) {
        if (p == s) continue;
        const double delta = theta[s] - theta[p];
        const Complex kernel =
            Complex(0, 1) / (std::polar(1.0, delta) - 1.0) + Complex(0, 0.5);
        acc += kernel * std::norm(v(p, s));
      }
      out.phi2[s] = acc.real();
      out.max_imag_phi2 = std::max(out.max_imag_phi2, std::abs(acc.imag()));
    }
  }

  // eigenvector corrections in the product eigenbasis, mapped back to the
  // computational basis at the end
  ComplexMatrix coeff = ComplexMatrix::Identity(n, n);
  for (Index s = 0; s < n; ++s) {
    for (Index p = 0; p < n; ++p) {
      if (p == s) continue;
      const double dp = theta[s] - theta[p];
      const Complex denom = std::polar(1.0, dp) - 1.0;
      coeff(p, s) += epsilon * Complex(0, 1) * v(p, s) / denom;
    }
  }
  if (order == 2) {
    const auto cot_half = [](double d) {
      return 0.5 * std::sin(d) / (2.0 * std::sin(0.5 * d) * std::sin(0.5 * d));
    };
    for (Index s = 0; s < n; ++s) {
      // second-order amplitude on each p != s; the self term renormalizes
      double norm_sum = 0.0;
      for (Index p = 0; p < n; ++p) {
        if (p == s) continue;
        const double dp = theta[s] - theta[p];
        Complex bracket(0, 0);
        for (Index r = 0; r < n; ++r) {
          if (r == s) continue;
          bracket += v(p, r) * v(r, s) * cot_half(theta[s] - theta[r]);
        }
        bracket -= v(p, s) * v(s, s) * cot_half(dp);
        coeff(p, s) += epsilon * epsilon * Complex(0, 1) /
                       (std::polar(1.0, dp) - 1.0) * bracket;
        const double sh = std::sin(0.5 * dp);
        norm_sum += std::norm(v(p, s)) / (sh * sh);
      }
      coeff(s, s) = 1.0 - epsilon * epsilon / 8.0 * norm_sum;
    }
  }
  for (Index s = 0; s < n; ++s) coeff.col(s) /= coeff.col(s).norm();
  out.vectors = w * coeff;
  return out;
}

}  // namespace entrans::theory
