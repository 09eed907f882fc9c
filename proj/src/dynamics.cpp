#include "entrans/dynamics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "entrans/linalg.hpp"
#include "entrans/specfun.hpp"

namespace entrans::dynamics {

namespace {
constexpr double kFirstJ0Zero = 2.404825557695773;
}

void KickedRotorParams::validate() const {
  if (n < 2) throw std::invalid_argument("kicked rotor: n >= 2 required");
  if (theta_q < 0.0 || theta_q >= 1.0 || theta_p < 0.0 || theta_p >= 1.0) {
    throw std::invalid_argument("kicked rotor: grid shifts must lie in [0, 1)");
  }
  if (b < 0.0) throw std::invalid_argument("kicked rotor: b >= 0 required");
}

ComplexMatrix build_single_rotor(const KickedRotorParams& params, Subsystem which) {
  params.validate();
  const Index n = params.n;
  const double k = (which == Subsystem::a) ? params.k_a : params.k_b;
  const double nd = static_cast<double>(n);

  // kinetic factor g(d) = 1/N sum_m exp(-i pi (m+theta_q)^2/N)
  //                                 exp(2 pi i (m+theta_q) d / N),  d = n - n'
  ComplexVector g(2 * n - 1);
  for (Index d = -(n - 1); d <= n - 1; ++d) {
    Complex sum(0, 0);
    for (Index m = 0; m < n; ++m) {
      const double mq = static_cast<double>(m) + params.theta_q;
      const double phase = -M_PI * mq * mq / nd + 2.0 * M_PI * mq * static_cast<double>(d) / nd;
      sum += std::polar(1.0, phase);
    }
    g[d + n - 1] = sum / nd;
  }

  ComplexMatrix u(n, n);
  for (Index col = 0; col < n; ++col) {
    const double q = (static_cast<double>(col) + params.theta_p) / nd;
    const Complex kick = std::polar(1.0, -nd * k / (2.0 * M_PI) * std::cos(2.0 * M_PI * q));
    for (Index row = 0; row < n; ++row) {
      u(row, col) = kick * g[col - row + n - 1];
    }
  }
  return u;
}

ComplexVector coupling_diagonal(const KickedRotorParams& params) {
  const Index n = params.n;
  const double nd = static_cast<double>(n);
  ComplexVector d(n * n);
  for (Index n1 = 0; n1 < n; ++n1) {
    for (Index n2 = 0; n2 < n; ++n2) {
      const double arg = 2.0 * M_PI / nd *
                         (static_cast<double>(n1 + n2) + 2.0 * params.theta_p);
      d[n1 * n + n2] = std::polar(1.0, -nd * params.b / (2.0 * M_PI) * std::cos(arg));
    }
  }
  return d;
}

FloquetOperator build_coupled_rotor(const KickedRotorParams& params) {
  params.validate();
  if (params.n * params.n > linalg::kMaxKronDim) {
    throw std::length_error("kicked rotor: N^2 above configured cap");
  }
  const ComplexMatrix ua = build_single_rotor(params, Subsystem::a);
  const ComplexMatrix ub = build_single_rotor(params, Subsystem::b);
  ComplexMatrix full = linalg::kron(ua, ub);
  const ComplexVector d = coupling_diagonal(params);
  for (Index j = 0; j < d.size(); ++j) full.col(j) *= d[j];
  return {std::move(full), params};
}

LambdaKr lambda_kicked_rotor(const KickedRotorParams& params) {
  const double nd = static_cast<double>(params.n);
  const double kappa = nd * params.b / (2.0 * M_PI);
  const double j0 = specfun::bessel_j0(kappa);
  LambdaKr out;
  out.exact = nd * nd / (4.0 * M_PI * M_PI) * (1.0 - j0 * j0);
  out.small_b_approx = std::pow(nd * params.b, 2) * nd * nd / (32.0 * std::pow(M_PI, 4));
  out.small_b_regime = nd * params.b < 1.0;
  return out;
}

double epsilon_from_b(const KickedRotorParams& params) {
  return std::sqrt(3.0 / (8.0 * std::pow(M_PI, 4))) * static_cast<double>(params.n) * params.b;
}

double max_sqrt_lambda(Index n) { return static_cast<double>(n) / (2.0 * M_PI); }

double b_from_sqrt_lambda(Index n, double sqrt_lambda) {
  if (sqrt_lambda < 0.0) throw std::domain_error("b_from_sqrt_lambda: negative target");
  if (sqrt_lambda == 0.0) return 0.0;
  const double cap = max_sqrt_lambda(n);
  if (sqrt_lambda >= cap) {
    throw std::domain_error("coupling target sqrt(Lambda) = " +
                            std::to_string(sqrt_lambda) +
                            " unreachable for N = " + std::to_string(n) +
                            " rotors; the J0 form caps at N/(2 pi) = " +
                            std::to_string(cap));
  }
  const double target = sqrt_lambda * sqrt_lambda;
  KickedRotorParams p;
  p.n = n;
  double lo = 0.0;
  double hi = 2.0 * M_PI * kFirstJ0Zero / static_cast<double>(n);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    p.b = mid;
    if (lambda_kicked_rotor(p).exact < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace entrans::dynamics
