#pragma once

#include "entrans/matrix.hpp"

namespace entrans::dynamics {

struct KickedRotorParams {
  Index n = 50;          // Hilbert dimension per rotor
  double k_a = 10.0;     // kick strengths
  double k_b = 9.0;
  double b = 0.0;        // coupling strength
  double theta_q = 0.34; // momentum-grid shift
  double theta_p = 0.24; // position-grid shift

  void validate() const;
};

enum class Subsystem { a, b };

// One-kick propagator of a single rotor on the N-torus: kinetic phases summed
// over the momentum grid (m + theta_q)/N times the kick phase evaluated on the
// position grid (n + theta_p)/N.
ComplexMatrix build_single_rotor(const KickedRotorParams& params, Subsystem which);

// Diagonal coupling phases exp(-i N b/(2 pi) cos(2 pi (n1 + n2 + 2 theta_p)/N))
// in the position product basis.
ComplexVector coupling_diagonal(const KickedRotorParams& params);

struct FloquetOperator {
  ComplexMatrix matrix;  // N^2 x N^2
  KickedRotorParams params;
};
FloquetOperator build_coupled_rotor(const KickedRotorParams& params);

struct LambdaKr {
  double exact;           // N^2/(4 pi^2) (1 - J0^2(N b / 2 pi))
  double small_b_approx;  // N^4 b^2 / (32 pi^4)
  bool small_b_regime;    // N b < 1
};
LambdaKr lambda_kicked_rotor(const KickedRotorParams& params);

// Random-matrix coupling calibrated to the rotor: eps = sqrt(3/(8 pi^4)) N b.
// Returns the value; callers should treat N b > 1 as outside the calibrated
// regime (see LambdaKr::small_b_regime).
double epsilon_from_b(const KickedRotorParams& params);

// Largest sqrt(Lambda) the rotor coupling can reach at dimension n.
double max_sqrt_lambda(Index n);

// Invert Lambda_KR(b) on the monotone branch (N b/(2 pi) below the first J0
// zero); throws std::domain_error when the target exceeds the cap.
double b_from_sqrt_lambda(Index n, double sqrt_lambda);

}  // namespace entrans::dynamics
