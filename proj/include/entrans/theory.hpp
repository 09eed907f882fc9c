#pragma once

#include <string>
#include <vector>

#include "entrans/linalg.hpp"
#include "entrans/matrix.hpp"

namespace entrans::theory {

// Lambda = v^2 / D^2 with D the mean spacing 2 pi / (N_A N_B); v^2 is the
// mean square off-diagonal element of the coupling in the product eigenbasis.
struct TransitionParameter {
  double lambda = 0.0;
  double epsilon_or_b = 0.0;
  double mean_spacing = 0.0;
  double v_squared = 0.0;
};

// Evaluate the CUE-averaged bracket for an arbitrary diagonal unitary
// coupling:
//   1 + |tr U/(N_A N_B)|^2 - ||U^(A)/N_B||^2/N_A - ||U^(B)/N_A||^2/N_B
// with U^(A), U^(B) the partial traces over B resp. A.
TransitionParameter lambda_from_coupling(const ComplexVector& u_ab_diagonal,
                                         Index n_a, Index n_b,
                                         double coupling_knob = 0.0);

// Transition parameter of the random-phase diagonal ensemble; exact form and
// the small-coupling approximation N_A N_B eps^2 / 12.
double lambda_rmt(Index n_a, Index n_b, double epsilon);
double lambda_rmt_small_eps(Index n_a, Index n_b, double epsilon);
double max_lambda_rmt(Index n_a, Index n_b);
// Inverse of lambda_rmt on eps in [0, 1]; throws std::domain_error above the
// ensemble's cap.
double epsilon_from_lambda_rmt(Index n_a, Index n_b, double lambda);

// Exact two-level mixing weight replacing the divergent Lambda w / s^2.
double regularized_weight(double s, double w, double lambda);

struct Lambda12 {
  double lambda1;        // 1 - sqrt(pi Lambda)
  double lambda2_full;   // Ei/erfi closed form
  double lambda2_series; // small-Lambda expansion
};
Lambda12 predicted_lambda1_lambda2(double lambda);

// Moment coefficients of the regularized perturbation theory.
//   c1: leading coefficient of the largest eigenvalue moments
//   c2: leading coefficient of the summed lower-eigenvalue moments
//   c3: O(Lambda) coefficient
//   c : c1 - c2 = pi Gamma(alpha - 1/2)/Gamma(alpha - 1)
struct Coefficients {
  double c1, c2, c3, c;
};
Coefficients coefficients(double alpha);

double c1_coefficient(double alpha);   // alpha > 0
double c2_coefficient(double alpha);   // alpha > 1/2, diverges at 1/2
double c_coefficient(double alpha);    // alpha > 1/2; c(1) = 0
double c3_coefficient(double alpha);   // closed forms at 2,3,4, else quadrature
double c3_log_coefficient();           // pi^2 (4 - pi)/4

// Quadrature routes kept separate from the closed forms so the two can be
// checked against each other.
double c1_quadrature(double alpha);
double c2_quadrature(double alpha);
double c_middle_integral(double alpha);
double c3_quadrature(double alpha, int order = 96);
double c3_log_quadrature(int order = 96);

// Perturbative predictions (valid for small Lambda).
double predicted_moment(double lambda, double alpha);            // alpha > 1/2
double predicted_entropy(double lambda, double alpha);           // alpha > 1/2
double predicted_mu_half(double lambda, Index n);
double predicted_d_star_sq(double lambda, Index n);
double predicted_sqrt_lambda1_moment(double lambda);

// Recursively embedded interpolation across the whole transition.
double asymptotic_moment(double alpha, Index n);     // C_alpha N^(1-alpha)
double asymptotic_entropy(double alpha, Index n);    // alpha=1: ln N - 1/2
double interpolated_moment(double lambda, double alpha, Index n);
double interpolated_entropy(double lambda, double alpha, Index n);

// Default validity ceiling for the perturbative curves.
double perturbative_sqrt_lambda_max(const std::string& observable);

struct PredictionCurve {
  std::vector<double> lambda_grid;  // strictly increasing
  std::vector<double> values;
  std::string observable;
  enum class Regime { perturbative, interpolated, asymptotic } regime;
  double sqrt_lambda_valid_max;
};

// First/second order corrections for eigenpairs of
// (u_a kron u_b) exp(i eps diag(v)).
struct UnitaryPerturbation {
  RealVector theta0;       // unperturbed angles theta_j + theta_k mod 2 pi
  RealVector phi1;         // first-order angle corrections
  RealVector phi2;         // second-order angle corrections (order == 2)
  ComplexMatrix vectors;   // corrected eigenvectors, columns indexed j*n_b+k
  double max_imag_phi2;    // diagnostic: the cot-kernel sum must be real
};
UnitaryPerturbation unitary_perturbation(const linalg::EigenDecomposition& ua,
                                         const linalg::EigenDecomposition& ub,
                                         const RealVector& v_diagonal,
                                         double epsilon, int order,
                                         double gap_floor = 1e-8);

}  // namespace entrans::theory
