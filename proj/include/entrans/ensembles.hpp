#pragma once

#include <cstdint>
#include <vector>

#include "entrans/matrix.hpp"
#include "entrans/rng.hpp"

namespace entrans::ensembles {

struct TransitionEnsembleParams {
  Index n_a = 2;
  Index n_b = 2;
  double epsilon = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

// One member of the random matrix transition ensemble:
// (u_a kron u_b) diag(exp(2 pi i eps xi_j)), xi uniform on (-1/2, 1/2].
struct EnsembleRealization {
  ComplexMatrix u_a;
  ComplexMatrix u_b;
  RealVector xi;
  double epsilon = 0.0;

  ComplexVector coupling_diag() const;
  ComplexMatrix u_full() const;  // dense operator, built on demand
};

// Haar-distributed unitary: QR of a complex Ginibre matrix with the R-diagonal
// phases folded into Q.
ComplexMatrix sample_cue(Index n, RngStream& rng);

EnsembleRealization build_transition_operator(const TransitionEnsembleParams& params,
                                              RngStream& rng);

struct MatrixElementSample {
  std::vector<double> w_values;  // |<jk|V|j'k'>|^2 / v^2, unit mean
  double v_squared = 0.0;        // empirical mean square element
};

// Off-diagonal elements of the Hermitian coupling generator V = diag(2 pi xi)
// in the eigenbasis of u_a kron u_b, sampled over `count` random index pairs.
MatrixElementSample sample_matrix_elements(const EnsembleRealization& realization,
                                           Index count, RngStream& rng);

// Same statistic for an arbitrary diagonal generator given subsystem
// eigenvector matrices (used for the dynamical-system cross-check).
MatrixElementSample sample_matrix_elements_for(const ComplexMatrix& vecs_a,
                                               const ComplexMatrix& vecs_b,
                                               const RealVector& v_diagonal,
                                               Index count, RngStream& rng);

inline double closer_neighbor_reference(double s) {
  return 2.0 * std::exp(-2.0 * s);
}
inline double poisson_reference(double s) { return std::exp(-s); }

// Nearest-neighbor spacings of a set of eigenangles on the circle, unfolded to
// unit mean (includes the wrap-around spacing).
std::vector<double> unfolded_spacings(RealVector angles);

}  // namespace entrans::ensembles
