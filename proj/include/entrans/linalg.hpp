#pragma once

#include <utility>

#include "entrans/matrix.hpp"

namespace entrans::linalg {

inline constexpr double kUnitarityTol = 1e-10;
inline constexpr Index kMaxKronDim = 10001;  // admits N = 100 coupled rotors

struct EigenDecomposition {
  RealVector eigenangles;      // in [0, 2pi), ascending
  ComplexMatrix eigenvectors;  // unit-norm columns matching eigenangles
};

struct Svd {
  ComplexMatrix u;
  RealVector singular_values;  // descending, nonnegative
  ComplexMatrix v;             // a = u * diag(s) * v.adjoint()
};

// max-norm of U U^dagger - I
double unitarity_deviation(const ComplexMatrix& u);

// Spectral decomposition of a unitary matrix.  Reduces to a Hermitian
// problem for Re(c U), then re-diagonalizes clusters of nearly equal
// cos-eigenvalues so that distinct eigenangles folded together by the cosine
// are separated.  Residual per pair is held to 1e-8.
EigenDecomposition eig_unitary(const ComplexMatrix& u);

// Same decomposition for the structured operator (ua kron ub) diag(d)
// without paying a dense n^3 product for the residual/cluster pass.
EigenDecomposition eig_unitary_product(const ComplexMatrix& ua,
                                       const ComplexMatrix& ub,
                                       const ComplexVector& coupling_diag);

// Hermitian eigendecomposition, ascending eigenvalues.
std::pair<RealVector, ComplexMatrix> eig_hermitian(const ComplexMatrix& h);

Svd svd(const ComplexMatrix& a);
RealVector singular_values(const ComplexMatrix& a);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

// Coefficient matrix of a bipartite amplitude vector: component
// i * n_b + j lands at entry (i, j).
ComplexMatrix reshape_state(const ComplexVector& psi, Index n_a, Index n_b);
ComplexVector unreshape_state(const ComplexMatrix& c);

// Reduce an angle difference to (-pi, pi]
double circular_difference(double a, double b);

// (ua kron ub) x applied without forming the kron; x has length
// rows(ua)*rows(ub)
ComplexVector kron_apply(const ComplexMatrix& ua, const ComplexMatrix& ub,
                         const ComplexVector& x);

}  // namespace entrans::linalg
