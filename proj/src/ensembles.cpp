#include "entrans/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "entrans/linalg.hpp"

namespace entrans::ensembles {

void TransitionEnsembleParams::validate() const {
  if (n_a < 2) throw std::invalid_argument("transition ensemble: n_a >= 2 required");
  if (n_a > n_b) throw std::invalid_argument("transition ensemble: n_a <= n_b required");
  if (epsilon < 0) throw std::invalid_argument("transition ensemble: epsilon >= 0 required");
  if (n_a * n_b > linalg::kMaxKronDim) {
    throw std::length_error("transition ensemble: product dimension above cap");
  }
}

ComplexVector EnsembleRealization::coupling_diag() const {
  ComplexVector d(xi.size());
  for (Index j = 0; j < xi.size(); ++j) {
    d[j] = std::polar(1.0, 2.0 * M_PI * epsilon * xi[j]);
  }
  return d;
}

ComplexMatrix EnsembleRealization::u_full() const {
  ComplexMatrix full = linalg::kron(u_a, u_b);
  const ComplexVector d = coupling_diag();
  for (Index j = 0; j < d.size(); ++j) full.col(j) *= d[j];
  return full;
}

ComplexMatrix sample_cue(Index n, RngStream& rng) {
  if (n < 1) throw std::invalid_argument("sample_cue: n >= 1 required");
  ComplexMatrix g(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      g(i, j) = Complex(rng.gaussian(), rng.gaussian());
    }
  }
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  for (Index j = 0; j < n; ++j) {
    const Complex r = qr.matrixQR()(j, j);
    const double mag = std::abs(r);
    q.col(j) *= (mag > 0) ? r / mag : Complex(1, 0);
  }
  return q;
}

EnsembleRealization build_transition_operator(const TransitionEnsembleParams& params,
                                              RngStream& rng) {
  params.validate();
  EnsembleRealization out;
  out.u_a = sample_cue(params.n_a, rng);
  out.u_b = sample_cue(params.n_b, rng);
  out.xi.resize(params.n_a * params.n_b);
  for (Index j = 0; j < out.xi.size(); ++j) out.xi[j] = rng.uniform_symmetric();
  out.epsilon = params.epsilon;
  return out;
}

MatrixElementSample sample_matrix_elements_for(const ComplexMatrix& vecs_a,
                                               const ComplexMatrix& vecs_b,
                                               const RealVector& v_diagonal,
                                               Index count, RngStream& rng) {
  const Index na = vecs_a.cols();
  const Index nb = vecs_b.cols();
  const Index n = na * nb;
  if (v_diagonal.size() != n) {
    throw std::invalid_argument("sample_matrix_elements: diagonal length mismatch");
  }
  MatrixElementSample out;
  out.w_values.reserve(count);
  double sum = 0.0;
  for (Index s = 0; s < count; ++s) {
    Index j = static_cast<Index>(rng.uniform_index(na));
    Index k = static_cast<Index>(rng.uniform_index(nb));
    Index jp = j, kp = k;
    while (jp == j && kp == k) {
      jp = static_cast<Index>(rng.uniform_index(na));
      kp = static_cast<Index>(rng.uniform_index(nb));
    }
    // <jk|V|j'k'> with V diagonal in the computational product basis
    Complex elem(0, 0);
    for (Index m1 = 0; m1 < na; ++m1) {
      const Complex a = std::conj(vecs_a(m1, j)) * vecs_a(m1, jp);
      for (Index m2 = 0; m2 < nb; ++m2) {
        elem += a * std::conj(vecs_b(m2, k)) * vecs_b(m2, kp) *
                v_diagonal[m1 * nb + m2];
      }
    }
    const double w = std::norm(elem);
    out.w_values.push_back(w);
    sum += w;
  }
  out.v_squared = sum / static_cast<double>(count);
  if (out.v_squared <= 0.0) {
    // constant diagonal: V acts as a multiple of the identity, all
    // off-diagonal elements vanish
    return out;
  }
  for (double& w : out.w_values) w /= out.v_squared;
  return out;
}

MatrixElementSample sample_matrix_elements(const EnsembleRealization& realization,
                                           Index count, RngStream& rng) {
  const linalg::EigenDecomposition da = linalg::eig_unitary(realization.u_a);
  const linalg::EigenDecomposition db = linalg::eig_unitary(realization.u_b);
  // near-degenerate subsystem spectra make the eigenbasis ill-defined
  const auto min_gap = [](const RealVector& ang) {
    double g = 2.0 * M_PI;
    for (Index i = 0; i + 1 < ang.size(); ++i) g = std::min(g, ang[i + 1] - ang[i]);
    if (ang.size() > 1) {
      g = std::min(g, ang[0] + 2.0 * M_PI - ang[ang.size() - 1]);
    }
    return g;
  };
  if (min_gap(da.eigenangles) < 1e-10 || min_gap(db.eigenangles) < 1e-10) {
    throw std::runtime_error("sample_matrix_elements: degenerate subsystem eigenbasis");
  }
  RealVector v_diag(realization.xi.size());
  for (Index j = 0; j < v_diag.size(); ++j) v_diag[j] = 2.0 * M_PI * realization.xi[j];
  return sample_matrix_elements_for(da.eigenvectors, db.eigenvectors, v_diag, count, rng);
}

std::vector<double> unfolded_spacings(RealVector angles) {
  std::sort(angles.begin(), angles.end());
  const Index n = angles.size();
  std::vector<double> s(n);
  const double scale = static_cast<double>(n) / (2.0 * M_PI);
  for (Index i = 0; i + 1 < n; ++i) s[i] = (angles[i + 1] - angles[i]) * scale;
  s[n - 1] = (angles[0] + 2.0 * M_PI - angles[n - 1]) * scale;
  return s;
}

}  // namespace entrans::ensembles
