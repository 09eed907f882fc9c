#include "entrans/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace entrans::linalg {

namespace {

// fixed gauge phase for the Hermitian reduction; any phase works, this one
// keeps runs reproducible
const Complex kPhase = std::polar(1.0, 0.7390851332151607);

void fix_column_gauge(ComplexMatrix& v) {
  for (Index j = 0; j < v.cols(); ++j) {
    Index imax = 0;
    double best = 0.0;
    for (Index i = 0; i < v.rows(); ++i) {
      const double m = std::norm(v(i, j));
      if (m > best) {
        best = m;
        imax = i;
      }
    }
    const Complex pivot = v(imax, j);
    const double mag = std::abs(pivot);
    if (mag > 0) v.col(j) *= std::conj(pivot) / mag;
  }
}

struct UnitaryEigCore {
  // apply_u maps a block of columns X to U X
  using ApplyFn = std::function<ComplexMatrix(const ComplexMatrix&)>;

  static EigenDecomposition run(const ComplexMatrix& h, const ApplyFn& apply_u) {
    const Index n = h.rows();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
    if (es.info() != Eigen::Success) {
      throw std::runtime_error("eig_unitary: Hermitian solve failed");
    }
    RealVector d = es.eigenvalues();
    ComplexMatrix v = es.eigenvectors();
    ComplexMatrix m = apply_u(v);

    ComplexVector mu(n);
    double tau = 1e-7;
    for (int attempt = 0; attempt < 4; ++attempt) {
      fix_clusters(d, v, m, tau);
      double worst = 0.0;
      for (Index j = 0; j < n; ++j) {
        mu[j] = v.col(j).dot(m.col(j));
        const double r = (m.col(j) - mu[j] * v.col(j)).norm();
        worst = std::max(worst, r);
      }
      if (worst <= 5e-9) break;
      tau *= 30.0;
    }

    EigenDecomposition out;
    out.eigenangles.resize(n);
    std::vector<Index> order(n);
    std::iota(order.begin(), order.end(), 0);
    RealVector angles(n);
    for (Index j = 0; j < n; ++j) {
      double a = std::arg(mu[j]);
      if (a < 0) a += 2.0 * M_PI;
      if (a >= 2.0 * M_PI) a -= 2.0 * M_PI;
      angles[j] = a;
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return angles[a] < angles[b]; });
    out.eigenvectors.resize(n, n);
    for (Index j = 0; j < n; ++j) {
      out.eigenangles[j] = angles[order[j]];
      out.eigenvectors.col(j) = v.col(order[j]);
    }
    fix_column_gauge(out.eigenvectors);
    return out;
  }

 private:
  // Re-diagonalize each group of nearly equal Hermitian eigenvalues in the
  // small normal block B = Vc^dagger U Vc.  A quadrature phase separates
  // angle pairs that the first cosine folded together.
  static void fix_clusters(const RealVector& d, ComplexMatrix& v,
                           ComplexMatrix& m, double tau) {
    const Index n = d.size();
    Index i = 0;
    while (i < n) {
      Index k = i + 1;
      while (k < n && d[k] - d[k - 1] < tau) ++k;
      const Index sz = k - i;
      if (sz > 1) {
        ComplexMatrix b = v.middleCols(i, sz).adjoint() * m.middleCols(i, sz);
        const ComplexMatrix w = diagonalize_normal_block(b);
        const ComplexMatrix vc = v.middleCols(i, sz) * w;
        const ComplexMatrix mc = m.middleCols(i, sz) * w;
        v.middleCols(i, sz) = vc;
        m.middleCols(i, sz) = mc;
      }
      i = k;
    }
  }

  static ComplexMatrix diagonalize_normal_block(const ComplexMatrix& b) {
    const Index k = b.rows();
    ComplexMatrix w = ComplexMatrix::Identity(k, k);
    ComplexMatrix cur = b;
    // a couple of phase choices; exactly degenerate angles keep any basis
    const double phases[3] = {M_PI_2, M_PI_2 + 0.91, M_PI_2 + 1.57};
    for (double extra : phases) {
      const Complex c2 = kPhase * std::polar(1.0, extra);
      ComplexMatrix h2 = 0.5 * (c2 * cur + (c2 * cur).adjoint());
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h2);
      w = w * es.eigenvectors();
      cur = es.eigenvectors().adjoint() * cur * es.eigenvectors();
      double offdiag = 0.0;
      for (Index a = 0; a < k; ++a)
        for (Index c = 0; c < k; ++c)
          if (a != c) offdiag = std::max(offdiag, std::abs(cur(a, c)));
      if (offdiag < 1e-11) break;
    }
    return w;
  }
};

void check_square(const ComplexMatrix& u, const char* who) {
  if (u.rows() != u.cols()) {
    throw std::invalid_argument(std::string(who) + ": matrix must be square, got " +
                                std::to_string(u.rows()) + "x" +
                                std::to_string(u.cols()));
  }
}

}  // namespace

double unitarity_deviation(const ComplexMatrix& u) {
  const ComplexMatrix g = u * u.adjoint() - ComplexMatrix::Identity(u.rows(), u.rows());
  return g.cwiseAbs().maxCoeff();
}

EigenDecomposition eig_unitary(const ComplexMatrix& u) {
  check_square(u, "eig_unitary");
  const double dev = unitarity_deviation(u);
  if (dev > kUnitarityTol) {
    throw std::invalid_argument("eig_unitary: input not unitary, max |UU^+ - I| = " +
                                std::to_string(dev));
  }
  const ComplexMatrix cu = kPhase * u;
  const ComplexMatrix h = 0.5 * (cu + cu.adjoint());
  return UnitaryEigCore::run(h, [&u](const ComplexMatrix& x) -> ComplexMatrix {
    return u * x;
  });
}

EigenDecomposition eig_unitary_product(const ComplexMatrix& ua,
                                       const ComplexMatrix& ub,
                                       const ComplexVector& coupling_diag) {
  check_square(ua, "eig_unitary_product");
  check_square(ub, "eig_unitary_product");
  const Index na = ua.rows();
  const Index nb = ub.rows();
  const Index n = na * nb;
  if (coupling_diag.size() != n) {
    throw std::invalid_argument("eig_unitary_product: diagonal length mismatch");
  }

  // H = (c U + (c U)^+)/2 with U = (ua kron ub) diag(d), built entry-wise
  ComplexMatrix h(n, n);
  for (Index j1 = 0; j1 < na; ++j1) {
    for (Index j2 = 0; j2 < nb; ++j2) {
      const Index col = j1 * nb + j2;
      const Complex dc = kPhase * coupling_diag[col];
      for (Index i1 = 0; i1 < na; ++i1) {
        const Complex a = ua(i1, j1) * dc;
        for (Index i2 = 0; i2 < nb; ++i2) {
          h(i1 * nb + i2, col) = a * ub(i2, j2);
        }
      }
    }
  }
  for (Index c = 0; c < n; ++c) {
    h(c, c) = 0.5 * (h(c, c) + std::conj(h(c, c)));
    for (Index r = c + 1; r < n; ++r) {
      const Complex val = 0.5 * (h(r, c) + std::conj(h(c, r)));
      h(r, c) = val;
      h(c, r) = std::conj(val);
    }
  }

  const auto apply = [&](const ComplexMatrix& x) -> ComplexMatrix {
    ComplexMatrix out(n, x.cols());
    ComplexMatrix buf(na, nb);
    for (Index c = 0; c < x.cols(); ++c) {
      for (Index i = 0; i < n; ++i) {
        buf(i / nb, i % nb) = coupling_diag[i] * x(i, c);
      }
      const ComplexMatrix y = ua * buf * ub.transpose();
      for (Index i = 0; i < n; ++i) out(i, c) = y(i / nb, i % nb);
    }
    return out;
  };
  return UnitaryEigCore::run(h, apply);
}

std::pair<RealVector, ComplexMatrix> eig_hermitian(const ComplexMatrix& h) {
  check_square(h, "eig_hermitian");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("eig_hermitian failed to converge");
  }
  return {es.eigenvalues(), es.eigenvectors()};
}

Svd svd(const ComplexMatrix& a) {
  Eigen::BDCSVD<ComplexMatrix> dec(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {dec.matrixU(), dec.singularValues(), dec.matrixV()};
}

RealVector singular_values(const ComplexMatrix& a) {
  Eigen::BDCSVD<ComplexMatrix> dec(a);
  return dec.singularValues();
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  const Index rows = a.rows() * b.rows();
  const Index cols = a.cols() * b.cols();
  if (rows > kMaxKronDim || cols > kMaxKronDim) {
    throw std::length_error("kron: product dimension " + std::to_string(rows) + "x" +
                            std::to_string(cols) + " exceeds cap " +
                            std::to_string(kMaxKronDim));
  }
  ComplexMatrix out(rows, cols);
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ComplexMatrix reshape_state(const ComplexVector& psi, Index n_a, Index n_b) {
  if (psi.size() != n_a * n_b) {
    throw std::invalid_argument("reshape_state: length " + std::to_string(psi.size()) +
                                " does not factor as " + std::to_string(n_a) + "*" +
                                std::to_string(n_b));
  }
  ComplexMatrix c(n_a, n_b);
  for (Index i = 0; i < n_a; ++i)
    for (Index j = 0; j < n_b; ++j) c(i, j) = psi[i * n_b + j];
  return c;
}

ComplexVector unreshape_state(const ComplexMatrix& c) {
  ComplexVector psi(c.rows() * c.cols());
  for (Index i = 0; i < c.rows(); ++i)
    for (Index j = 0; j < c.cols(); ++j) psi[i * c.cols() + j] = c(i, j);
  return psi;
}

double circular_difference(double a, double b) {
  double d = std::fmod(a - b, 2.0 * M_PI);
  if (d <= -M_PI) d += 2.0 * M_PI;
  if (d > M_PI) d -= 2.0 * M_PI;
  return d;
}

ComplexVector kron_apply(const ComplexMatrix& ua, const ComplexMatrix& ub,
                         const ComplexVector& x) {
  const Index na = ua.rows();
  const Index nb = ub.rows();
  if (x.size() != ua.cols() * ub.cols()) {
    throw std::invalid_argument("kron_apply: size mismatch");
  }
  ComplexMatrix buf(ua.cols(), ub.cols());
  for (Index i = 0; i < x.size(); ++i) buf(i / ub.cols(), i % ub.cols()) = x[i];
  const ComplexMatrix y = ua * buf * ub.transpose();
  ComplexVector out(na * nb);
  for (Index i = 0; i < out.size(); ++i) out[i] = y(i / nb, i % nb);
  return out;
}

}  // namespace entrans::linalg
