#pragma once

#include <map>
#include <vector>

#include "entrans/matrix.hpp"

namespace entrans::schmidt {

struct BipartiteState {
  ComplexVector amplitudes;
  Index n_a = 0;
  Index n_b = 0;

  BipartiteState(ComplexVector amps, Index na, Index nb);
  ComplexMatrix coefficient_matrix() const;
};

struct SchmidtSpectrum {
  RealVector lambdas;          // descending, summing to 1
  ComplexMatrix vectors_a;     // empty unless requested
  ComplexMatrix vectors_b;
  bool degenerate = false;     // ties among lambdas within 1e-12
};

// Eigenvalues of the reduced density matrix as squared singular values of the
// coefficient matrix.  Values below 1e-14 are clamped to zero.
SchmidtSpectrum schmidt_spectrum(const BipartiteState& psi, bool with_vectors = false);

// Power sums mu_alpha = sum lambda^alpha; alpha = 0 counts the Schmidt rank
// dimension n_a, negative alpha is rejected.
std::map<double, double> moments(const SchmidtSpectrum& spectrum,
                                 const std::vector<double>& alphas);

struct EntropySet {
  std::map<double, double> hct;    // (1 - mu_alpha)/(alpha - 1); von Neumann at 1
  std::map<double, double> renyi;  // ln mu_alpha / (1 - alpha); von Neumann at 1
};
EntropySet entropies(const SchmidtSpectrum& spectrum, const std::vector<double>& alphas);

// Everything the sweep records about one state, bundled.
struct EntanglementSummary {
  std::map<double, double> moments;
  std::map<double, double> entropies;  // HCT
  std::map<double, double> renyi;
  double d_star_sq = 0.0;
};
EntanglementSummary summarize(const SchmidtSpectrum& spectrum, Index n_a,
                              const std::vector<double>& alphas);

double von_neumann_entropy(const RealVector& lambdas);
double d_star_sq_from_lambdas(const RealVector& lambdas, Index n_a);

struct ClosestMaxEntangled {
  BipartiteState state;
  double d_star_sq;
  bool degenerate;  // Schmidt vector choice ambiguous (tied lambdas)
};
ClosestMaxEntangled closest_maximally_entangled(const BipartiteState& psi);

struct HaarReference {
  double s1;                    // ln N_A - 1/(2Q)
  double s2_asymptotic;         // 1 - (Q+1)/(N_A Q)
  double s2_exact;              // 1 - (N_A+N_B)/(1+N_A N_B)
  double d_star_sq;             // elliptic-integral closed form
  double d_star_sq_large_q;     // 1/(4Q) tail
};
HaarReference haar_reference(double q, Index n_a);

}  // namespace entrans::schmidt
