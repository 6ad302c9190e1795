#pragma once

#include <vector>

#include "qusd/matrixcore.hpp"

// Discrimination ensembles and the joint system-ancilla states produced by
// coupling each input state to an auxiliary qubit. The embedding unitary is
// never materialized; states are assembled from its output vectors, and a
// Gram-consistency check certifies that such a unitary exists.

namespace qusd {

/// Protocol inputs: priors p_i and failure amplitudes alpha_i. Pairwise
/// overlaps <psi_i|psi_j> factor as conj(alpha_i) * alpha_j by construction.
struct Ensemble {
  RealVector priors;
  ComplexVector alphas;

  Eigen::Index size() const noexcept { return priors.size(); }
  Complex overlap(Eigen::Index i, Eigen::Index j) const {
    return std::conj(alphas[i]) * alphas[j];
  }
};

// Validates: matching sizes, d >= 2, priors positive summing to 1, every
// |alpha_i| strictly inside (0, 1). Boundary amplitudes are hard errors:
// they correspond to identical or orthogonal input states.
Ensemble make_ensemble(RealVector priors, ComplexVector alphas);

enum class Construction { two_state, d_state };

/// A built protocol state: rho on dims (d, 2), the ensemble it came from,
/// and the post-coupling pure branch vectors (success branch on ancilla |0>,
/// failure branch on ancilla |1>).
struct ProtocolState {
  DensityMatrix rho;
  Ensemble ensemble;
  std::vector<ComplexVector> branch_vectors;
  Construction construction;
};

// Two-state protocol. The system basis is {|+>, |->}; alpha is the fixed
// input overlap <psi_+|psi_-> and alpha_minus is derived as
// alpha / conj(alpha_plus), making |alpha_plus| the single free parameter.
ProtocolState build_two_state(double p_plus, double p_minus, Complex alpha, Complex alpha_plus);

// d-state protocol: success branches land on the computational basis, the
// shared failure branch on u = (|1> + ... + |d>)/sqrt(d).
ProtocolState build_d_state(const RealVector& priors, const ComplexVector& alphas);

/// Matrix of pairwise inner products. Valid instances are Hermitian with
/// unit diagonal and PSD; full rank is equivalent to linear independence.
struct GramMatrix {
  ComplexMatrix entries;
  Eigen::Index size() const noexcept { return entries.rows(); }
};

GramMatrix make_gram(ComplexMatrix entries);
GramMatrix ensemble_gram(const Ensemble& ensemble);

struct EmbeddingCheck {
  bool consistent;
  double max_residual;
};

// True iff every off-diagonal target overlap equals conj(alpha_i) * alpha_j
// within `tolerance` -- exactly the condition for the coupling unitary to
// exist with the stated output vectors.
EmbeddingCheck validate_embedding(const Ensemble& ensemble, const GramMatrix& target,
                                  double tolerance = tol::embedding);

// Concrete unit vectors reproducing the Gram matrix (triangular
// factorization). Throws SingularGramError when min eigenvalue <=
// tol::gram_rank, i.e. the states would be linearly dependent.
std::vector<ComplexVector> states_from_gram(const GramMatrix& gram);

}  // namespace qusd
