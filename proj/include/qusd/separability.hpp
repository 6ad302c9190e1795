#pragma once

#include <optional>
#include <vector>

#include "qusd/ensembles.hpp"

// PPT testing, the closed-form separability conditions of the protocol
// family, principal-minor determinants, and explicit separable
// decompositions of the protocol states.

namespace qusd {

struct PptResult {
  bool ppt;
  double min_eigenvalue;  // of the system-side partial transpose
};

PptResult ppt_test(const DensityMatrix& rho);

struct ConditionResult {
  bool holds;
  double residual;
};

// Two-state family: p+ sqrt((1-|a+|^2)/2) a+ == p- sqrt((1-|a-|^2)/2) a-
// as complex numbers, within `tolerance` on the difference modulus.
ConditionResult two_state_condition(const Ensemble& ensemble,
                                    double tolerance = tol::condition_equality);

// d-state family: p_i alpha_i sqrt(1-|alpha_i|^2) equal across i.
// Residual is the largest pairwise deviation.
ConditionResult d_state_condition(const Ensemble& ensemble,
                                  double tolerance = tol::condition_equality);

// The 4x4 principal minor of the system-side partial transpose picking rows
// and columns (i,0),(i,1),(j,0),(j,1). Indices are 0-based, require i < j.
ComplexMatrix minor_matrix(const Ensemble& ensemble, Eigen::Index i, Eigen::Index j);

// Closed-form determinant of that minor:
//   -(1/d^2) (p_i(1-|a_i|^2) + p_j(1-|a_j|^2)) (sum_k p_k|a_k|^2)
//          |p_i a_i sqrt(1-|a_i|^2) - p_j a_j sqrt(1-|a_j|^2)|^2
double minor_determinant_closed_form(const Ensemble& ensemble, Eigen::Index i, Eigen::Index j);

/// A finite sum rho = sum_t weight_t (system_op_t (x) ancilla_op_t) with
/// every factor PSD. Stored unnormalized with unit weights by default;
/// normalize() rescales factors to unit trace and moves mass into weights.
struct SeparableDecomposition {
  struct Term {
    double weight;
    ComplexMatrix system_op;
    ComplexMatrix ancilla_op;
  };
  std::vector<Term> terms;
  bool normalized = false;

  ComplexMatrix reassemble() const;
  void normalize();
};

// Explicit two-term separable decomposition of a protocol state whose
// closed-form condition holds. Throws ConditionNotMetError otherwise, and
// ReconstructionError if the reassembled matrix misses rho by more than
// tol::reconstruction_fail or a factor fails PSD.
SeparableDecomposition build_decomposition(const ProtocolState& state);

struct SeparabilityVerdict {
  bool ppt;
  double min_pt_eigenvalue;
  bool closed_form_condition;
  double condition_residual;
  std::optional<SeparableDecomposition> decomposition;
  bool consistent;  // false iff condition holds but PPT fails
};

SeparabilityVerdict analyze_separability(const ProtocolState& state,
                                         double condition_tolerance = tol::condition_equality);

}  // namespace qusd
