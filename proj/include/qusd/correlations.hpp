#pragma once

#include <vector>

#include "qusd/ensembles.hpp"
#include "qusd/separability.hpp"

// Quantum discord on either side by optimization over rank-1 projective
// measurements, plus exact zero-discord certification via pairwise
// commutators of the operator Schmidt factors.

namespace qusd {

// Which party is measured. left = the system (first factor), right = the
// ancilla (second factor). Discord is asymmetric in this choice.
enum class Side { left, right };

/// A rank-1 projective measurement basis on one subsystem.
/// dim == 2: angles = {theta in [0,pi], phi in [0,2pi)} Bloch pair.
/// dim >  2: Givens-rotation angles, one (theta, phi) pair per index pair
/// (i,j), i < j, ordered (0,1),(0,2),...,(0,m-1),(1,2),...; the columns of
/// the resulting unitary are the measurement vectors.
struct MeasurementBasis {
  Side subsystem;
  Eigen::Index dim;
  std::vector<double> angles;

  // Columns are the measurement vectors; each column's global phase is fixed
  // so its first component is real and nonnegative.
  ComplexMatrix vectors() const;
};

MeasurementBasis qubit_basis(Side subsystem, double theta, double phi);
MeasurementBasis givens_basis(Side subsystem, Eigen::Index dim, std::vector<double> angles);

// sum_k p_k S(rho_{other|k}) in bits for the given basis; outcomes with
// p_k <= tol::outcome_weight contribute 0.
double conditional_entropy(const DensityMatrix& rho, const MeasurementBasis& basis);

/// Deterministic optimizer settings: coarse grid, then derivative-free
/// compass refinement from the best grid seeds. Ties break toward the
/// lexicographically smallest angle tuple.
struct DiscordConfig {
  int qubit_theta_points = 32;
  int qubit_phi_points = 64;
  int qutrit_theta_points = 4;
  int qutrit_phi_points = 6;
  int refine_seeds = 5;
  double step_tolerance = 1e-7;         // radians; refinement stops below this
  double improvement_tolerance = 1e-10; // bits; smaller gains are not taken
};

struct DiscordReport {
  Side side;
  double discord;       // best-found upper bound, clamped to >= 0
  double mutual_info;
  MeasurementBasis argmin_basis;
  long optimizer_evals;
  bool zero_certified;
  double commutator_residual;
};

// Full discord optimization. The measured side must have dimension 2 or 3
// (UnsupportedDimensionError otherwise); certification below works at any
// dimension.
DiscordReport discord(const DensityMatrix& rho, Side side, const DiscordConfig& config = {});

/// rho = sum_n c_n S_n (x) F_n with Hilbert-Schmidt-orthonormal {S_n} and
/// {F_n}; coefficients descending, rank = count above tol::schmidt_rank.
struct OperatorSchmidtDecomposition {
  RealVector coefficients;
  std::vector<ComplexMatrix> system_ops;   // S_n
  std::vector<ComplexMatrix> ancilla_ops;  // F_n
  Eigen::Index rank;
};

OperatorSchmidtDecomposition operator_schmidt(const DensityMatrix& rho);

struct CommutatorCertificate {
  bool zero_discord;
  double residual;  // max entry magnitude over pairwise commutators
};

// Zero-discord iff the named side's operator Schmidt factors pairwise
// commute;
// residual <= tol::commutator_zero certifies zero.
CommutatorCertificate zero_discord_certify(const DensityMatrix& rho, Side side);

/// The closed-form zero-left-discord check for protocol ensembles. The
/// balance equality characterizes zero left discord only together with the
/// closed-form separability condition, so both flags are reported.
struct LeftZeroReport {
  bool balanced;                 // p_i (1 - |alpha_i|^2) equal across i
  double balance_residual;
  bool separable_condition;      // d_state_condition on the same ensemble
  double separability_residual;
  bool zero_left_discord;        // conjunction of the two
};

LeftZeroReport left_zero_condition_closed_form(const Ensemble& ensemble,
                                               double tolerance = tol::condition_equality);

}  // namespace qusd
