#pragma once

// Central numeric tolerance constants. Every module reads its thresholds
// from here so near-boundary behaviour can be reasoned about in one place.

namespace qusd::tol {

// Density-matrix validity.
inline constexpr double hermiticity = 1e-12;  // max |rho - rho^dag| entry
inline constexpr double unit_trace = 1e-12;   // |Tr rho - 1|
inline constexpr double psd = 1e-10;          // min eigenvalue >= -psd

// Eigensolving and decompositions.
inline constexpr double hermitian_input = 1e-10;    // precondition for spectra
inline constexpr double spectrum_residual = 1e-10;  // |H - V L V^dag|
inline constexpr double schmidt_rank = 1e-10;       // singular-value cutoff

// Entropy.
inline constexpr double entropy_clip = 1e-12;    // eigenvalues below count as 0
inline constexpr double outcome_weight = 1e-14;  // measurement outcomes below contribute 0

// Ensembles and closed-form conditions.
inline constexpr double prior_sum = 1e-12;           // |sum p_i - 1|
inline constexpr double boundary_amplitude = 1e-12;  // |alpha| within this of {0,1} is degenerate
inline constexpr double condition_equality = 1e-10;  // closed-form separability / discord conditions
inline constexpr double embedding = 1e-10;           // Gram-vs-overlap residual
inline constexpr double gram_rank = 1e-10;           // min Gram eigenvalue for independence

// Discord certification and optimization.
inline constexpr double commutator_zero = 1e-8;  // zero-discord commutator residual
inline constexpr double discord_clamp = 1e-9;    // negative values within this clamp to 0

// Separable decompositions.
inline constexpr double reconstruction = 1e-10;       // expected reassembly residual
inline constexpr double reconstruction_fail = 1e-8;   // residual above this is a hard error

}  // namespace qusd::tol
