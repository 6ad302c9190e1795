#pragma once

#include <cstdint>
#include <string>

#include "qusd/ensembles.hpp"

// Success probabilities, the one-variable optimization over the first
// failure amplitude, the piecewise closed-form optimum for the symmetric
// family, and a seeded Monte Carlo run of the full protocol.

namespace qusd {

// P = 1 - sum_i p_i |alpha_i|^2.
double success_probability(const Ensemble& ensemble);

// Two-state form, moduli only: P = 1 - p- |a|^2/|a+|^2 - p+ |a+|^2.
// Requires 0 <= alpha_mod < alpha_plus_mod <= 1.
double success_probability_two(double p_plus, double p_minus, double alpha_mod,
                               double alpha_plus_mod);

// Validating wrapper over success_probability.
double success_probability_d(const RealVector& priors, const ComplexVector& alphas);

/// One-variable optimization data: priors p_1..p_d and the fixed overlaps
/// alpha_1j = <psi_1|psi_j> for j = 2..d. The free amplitude |alpha_1| must
/// stay strictly above max_j |alpha_1j| (else some derived |alpha_j| >= 1)
/// and at most 1.
struct OptimizationInput {
  RealVector priors;       // size d
  ComplexVector overlaps;  // size d-1; only moduli enter the probabilities
};

OptimizationInput make_optimization_input(RealVector priors, ComplexVector overlaps);

double max_overlap(const OptimizationInput& input);

// P(t) = 1 - p_1 t^2 - (sum_j p_j |alpha_1j|^2) / t^2 at t = alpha1_mod.
// Throws InfeasibleError outside (max_overlap, 1].
double success_probability_parameterized(double alpha1_mod, const OptimizationInput& input);

// The stationary point ((sum_j p_j |alpha_1j|^2) / p_1)^(1/4).
double alpha_bar(const OptimizationInput& input);

enum class OptimalRegion { interior, clamped_low, clamped_high };
const char* to_string(OptimalRegion region);

struct OptimumReport {
  OptimalRegion region;
  double alpha1_opt;
  double p_opt;
  double alpha_bar;
};

// Closed-form optimum over the feasible amplitude. The stationary point is
// taken when it lies in [max_overlap, 1] (boundary ties resolve to
// interior); otherwise the optimum clamps to the nearer end, evaluated on
// the closed interval.
OptimumReport optimal_probability(const OptimizationInput& input);

// Piecewise optimum for equal priors 1/d and equal real amplitude gamma
// (pairwise overlaps gamma^2):
//   1 - 2 sqrt(d-1)/d gamma^2          for gamma <= (d-1)^(-1/4)
//   (d-1)/d (1 - gamma^4)              otherwise.
// Continuous at the break and nonincreasing in gamma.
double equal_overlap_optimal(Eigen::Index d, double gamma_mod);

/// Outcome counts of a seeded protocol simulation. Unambiguity means a
/// conclusive (success) outcome never misidentifies the prepared state.
struct TrialStats {
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  std::uint64_t misidentifications_given_success = 0;
  double frequency = 0.0;
  double std_error = 0.0;  // binomial sqrt(f(1-f)/n)
  std::uint64_t seed = 0;
  std::string rng;  // generator identifier, for bit-reproducibility
};

// Samples the prepared index by priors, the ancilla outcome from the Born
// rule on the branch vector, and on success the discrimination-basis
// outcome ({|+>,|->} for the two-state construction, computational basis
// for the d-state one). Deterministic given (state, trials, seed).
TrialStats run_monte_carlo(const ProtocolState& state, std::uint64_t trials, std::uint64_t seed);

}  // namespace qusd
