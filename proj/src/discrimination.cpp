#include "qusd/discrimination.hpp"

#include <cmath>
#include <random>

namespace qusd {

double success_probability(const Ensemble& ensemble) {
  double failure = 0.0;
  for (Eigen::Index i = 0; i < ensemble.size(); ++i)
    failure += ensemble.priors[i] * std::norm(ensemble.alphas[i]);
  return 1.0 - failure;
}

double success_probability_two(double p_plus, double p_minus, double alpha_mod,
                               double alpha_plus_mod) {
  if (p_plus <= 0.0 || p_minus <= 0.0 || std::abs(p_plus + p_minus - 1.0) > tol::prior_sum)
    throw BadPriorsError("two-state priors must be positive and sum to 1");
  if (!(alpha_mod >= 0.0 && alpha_mod < alpha_plus_mod && alpha_plus_mod <= 1.0))
    throw InfeasibleError("need 0 <= |alpha| < |alpha_plus| <= 1");
  const double alpha_minus_mod = alpha_mod / alpha_plus_mod;
  return 1.0 - (p_plus * alpha_plus_mod * alpha_plus_mod +
                p_minus * alpha_minus_mod * alpha_minus_mod);
}

double success_probability_d(const RealVector& priors, const ComplexVector& alphas) {
  return success_probability(make_ensemble(priors, alphas));
}

OptimizationInput make_optimization_input(RealVector priors, ComplexVector overlaps) {
  if (priors.size() < 2) throw DimensionMismatchError("need at least two states");
  if (overlaps.size() != priors.size() - 1)
    throw DimensionMismatchError("expected d-1 overlaps for d priors");
  for (Eigen::Index i = 0; i < priors.size(); ++i)
    if (priors[i] <= 0.0) throw BadPriorsError("prior " + std::to_string(i) + " is not positive");
  if (std::abs(priors.sum() - 1.0) > tol::prior_sum)
    throw BadPriorsError("priors do not sum to 1");
  for (Eigen::Index j = 0; j < overlaps.size(); ++j)
    if (std::abs(overlaps[j]) > 1.0)
      throw InfeasibleError("overlap modulus above 1 leaves no feasible amplitude");
  return OptimizationInput{std::move(priors), std::move(overlaps)};
}

double max_overlap(const OptimizationInput& input) {
  double mx = 0.0;
  for (Eigen::Index j = 0; j < input.overlaps.size(); ++j)
    mx = std::max(mx, std::abs(input.overlaps[j]));
  return mx;
}

namespace {

// sum_{j>=2} p_j |alpha_1j|^2
double weighted_overlap_sq(const OptimizationInput& input) {
  double c = 0.0;
  for (Eigen::Index j = 0; j < input.overlaps.size(); ++j)
    c += input.priors[j + 1] * std::norm(input.overlaps[j]);
  return c;
}

double probability_at(double t, double p1, double c) { return 1.0 - p1 * t * t - c / (t * t); }

}  // namespace

double success_probability_parameterized(double alpha1_mod, const OptimizationInput& input) {
  if (!(alpha1_mod > max_overlap(input) && alpha1_mod <= 1.0))
    throw InfeasibleError("|alpha_1| must lie in (max_j |alpha_1j|, 1]");
  return probability_at(alpha1_mod, input.priors[0], weighted_overlap_sq(input));
}

double alpha_bar(const OptimizationInput& input) {
  return std::pow(weighted_overlap_sq(input) / input.priors[0], 0.25);
}

const char* to_string(OptimalRegion region) {
  switch (region) {
    case OptimalRegion::interior: return "interior";
    case OptimalRegion::clamped_low: return "clamped_low";
    default: return "clamped_high";
  }
}

OptimumReport optimal_probability(const OptimizationInput& input) {
  const double mx = max_overlap(input);
  const double bar = alpha_bar(input);
  const double p1 = input.priors[0];
  const double c = weighted_overlap_sq(input);
  OptimumReport report{};
  report.alpha_bar = bar;
  if (mx <= bar && bar <= 1.0) {
    report.region = OptimalRegion::interior;
    report.alpha1_opt = bar;
    report.p_opt = 1.0 - 2.0 * std::sqrt(p1 * c);
  } else if (bar < mx) {
    report.region = OptimalRegion::clamped_low;
    report.alpha1_opt = mx;
    report.p_opt = probability_at(mx, p1, c);
  } else {
    report.region = OptimalRegion::clamped_high;
    report.alpha1_opt = 1.0;
    report.p_opt = 1.0 - p1 - c;
  }
  return report;
}

double equal_overlap_optimal(Eigen::Index d, double gamma_mod) {
  if (d < 2) throw InvalidArgumentError("need d >= 2");
  if (!(gamma_mod >= 0.0 && gamma_mod <= 1.0))
    throw InvalidArgumentError("gamma modulus must lie in [0, 1]");
  const double dm1 = static_cast<double>(d - 1);
  const double dd = static_cast<double>(d);
  if (gamma_mod <= std::pow(dm1, -0.25))
    return 1.0 - 2.0 * std::sqrt(dm1) / dd * gamma_mod * gamma_mod;
  const double g2 = gamma_mod * gamma_mod;
  return dm1 / dd * (1.0 - g2 * g2);
}

namespace {

// SplitMix64, the standard seeding scramble; fully specified, so runs are
// bit-reproducible across platforms.
std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double uniform53(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

constexpr int kChunks = 16;
constexpr const char* kRngId = "mt19937_64/u53/splitmix64x16";

}  // namespace

TrialStats run_monte_carlo(const ProtocolState& state, std::uint64_t trials, std::uint64_t seed) {
  if (trials < 1) throw InvalidArgumentError("need at least one trial");
  const Ensemble& ensemble = state.ensemble;
  const Eigen::Index d = ensemble.size();

  // Per-input-state tables: cumulative priors, ancilla-0 (success) Born
  // weight, and the conditional distribution over discrimination outcomes.
  std::vector<double> prior_cdf(d);
  std::vector<double> p_success(d);
  std::vector<std::vector<double>> outcome_cdf(d);
  ComplexMatrix basis = ComplexMatrix::Identity(d, d);
  if (state.construction == Construction::two_state) {
    basis << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0),
             1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);
  }
  double acc = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    acc += ensemble.priors[i];
    prior_cdf[i] = acc;
    ComplexVector success_branch(d);
    for (Eigen::Index m = 0; m < d; ++m) success_branch[m] = state.branch_vectors[i][m * 2 + 0];
    p_success[i] = success_branch.squaredNorm();
    ComplexVector amplitudes = basis.adjoint() * success_branch;
    std::vector<double> cdf(d);
    double total = 0.0;
    for (Eigen::Index k = 0; k < d; ++k) {
      total += std::norm(amplitudes[k]);
      cdf[k] = total;
    }
    outcome_cdf[i] = std::move(cdf);
  }
  prior_cdf[d - 1] = 1.0;

  TrialStats stats;
  stats.trials = trials;
  stats.seed = seed;
  stats.rng = kRngId;

  std::uint64_t sm_state = seed;
  for (int chunk = 0; chunk < kChunks; ++chunk) {
    std::mt19937_64 gen(splitmix64(sm_state));
    const std::uint64_t n = trials / kChunks + (static_cast<std::uint64_t>(chunk) < trials % kChunks ? 1 : 0);
    for (std::uint64_t t = 0; t < n; ++t) {
      const double u_state = uniform53(gen);
      Eigen::Index prepared = 0;
      while (prepared < d - 1 && u_state >= prior_cdf[prepared]) ++prepared;

      if (uniform53(gen) >= p_success[prepared]) continue;  // inconclusive
      ++stats.successes;

      const double u_outcome = uniform53(gen) * p_success[prepared];
      Eigen::Index outcome = 0;
      const std::vector<double>& cdf = outcome_cdf[prepared];
      while (outcome < d - 1 && u_outcome >= cdf[outcome]) ++outcome;
      if (outcome != prepared) ++stats.misidentifications_given_success;
    }
  }

  stats.frequency = static_cast<double>(stats.successes) / static_cast<double>(trials);
  stats.std_error = std::sqrt(stats.frequency * (1.0 - stats.frequency) /
                              static_cast<double>(trials));
  return stats;
}

}  // namespace qusd
