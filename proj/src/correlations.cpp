#include "qusd/correlations.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

namespace qusd {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Complex Givens rotation in the (i, j) plane.
ComplexMatrix givens_rotation(Eigen::Index m, Eigen::Index i, Eigen::Index j, double theta,
                              double phi) {
  ComplexMatrix g = ComplexMatrix::Identity(m, m);
  g(i, i) = std::cos(theta);
  g(j, j) = std::cos(theta);
  g(i, j) = -std::sin(theta) * Complex(std::cos(phi), std::sin(phi));
  g(j, i) = std::sin(theta) * Complex(std::cos(phi), -std::sin(phi));
  return g;
}

void fix_column_phases(ComplexMatrix& u) {
  for (Eigen::Index c = 0; c < u.cols(); ++c) {
    for (Eigen::Index r = 0; r < u.rows(); ++r) {
      const double mod = std::abs(u(r, c));
      if (mod > 1e-12) {
        u.col(c) *= std::conj(u(r, c)) / mod;
        break;
      }
    }
  }
}

// <v| rho |v> over the measured factor; the result lives on the other one.
ComplexMatrix collapse(const DensityMatrix& rho, Side side, const ComplexVector& v) {
  const Eigen::Index ds = rho.sys_dim(), da = rho.anc_dim();
  const ComplexMatrix& m = rho.mat();
  if (side == Side::right) {
    ComplexMatrix out(ds, ds);
    for (Eigen::Index r = 0; r < ds; ++r)
      for (Eigen::Index c = 0; c < ds; ++c) {
        Complex acc = 0.0;
        for (Eigen::Index a = 0; a < da; ++a)
          for (Eigen::Index b = 0; b < da; ++b)
            acc += std::conj(v[a]) * m(r * da + a, c * da + b) * v[b];
        out(r, c) = acc;
      }
    return out;
  }
  ComplexMatrix out(da, da);
  for (Eigen::Index a = 0; a < da; ++a)
    for (Eigen::Index b = 0; b < da; ++b) {
      Complex acc = 0.0;
      for (Eigen::Index r = 0; r < ds; ++r)
        for (Eigen::Index c = 0; c < ds; ++c)
          acc += std::conj(v[r]) * m(r * da + a, c * da + b) * v[c];
      out(a, b) = acc;
    }
  return out;
}

struct Candidate {
  double value;
  std::vector<double> angles;
};

// Deterministic ordering: by value, then lexicographically by angles.
bool better(const Candidate& a, const Candidate& b) {
  if (a.value != b.value) return a.value < b.value;
  return a.angles < b.angles;
}

}  // namespace

ComplexMatrix MeasurementBasis::vectors() const {
  ComplexMatrix u;
  if (dim == 2) {
    const double half = angles[0] / 2.0;
    const Complex phase(std::cos(angles[1]), std::sin(angles[1]));
    u.resize(2, 2);
    u(0, 0) = std::cos(half);
    u(1, 0) = phase * std::sin(half);
    u(0, 1) = std::sin(half);
    u(1, 1) = -phase * std::cos(half);
  } else {
    u = ComplexMatrix::Identity(dim, dim);
    std::size_t k = 0;
    for (Eigen::Index i = 0; i < dim; ++i)
      for (Eigen::Index j = i + 1; j < dim; ++j) {
        u = u * givens_rotation(dim, i, j, angles[k], angles[k + 1]);
        k += 2;
      }
  }
  fix_column_phases(u);
  return u;
}

MeasurementBasis qubit_basis(Side subsystem, double theta, double phi) {
  return MeasurementBasis{subsystem, 2, {theta, phi}};
}

MeasurementBasis givens_basis(Side subsystem, Eigen::Index dim, std::vector<double> angles) {
  if (dim < 3) throw UnsupportedDimensionError("givens_basis needs dimension >= 3");
  const std::size_t expected = static_cast<std::size_t>(dim * (dim - 1));
  if (angles.size() != expected)
    throw DimensionMismatchError("expected " + std::to_string(expected) + " angles, got " +
                                 std::to_string(angles.size()));
  return MeasurementBasis{subsystem, dim, std::move(angles)};
}

double conditional_entropy(const DensityMatrix& rho, const MeasurementBasis& basis) {
  const Eigen::Index measured = basis.subsystem == Side::left ? rho.sys_dim() : rho.anc_dim();
  if (basis.dim != measured)
    throw DimensionMismatchError("basis dimension " + std::to_string(basis.dim) +
                                 " does not match measured side dimension " +
                                 std::to_string(measured));
  const ComplexMatrix u = basis.vectors();
  double total = 0.0;
  for (Eigen::Index k = 0; k < u.cols(); ++k) {
    ComplexMatrix cond = collapse(rho, basis.subsystem, u.col(k));
    const double pk = cond.trace().real();
    if (pk <= tol::outcome_weight) continue;
    cond /= pk;
    total += pk * detail::entropy_bits_unchecked(cond);
  }
  return total;
}

DiscordReport discord(const DensityMatrix& rho, Side side, const DiscordConfig& config) {
  const Eigen::Index mdim = side == Side::left ? rho.sys_dim() : rho.anc_dim();
  if (mdim < 2 || mdim > 3)
    throw UnsupportedDimensionError("discord optimization supports measured dimension 2 or 3, got " +
                                    std::to_string(mdim) +
                                    " (zero_discord_certify works at any dimension)");

  const double mi = mutual_information(rho);
  const double s_other = von_neumann_entropy(
      partial_trace(rho, side == Side::left ? Subsystem::ancilla : Subsystem::system));

  long evals = 0;
  auto evaluate = [&](const std::vector<double>& angles) {
    ++evals;
    const MeasurementBasis basis = (mdim == 2)
                                       ? qubit_basis(side, angles[0], angles[1])
                                       : MeasurementBasis{side, mdim, angles};
    return conditional_entropy(rho, basis);
  };

  // Coarse grid, enumerated in lexicographic angle order so equal values
  // resolve to the smallest tuple.
  std::vector<Candidate> grid;
  double initial_step;
  if (mdim == 2) {
    const int nt = config.qubit_theta_points, np = config.qubit_phi_points;
    grid.reserve(static_cast<std::size_t>(nt) * np);
    for (int a = 0; a < nt; ++a) {
      const double theta = kPi * a / (nt - 1);
      for (int b = 0; b < np; ++b) {
        const double phi = 2.0 * kPi * b / np;
        std::vector<double> angles{theta, phi};
        grid.push_back({evaluate(angles), std::move(angles)});
      }
    }
    initial_step = 2.0 * kPi / np;
  } else {
    const int nt = config.qutrit_theta_points, np = config.qutrit_phi_points;
    std::vector<std::vector<double>> axes;
    for (int pair = 0; pair < 3; ++pair) {
      std::vector<double> thetas, phis;
      for (int a = 0; a < nt; ++a) thetas.push_back(0.5 * kPi * a / (nt - 1));
      for (int b = 0; b < np; ++b) phis.push_back(2.0 * kPi * b / np);
      axes.push_back(thetas);
      axes.push_back(phis);
    }
    std::vector<std::size_t> idx(axes.size(), 0);
    while (true) {
      std::vector<double> angles(axes.size());
      for (std::size_t k = 0; k < axes.size(); ++k) angles[k] = axes[k][idx[k]];
      grid.push_back({evaluate(angles), std::move(angles)});
      std::size_t k = axes.size();
      while (k > 0) {
        --k;
        if (++idx[k] < axes[k].size()) break;
        idx[k] = 0;
        if (k == 0) goto grid_done;
      }
    }
  grid_done:
    initial_step = 2.0 * kPi / np;
  }

  std::vector<Candidate> seeds = grid;
  std::sort(seeds.begin(), seeds.end(), better);
  const std::size_t n_seeds = std::min<std::size_t>(config.refine_seeds, seeds.size());

  Candidate best = seeds.front();
  for (std::size_t s = 0; s < n_seeds; ++s) {
    Candidate current = seeds[s];
    double h = initial_step;
    while (h > config.step_tolerance) {
      bool moved = false;
      for (std::size_t k = 0; k < current.angles.size(); ++k) {
        for (double sign : {1.0, -1.0}) {
          std::vector<double> trial = current.angles;
          trial[k] += sign * h;
          const double value = evaluate(trial);
          if (value < current.value - config.improvement_tolerance) {
            current = {value, std::move(trial)};
            moved = true;
          }
        }
      }
      if (!moved) h *= 0.5;
    }
    if (better(current, best)) best = current;
  }

  double value = mi - (s_other - best.value);
  if (value < 0.0 && value >= -tol::discord_clamp) value = 0.0;

  const CommutatorCertificate certificate = zero_discord_certify(rho, side);
  const MeasurementBasis argmin = (mdim == 2)
                                      ? qubit_basis(side, best.angles[0], best.angles[1])
                                      : MeasurementBasis{side, mdim, best.angles};
  return DiscordReport{side, value, mi, argmin, evals, certificate.zero_discord,
                       certificate.residual};
}

OperatorSchmidtDecomposition operator_schmidt(const DensityMatrix& rho) {
  const Eigen::Index da = rho.sys_dim(), db = rho.anc_dim();
  const ComplexMatrix& m = rho.mat();
  // Realign: rows indexed by the system double-index (i,j), columns by the
  // ancilla double-index (k,l).
  ComplexMatrix realigned(da * da, db * db);
  for (Eigen::Index i = 0; i < da; ++i)
    for (Eigen::Index j = 0; j < da; ++j)
      for (Eigen::Index k = 0; k < db; ++k)
        for (Eigen::Index l = 0; l < db; ++l)
          realigned(i * da + j, k * db + l) = m(i * db + k, j * db + l);

  Eigen::JacobiSVD<ComplexMatrix> svd(realigned, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::Index n = svd.singularValues().size();

  OperatorSchmidtDecomposition out;
  out.coefficients = svd.singularValues();
  out.system_ops.reserve(n);
  out.ancilla_ops.reserve(n);
  for (Eigen::Index t = 0; t < n; ++t) {
    ComplexMatrix s(da, da), f(db, db);
    for (Eigen::Index i = 0; i < da; ++i)
      for (Eigen::Index j = 0; j < da; ++j) s(i, j) = svd.matrixU()(i * da + j, t);
    for (Eigen::Index k = 0; k < db; ++k)
      for (Eigen::Index l = 0; l < db; ++l) f(k, l) = std::conj(svd.matrixV()(k * db + l, t));
    out.system_ops.push_back(std::move(s));
    out.ancilla_ops.push_back(std::move(f));
  }
  out.rank = 0;
  for (Eigen::Index t = 0; t < n; ++t)
    if (out.coefficients[t] > tol::schmidt_rank) ++out.rank;
  return out;
}

CommutatorCertificate zero_discord_certify(const DensityMatrix& rho, Side side) {
  const OperatorSchmidtDecomposition osd = operator_schmidt(rho);
  const auto& ops = side == Side::left ? osd.system_ops : osd.ancilla_ops;
  double residual = 0.0;
  for (Eigen::Index i = 0; i < osd.rank; ++i)
    for (Eigen::Index j = i + 1; j < osd.rank; ++j)
      residual = std::max(residual, max_abs(ops[i] * ops[j] - ops[j] * ops[i]));
  return CommutatorCertificate{residual <= tol::commutator_zero, residual};
}

LeftZeroReport left_zero_condition_closed_form(const Ensemble& ensemble, double tolerance) {
  double residual = 0.0;
  for (Eigen::Index i = 0; i < ensemble.size(); ++i)
    for (Eigen::Index j = i + 1; j < ensemble.size(); ++j) {
      const double vi = ensemble.priors[i] * (1.0 - std::norm(ensemble.alphas[i]));
      const double vj = ensemble.priors[j] * (1.0 - std::norm(ensemble.alphas[j]));
      residual = std::max(residual, std::abs(vi - vj));
    }
  const bool balanced = residual <= tolerance;
  const ConditionResult separable = d_state_condition(ensemble, tolerance);
  return LeftZeroReport{balanced, residual, separable.holds, separable.residual,
                        balanced && separable.holds};
}

}  // namespace qusd
