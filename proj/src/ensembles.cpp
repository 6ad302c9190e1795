#include "qusd/ensembles.hpp"

#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace qusd {

namespace {

bool boundary(double mod) {
  return mod <= tol::boundary_amplitude || mod >= 1.0 - tol::boundary_amplitude;
}

void check_priors(const RealVector& priors) {
  for (Eigen::Index i = 0; i < priors.size(); ++i)
    if (priors[i] <= 0.0)
      throw BadPriorsError("prior " + std::to_string(i) + " is not positive");
  const double sum_err = std::abs(priors.sum() - 1.0);
  if (sum_err > tol::prior_sum)
    throw BadPriorsError("priors sum differs from 1 by " + std::to_string(sum_err));
}

ComplexVector ancilla_ket(int a) {
  ComplexVector v = ComplexVector::Zero(2);
  v[a] = 1.0;
  return v;
}

ProtocolState assemble(Ensemble ensemble, std::vector<ComplexVector> branches,
                       Construction construction) {
  const Eigen::Index d = ensemble.size();
  ComplexMatrix rho = ComplexMatrix::Zero(2 * d, 2 * d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const double norm_err = std::abs(branches[i].norm() - 1.0);
    if (norm_err > tol::unit_trace)
      throw InvalidArgumentError("branch vector " + std::to_string(i) + " norm error " +
                                 std::to_string(norm_err));
    rho.noalias() += ensemble.priors[i] * (branches[i] * branches[i].adjoint());
  }
  return ProtocolState{DensityMatrix(std::move(rho), d, 2), std::move(ensemble),
                       std::move(branches), construction};
}

}  // namespace

Ensemble make_ensemble(RealVector priors, ComplexVector alphas) {
  if (priors.size() != alphas.size())
    throw DimensionMismatchError("priors and amplitudes differ in length");
  if (priors.size() < 2) throw DimensionMismatchError("an ensemble needs at least two states");
  check_priors(priors);
  for (Eigen::Index i = 0; i < alphas.size(); ++i)
    if (boundary(std::abs(alphas[i])))
      throw DegenerateEnsembleError("amplitude " + std::to_string(i) +
                                    " lies on the {0,1} boundary; the input states would be "
                                    "identical or orthogonal");
  return Ensemble{std::move(priors), std::move(alphas)};
}

ProtocolState build_two_state(double p_plus, double p_minus, Complex alpha, Complex alpha_plus) {
  RealVector priors(2);
  priors << p_plus, p_minus;
  check_priors(priors);
  if (boundary(std::abs(alpha_plus)))
    throw DegenerateEnsembleError("|alpha_plus| on the {0,1} boundary");
  const Complex alpha_minus = alpha / std::conj(alpha_plus);
  if (boundary(std::abs(alpha_minus)))
    throw DegenerateEnsembleError("derived |alpha_minus| = " +
                                  std::to_string(std::abs(alpha_minus)) +
                                  " lies on the {0,1} boundary");
  ComplexVector alphas(2);
  alphas << alpha_plus, alpha_minus;
  Ensemble ensemble = make_ensemble(std::move(priors), std::move(alphas));

  ComplexVector plus(2), minus(2), zero(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  minus << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);
  zero << 1.0, 0.0;
  const double c_plus = std::sqrt(1.0 - std::norm(alpha_plus));
  const double c_minus = std::sqrt(1.0 - std::norm(alpha_minus));
  std::vector<ComplexVector> branches{
      kron(ComplexVector(c_plus * plus), ancilla_ket(0)) +
          kron(ComplexVector(alpha_plus * zero), ancilla_ket(1)),
      kron(ComplexVector(c_minus * minus), ancilla_ket(0)) +
          kron(ComplexVector(alpha_minus * zero), ancilla_ket(1))};
  return assemble(std::move(ensemble), std::move(branches), Construction::two_state);
}

ProtocolState build_d_state(const RealVector& priors, const ComplexVector& alphas) {
  Ensemble ensemble = make_ensemble(priors, alphas);
  const Eigen::Index d = ensemble.size();
  ComplexVector u = ComplexVector::Constant(d, 1.0 / std::sqrt(static_cast<double>(d)));
  std::vector<ComplexVector> branches;
  branches.reserve(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    ComplexVector basis = ComplexVector::Zero(d);
    basis[i] = std::sqrt(1.0 - std::norm(ensemble.alphas[i]));
    branches.push_back(kron(basis, ancilla_ket(0)) +
                       kron(ComplexVector(ensemble.alphas[i] * u), ancilla_ket(1)));
  }
  return assemble(std::move(ensemble), std::move(branches), Construction::d_state);
}

GramMatrix make_gram(ComplexMatrix entries) {
  if (entries.rows() != entries.cols())
    throw DimensionMismatchError("Gram matrix must be square");
  if (!is_hermitian(entries, tol::hermiticity))
    throw NotHermitianError("Gram matrix is not Hermitian");
  for (Eigen::Index i = 0; i < entries.rows(); ++i)
    if (std::abs(entries(i, i) - Complex(1.0, 0.0)) > tol::hermiticity)
      throw InvalidArgumentError("Gram diagonal entry " + std::to_string(i) + " is not 1");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(entries, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -tol::psd)
    throw NotPsdError("Gram matrix has eigenvalue " +
                      std::to_string(solver.eigenvalues().minCoeff()));
  return GramMatrix{std::move(entries)};
}

GramMatrix ensemble_gram(const Ensemble& ensemble) {
  const Eigen::Index d = ensemble.size();
  ComplexMatrix g(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      g(i, j) = (i == j) ? Complex(1.0, 0.0) : ensemble.overlap(i, j);
  return make_gram(std::move(g));
}

EmbeddingCheck validate_embedding(const Ensemble& ensemble, const GramMatrix& target,
                                  double tolerance) {
  if (target.size() != ensemble.size())
    throw DimensionMismatchError("Gram size does not match ensemble size");
  double residual = 0.0;
  for (Eigen::Index i = 0; i < ensemble.size(); ++i)
    for (Eigen::Index j = 0; j < ensemble.size(); ++j) {
      if (i == j) continue;
      residual = std::max(residual, std::abs(target.entries(i, j) - ensemble.overlap(i, j)));
    }
  return EmbeddingCheck{residual <= tolerance, residual};
}

std::vector<ComplexVector> states_from_gram(const GramMatrix& gram) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(gram.entries, Eigen::EigenvaluesOnly);
  const double min_eig = solver.eigenvalues().minCoeff();
  if (min_eig <= tol::gram_rank)
    throw SingularGramError("Gram min eigenvalue " + std::to_string(min_eig) +
                            "; the states are linearly dependent");
  Eigen::LLT<ComplexMatrix> llt(gram.entries);
  if (llt.info() != Eigen::Success)
    throw SingularGramError("Cholesky factorization of the Gram matrix failed");
  const ComplexMatrix l = llt.matrixL();
  // With G = L L^dag, column i of L^dag satisfies <v_i|v_j> = G_ij.
  std::vector<ComplexVector> states;
  states.reserve(gram.size());
  for (Eigen::Index i = 0; i < gram.size(); ++i) states.push_back(l.row(i).adjoint());
  return states;
}

}  // namespace qusd
