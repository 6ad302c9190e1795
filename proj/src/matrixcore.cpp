#include "qusd/matrixcore.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace qusd {

ComplexMatrix matrix_from_entries(Eigen::Index dim, const std::vector<Complex>& row_major) {
  if (dim <= 0) throw DimensionMismatchError("matrix dimension must be positive");
  if (static_cast<Eigen::Index>(row_major.size()) != dim * dim) {
    throw DimensionMismatchError("expected " + std::to_string(dim * dim) + " entries, got " +
                                 std::to_string(row_major.size()));
  }
  ComplexMatrix m(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r)
    for (Eigen::Index c = 0; c < dim; ++c) m(r, c) = row_major[r * dim + c];
  return m;
}

double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

bool is_hermitian(const ComplexMatrix& m, double tolerance) {
  if (m.rows() != m.cols()) return false;
  return max_abs(m - m.adjoint()) <= tolerance;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

ComplexVector kron(const ComplexVector& a, const ComplexVector& b) {
  ComplexVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a[i] * b;
  return out;
}

DensityMatrix::DensityMatrix(ComplexMatrix mat, Eigen::Index sys_dim, Eigen::Index anc_dim)
    : mat_(std::move(mat)), sys_dim_(sys_dim), anc_dim_(anc_dim) {
  if (sys_dim_ <= 0 || anc_dim_ <= 0 || mat_.rows() != mat_.cols() ||
      mat_.rows() != sys_dim_ * anc_dim_) {
    throw DimensionMismatchError("density matrix dims (" + std::to_string(sys_dim_) + ", " +
                                 std::to_string(anc_dim_) + ") do not match a " +
                                 std::to_string(mat_.rows()) + "x" + std::to_string(mat_.cols()) +
                                 " matrix");
  }
  const double herm = max_abs(mat_ - mat_.adjoint());
  if (herm > tol::hermiticity)
    throw NotHermitianError("density matrix Hermiticity residual " + std::to_string(herm));
  const double trace_err = std::abs(mat_.trace() - Complex(1.0, 0.0));
  if (trace_err > tol::unit_trace)
    throw NotPsdError("density matrix trace differs from 1 by " + std::to_string(trace_err));
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(mat_, Eigen::EigenvaluesOnly);
  const double min_eig = solver.eigenvalues().minCoeff();
  if (min_eig < -tol::psd)
    throw NotPsdError("density matrix min eigenvalue " + std::to_string(min_eig));
}

DensityMatrix partial_trace(const DensityMatrix& rho, Subsystem keep) {
  const Eigen::Index ds = rho.sys_dim(), da = rho.anc_dim();
  const ComplexMatrix& m = rho.mat();
  if (keep == Subsystem::system) {
    ComplexMatrix out = ComplexMatrix::Zero(ds, ds);
    for (Eigen::Index i = 0; i < ds; ++i)
      for (Eigen::Index j = 0; j < ds; ++j)
        for (Eigen::Index a = 0; a < da; ++a) out(i, j) += m(i * da + a, j * da + a);
    return DensityMatrix(std::move(out), ds, 1);
  }
  ComplexMatrix out = ComplexMatrix::Zero(da, da);
  for (Eigen::Index a = 0; a < da; ++a)
    for (Eigen::Index b = 0; b < da; ++b)
      for (Eigen::Index i = 0; i < ds; ++i) out(a, b) += m(i * da + a, i * da + b);
  return DensityMatrix(std::move(out), da, 1);
}

ComplexMatrix partial_transpose(const DensityMatrix& rho, Subsystem side) {
  const Eigen::Index ds = rho.sys_dim(), da = rho.anc_dim();
  const ComplexMatrix& m = rho.mat();
  ComplexMatrix out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < ds; ++i)
    for (Eigen::Index a = 0; a < da; ++a)
      for (Eigen::Index j = 0; j < ds; ++j)
        for (Eigen::Index b = 0; b < da; ++b) {
          if (side == Subsystem::system)
            out(i * da + a, j * da + b) = m(j * da + a, i * da + b);
          else
            out(i * da + a, j * da + b) = m(i * da + b, j * da + a);
        }
  return out;
}

Spectrum hermitian_spectrum(const ComplexMatrix& h) {
  if (h.rows() != h.cols()) throw DimensionMismatchError("spectrum of a non-square matrix");
  const double herm = max_abs(h - h.adjoint());
  if (herm > tol::hermitian_input)
    throw NotHermitianError("Hermiticity residual " + std::to_string(herm));
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
  // Eigen sorts ascending; flip to descending with matching columns.
  const Eigen::Index n = h.rows();
  Spectrum s;
  s.eigenvalues = solver.eigenvalues().reverse();
  s.eigenvectors = ComplexMatrix(n, n);
  for (Eigen::Index k = 0; k < n; ++k) s.eigenvectors.col(k) = solver.eigenvectors().col(n - 1 - k);
  return s;
}

namespace detail {

double entropy_bits_unchecked(const ComplexMatrix& m) {
  const Eigen::Index n = m.rows();
  double out = 0.0;
  auto add = [&out](double lambda) {
    if (lambda > tol::entropy_clip) out -= lambda * std::log2(lambda);
  };
  if (n == 1) {
    add(m(0, 0).real());
  } else if (n == 2) {
    const double a = m(0, 0).real(), d = m(1, 1).real();
    const double h = std::hypot(0.5 * (a - d), std::abs(m(0, 1)));
    add(0.5 * (a + d) + h);
    add(0.5 * (a + d) - h);
  } else {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m, Eigen::EigenvaluesOnly);
    for (Eigen::Index k = 0; k < n; ++k) add(solver.eigenvalues()[k]);
  }
  return out;
}

}  // namespace detail

double von_neumann_entropy(const ComplexMatrix& rho) {
  if (rho.rows() != rho.cols()) throw DimensionMismatchError("entropy of a non-square matrix");
  const double herm = max_abs(rho - rho.adjoint());
  if (herm > tol::hermitian_input)
    throw NotHermitianError("Hermiticity residual " + std::to_string(herm));
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(rho, Eigen::EigenvaluesOnly);
  double out = 0.0;
  for (Eigen::Index k = 0; k < rho.rows(); ++k) {
    const double lambda = solver.eigenvalues()[k];
    if (lambda < -tol::psd)
      throw NotPsdError("entropy of a matrix with eigenvalue " + std::to_string(lambda));
    if (lambda > tol::entropy_clip) out -= lambda * std::log2(lambda);
  }
  return out;
}

double von_neumann_entropy(const DensityMatrix& rho) { return von_neumann_entropy(rho.mat()); }

double mutual_information(const DensityMatrix& rho) {
  const double s_sys = von_neumann_entropy(partial_trace(rho, Subsystem::system));
  const double s_anc = von_neumann_entropy(partial_trace(rho, Subsystem::ancilla));
  return s_sys + s_anc - von_neumann_entropy(rho);
}

}  // namespace qusd
