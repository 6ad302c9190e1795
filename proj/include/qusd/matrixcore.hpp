#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "qusd/errors.hpp"
#include "qusd/tolerances.hpp"

// Dense complex linear algebra primitives for small bipartite operators:
// tensor products, partial trace/transpose, Hermitian spectra, entropies.
//
// Index convention, fixed globally: a bipartite SYSTEM (x) ANCILLA vector
// component (m, a) lives at flat index m * d_anc + a. All partial operations
// below assume it.

namespace qusd {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

enum class Subsystem { system, ancilla };

// Builds a dim x dim matrix from row-major entries. The entry count must be
// exactly dim^2; nothing is ever reshaped silently.
ComplexMatrix matrix_from_entries(Eigen::Index dim, const std::vector<Complex>& row_major);

double max_abs(const ComplexMatrix& m);
bool is_hermitian(const ComplexMatrix& m, double tolerance = tol::hermitian_input);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexVector kron(const ComplexVector& a, const ComplexVector& b);

/// A bipartite density matrix with certified invariants: Hermitian within
/// tol::hermiticity, unit trace within tol::unit_trace, and min eigenvalue
/// >= -tol::psd. Construction throws if any check fails. Instances are
/// immutable and safe to share between threads.
class DensityMatrix {
 public:
  DensityMatrix(ComplexMatrix mat, Eigen::Index sys_dim, Eigen::Index anc_dim);

  const ComplexMatrix& mat() const noexcept { return mat_; }
  Eigen::Index dim() const noexcept { return mat_.rows(); }
  Eigen::Index sys_dim() const noexcept { return sys_dim_; }
  Eigen::Index anc_dim() const noexcept { return anc_dim_; }

 private:
  ComplexMatrix mat_;
  Eigen::Index sys_dim_;
  Eigen::Index anc_dim_;
};

/// Eigendecomposition of a Hermitian matrix, eigenvalues sorted descending
/// with matching eigenvector columns.
struct Spectrum {
  RealVector eigenvalues;
  ComplexMatrix eigenvectors;
};

// Traces out the complement of `keep`. The result is a valid (monopartite)
// density matrix reported with dims (d_kept, 1).
DensityMatrix partial_trace(const DensityMatrix& rho, Subsystem keep);

// Transposes the `side` factor only. Involutive, trace- and
// Hermiticity-preserving; the spectrum may be negative (that is the point).
ComplexMatrix partial_transpose(const DensityMatrix& rho, Subsystem side);

// Throws NotHermitianError unless max |h - h^dag| <= tol::hermitian_input.
// Deterministic for identical input bits.
Spectrum hermitian_spectrum(const ComplexMatrix& h);

// Von Neumann entropy in bits (base-2 logs throughout). Eigenvalues below
// tol::entropy_clip are treated as exact zeros; an eigenvalue below -tol::psd
// raises NotPsdError.
double von_neumann_entropy(const ComplexMatrix& rho);
double von_neumann_entropy(const DensityMatrix& rho);

// I(rho) = S(rho_sys) + S(rho_anc) - S(rho), in bits.
double mutual_information(const DensityMatrix& rho);

namespace detail {
// Entropy of a small Hermitian PSD matrix without precondition checks;
// closed-form eigenvalues for dim <= 2. Hot path for the discord optimizer.
double entropy_bits_unchecked(const ComplexMatrix& m);
}  // namespace detail

}  // namespace qusd
