// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstdint>

#include <Eigen/Dense>

namespace kianc {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

namespace math {

/// Bessel function of the first kind, order 0. Power series for x <= 12,
/// Hankel asymptotic expansion above; absolute error below 1e-10 on [0, 1000].
double bessel_j0(double x);

/// Bessel function of the second kind, order 0. Requires x > 0.
double bessel_y0(double x);

/// Spherical Bessel j0(x) = sin(x)/x with j0(0) = 1.
double sinc_j0(double x);

/// Square complex matrix that is Hermitian by construction. The constructor
/// replaces its input with (A + A^H)/2, which forces an exactly real diagonal
/// and exact conjugate symmetry.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(const ComplexMatrix& a);

  static HermitianMatrix identity(Eigen::Index dim);

  Eigen::Index dim() const { return m_.rows(); }
  const ComplexMatrix& matrix() const { return m_; }
  Complex operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

  HermitianMatrix shifted(double eta) const;
  HermitianMatrix scaled(double factor) const;

  /// y^H A y; imaginary part is round-off and is discarded.
  double quadratic_form(const ComplexVector& y) const;

 private:
  ComplexMatrix m_;
};

/// Solves A X = B for Hermitian positive-definite A. Throws
/// Error(NotPositiveDefinite) when the factorization hits a non-positive pivot.
ComplexMatrix hermitian_solve(const HermitianMatrix& a, const ComplexMatrix& b);

struct PowerIterationOptions {
  double tol = 1e-9;
  int max_iterations = 10000;
  std::uint64_t seed = 0x5eedULL;
};

/// Largest singular value by power iteration on A^H A, started from a seeded
/// random complex vector. Stops when the eigen-residual of A^H A falls below
/// tol relative to its Rayleigh quotient. Returns 0 for an all-zero matrix.
double spectral_norm(const ComplexMatrix& a, const PowerIterationOptions& opts = {});

/// Eigenvalues in ascending order, by cyclic Jacobi rotations.
RealVector hermitian_eigenvalues(const HermitianMatrix& a);

/// max|eig| / min|eig|; +infinity when min|eig| is below the machine floor
/// relative to max|eig| (or the matrix is zero).
double condition_number_l2(const HermitianMatrix& a);

}  // namespace math
}  // namespace kianc
