// SPDX-License-Identifier: Apache-2.0

#include "kianc/math.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "kianc/error.hpp"

namespace kianc::math {

namespace {

constexpr double kSeriesLimit = 12.0;
constexpr double kEulerGamma = 0.57721566490153286061;

// Sum of the ascending series for J0 and for the harmonic-number part of Y0.
struct SeriesParts {
  double j0;
  double y0_tail;  // sum_{k>=1} (-1)^{k+1} H_k (x^2/4)^k / (k!)^2
};

SeriesParts small_argument_series(double x) {
  const double q = 0.25 * x * x;
  double term = 1.0;
  double j0 = 1.0;
  double tail = 0.0;
  double harmonic = 0.0;
  for (int k = 1; k < 80; ++k) {
    term *= -q / (static_cast<double>(k) * k);
    harmonic += 1.0 / k;
    j0 += term;
    tail -= harmonic * term;
    if (std::abs(term) * harmonic < 1e-18 && k > q) break;
  }
  return {j0, tail};
}

// Hankel expansion P(x), Q(x) for order 0, truncated at the smallest term.
void hankel_pq(double x, double& p, double& q) {
  p = 1.0;
  q = 0.0;
  double u = 1.0;
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    u *= -(odd * odd) / (8.0 * k * x);
    if (std::abs(u) >= prev) break;
    prev = std::abs(u);
    // P = sum (-1)^m u_{2m}, Q = sum (-1)^m u_{2m+1}; u_k carries its own sign.
    const double sign = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
    if (k % 2 == 0) {
      p += sign * u;
    } else {
      q += sign * u;
    }
    if (std::abs(u) < 1e-17) break;
  }
}

}  // namespace

double bessel_j0(double x) {
  x = std::abs(x);
  if (x <= kSeriesLimit) return small_argument_series(x).j0;
  double p, q;
  hankel_pq(x, p, q);
  const double c = std::cos(x), s = std::sin(x);
  const double cos_chi = (c + s) * std::numbers::sqrt2 * 0.5;
  const double sin_chi = (s - c) * std::numbers::sqrt2 * 0.5;
  return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * cos_chi - q * sin_chi);
}

double bessel_y0(double x) {
  if (!(x > 0.0)) {
    std::ostringstream msg;
    msg << "bessel_y0: argument must be positive, got " << x;
    throw Error(ErrorCode::Domain, msg.str());
  }
  if (x <= kSeriesLimit) {
    const auto parts = small_argument_series(x);
    return (2.0 / std::numbers::pi) *
           ((std::log(0.5 * x) + kEulerGamma) * parts.j0 + parts.y0_tail);
  }
  double p, q;
  hankel_pq(x, p, q);
  const double c = std::cos(x), s = std::sin(x);
  const double cos_chi = (c + s) * std::numbers::sqrt2 * 0.5;
  const double sin_chi = (s - c) * std::numbers::sqrt2 * 0.5;
  return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * sin_chi + q * cos_chi);
}

double sinc_j0(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

// ---------------------------------------------------------------------------

HermitianMatrix::HermitianMatrix(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) {
    throw Error(ErrorCode::InvalidArgument, "HermitianMatrix: input is not square");
  }
  m_ = 0.5 * (a + a.adjoint());
  for (Eigen::Index i = 0; i < m_.rows(); ++i) m_(i, i) = Complex(m_(i, i).real(), 0.0);
  // (A + A^H)/2 is symmetric up to the rounding of each pairwise sum; copy the
  // upper triangle so conj-symmetry is exact.
  for (Eigen::Index j = 0; j < m_.cols(); ++j)
    for (Eigen::Index i = j + 1; i < m_.rows(); ++i) m_(i, j) = std::conj(m_(j, i));
}

HermitianMatrix HermitianMatrix::identity(Eigen::Index dim) {
  return HermitianMatrix(ComplexMatrix::Identity(dim, dim));
}

HermitianMatrix HermitianMatrix::shifted(double eta) const {
  HermitianMatrix out = *this;
  for (Eigen::Index i = 0; i < out.m_.rows(); ++i) out.m_(i, i) += eta;
  return out;
}

HermitianMatrix HermitianMatrix::scaled(double factor) const {
  HermitianMatrix out = *this;
  out.m_ *= factor;
  return out;
}

double HermitianMatrix::quadratic_form(const ComplexVector& y) const {
  if (y.size() != m_.rows()) {
    throw Error(ErrorCode::InvalidArgument, "quadratic_form: dimension mismatch");
  }
  return y.dot(m_ * y).real();
}

ComplexMatrix hermitian_solve(const HermitianMatrix& a, const ComplexMatrix& b) {
  if (a.dim() != b.rows()) {
    throw Error(ErrorCode::InvalidArgument, "hermitian_solve: dimension mismatch");
  }
  Eigen::LLT<ComplexMatrix> llt(a.matrix());
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::NotPositiveDefinite,
                "hermitian_solve: matrix is not positive definite (Cholesky pivot failure)");
  }
  ComplexMatrix x = llt.solve(b);
  if (!x.allFinite()) {
    throw Error(ErrorCode::NotPositiveDefinite, "hermitian_solve: non-finite solution");
  }
  return x;
}

double spectral_norm(const ComplexMatrix& a, const PowerIterationOptions& opts) {
  if (a.size() == 0 || a.cwiseAbs().maxCoeff() == 0.0) return 0.0;

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal;
  ComplexVector v(a.cols());
  for (auto& z : v) z = Complex(normal(rng), normal(rng));
  v.normalize();

  double rayleigh = 0.0;
  for (int it = 0; it < opts.max_iterations; ++it) {
    ComplexVector w = a.adjoint() * (a * v);
    rayleigh = v.dot(w).real();
    const double residual = (w - rayleigh * v).norm();
    const double wn = w.norm();
    if (wn == 0.0) return 0.0;
    if (residual <= opts.tol * rayleigh) break;
    v = w / wn;
  }
  return std::sqrt(std::max(rayleigh, 0.0));
}

RealVector hermitian_eigenvalues(const HermitianMatrix& h) {
  ComplexMatrix a = h.matrix();
  const Eigen::Index n = a.rows();
  const double scale = a.norm();
  if (n == 0) return RealVector();
  if (scale == 0.0) return RealVector::Zero(n);
  const double eps = std::numeric_limits<double>::epsilon();

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += std::norm(a(p, q));
    if (std::sqrt(off) <= eps * scale) break;

    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double g = std::abs(a(p, q));
        if (g <= eps * eps * scale) continue;
        const Complex phase = a(p, q) / g;
        const double app = a(p, p).real(), aqq = a(q, q).real();
        const double tau = (aqq - app) / (2.0 * g);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const Complex cp = std::conj(phase);

        // A <- A J with J = [[c, s], [-s conj(phase), c conj(phase)]] on (p, q).
        for (Eigen::Index k = 0; k < n; ++k) {
          const Complex akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * cp * akq;
          a(k, q) = s * akp + c * cp * akq;
        }
        // A <- J^H A.
        for (Eigen::Index k = 0; k < n; ++k) {
          const Complex apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * phase * aqk;
          a(q, k) = s * apk + c * phase * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
      }
    }
  }

  RealVector eig(n);
  for (Eigen::Index i = 0; i < n; ++i) eig(i) = a(i, i).real();
  std::sort(eig.begin(), eig.end());
  return eig;
}

double condition_number_l2(const HermitianMatrix& a) {
  const RealVector eig = hermitian_eigenvalues(a);
  if (eig.size() == 0) return std::numeric_limits<double>::infinity();
  const double largest = eig.cwiseAbs().maxCoeff();
  const double smallest = eig.cwiseAbs().minCoeff();
  if (largest == 0.0 || smallest <= largest * std::numeric_limits<double>::epsilon()) {
    return std::numeric_limits<double>::infinity();
  }
  return largest / smallest;
}

}  // namespace kianc::math
