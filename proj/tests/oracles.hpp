// SPDX-License-Identifier: Apache-2.0

// Slow, independent reference computations used only by the tests.

#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <random>

#include <Eigen/Dense>

namespace oracle {

// Power series of J0 in long double. Accurate to ~1e-15 absolute for x <= 20.
inline long double series_j0(long double x) {
  const long double q = x * x / 4.0L;
  long double term = 1.0L, sum = 1.0L;
  for (int k = 1; k < 400; ++k) {
    term *= -q / (static_cast<long double>(k) * k);
    sum += term;
    if (std::fabs(term) < 1e-24L * (1.0L + std::fabs(sum))) break;
  }
  return sum;
}

// Y0 = (2/pi)(ln(x/2) + gamma) J0 + (2/pi) sum (-1)^{k+1} H_k q^k / (k!)^2.
inline long double series_y0(long double x) {
  constexpr long double pi = 3.141592653589793238462643383279502884L;
  constexpr long double euler_gamma = 0.577215664901532860606512090082402431L;
  const long double q = x * x / 4.0L;
  long double term = 1.0L, harmonic = 0.0L, sum = 0.0L;
  for (int k = 1; k < 400; ++k) {
    term *= -q / (static_cast<long double>(k) * k);
    harmonic += 1.0L / k;
    const long double add = -term * harmonic;
    sum += add;
    if (std::fabs(add) < 1e-24L * (1.0L + std::fabs(sum))) break;
  }
  return (2.0L / pi) * ((std::log(x / 2.0L) + euler_gamma) * series_j0(x) + sum);
}

inline double bisect(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  for (int i = 0; i < 200 && hi - lo > 1e-16 * std::fabs(hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

struct Rng {
  explicit Rng(std::uint64_t seed) : gen(seed) {}
  double normal() { return gauss(gen); }
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(gen); }
  std::complex<double> cnormal() { return {normal(), normal()}; }
  Eigen::MatrixXcd matrix(Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXcd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = cnormal();
    return m;
  }
  Eigen::VectorXcd vector(Eigen::Index n) { return matrix(n, 1).col(0); }
  // Well-conditioned Hermitian positive definite matrix.
  Eigen::MatrixXcd hpd(Eigen::Index n) {
    const Eigen::MatrixXcd a = matrix(n, n);
    return a * a.adjoint() + static_cast<double>(n) * Eigen::MatrixXcd::Identity(n, n);
  }
  std::mt19937_64 gen;
  std::normal_distribution<double> gauss{0.0, 1.0};
};

inline double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

// Central finite-difference gradient of a real cost with respect to conj(W),
// i.e. (df/dRe + j df/dIm) / 2 for each entry.
inline Eigen::MatrixXcd wirtinger_gradient(const std::function<double(const Eigen::MatrixXcd&)>& cost,
                                           const Eigen::MatrixXcd& w, double h) {
  Eigen::MatrixXcd grad(w.rows(), w.cols());
  for (Eigen::Index j = 0; j < w.cols(); ++j) {
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      Eigen::MatrixXcd p = w, m = w;
      p(i, j) += h;
      m(i, j) -= h;
      const double d_re = (cost(p) - cost(m)) / (2 * h);
      p = w;
      m = w;
      p(i, j) += std::complex<double>(0, h);
      m(i, j) -= std::complex<double>(0, h);
      const double d_im = (cost(p) - cost(m)) / (2 * h);
      grad(i, j) = 0.5 * std::complex<double>(d_re, d_im);
    }
  }
  return grad;
}

}  // namespace oracle
