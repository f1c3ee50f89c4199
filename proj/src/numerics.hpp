#pragma once

// Dense helpers shared by the whole pipeline. Gaussians over complex vectors
// are circular throughout: log N(x; mu, S) = -(d log pi + log|S|) - (x-mu)^H S^-1 (x-mu).

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include "common.hpp"

namespace vemove {

// Raised when a matrix stays unfactorable after the configured repair.
struct ConditioningError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// (M + M^H) / 2. Every covariance-producing routine routes its result through
// this before returning. Throws std::invalid_argument on non-square input.
Mat hermitianize(const Mat& m);

// (M + jitter I)^-1, hermitianized. The shift is applied unconditionally; used
// where a fixed floor is part of the update definition. Throws ConditioningError
// when the shifted matrix is still not invertible.
Mat regularized_inverse(const Mat& m, double jitter = 1e-7);

// Exact Hermitian PD solves. No perturbation on well-posed input; an escalating
// relative shift is tried only after a factorization reports failure, so these
// are safe inside recursions whose outputs are checked at 1e-8.
Mat psd_inverse(const Mat& m);
Mat psd_solve(const Mat& m, const Mat& rhs);
double logdet_psd(const Mat& m);

double complex_gaussian_logpdf(const Vec& x, const Vec& mean, const Mat& cov);

// q^T (x) I_n, scaled: out[(r n + i), (c n + i)] = scale * q(c, r). This is the
// block pattern of E[A^H A]-type precisions acting on stacked columns.
Mat kron_transpose_identity(const Mat& q, int n, double scale);

// log of a product, flushed to log space before the running product can leave
// double range; one std::log per ~150 decades of accumulated magnitude.
class LogProduct {
 public:
  void mul(double v) {
    prod_ *= v;
    if (prod_ < 1e-150 || prod_ > 1e150) {
      acc_ += std::log(prod_);
      prod_ = 1.0;
    }
  }
  double value() const { return acc_ + std::log(prod_); }

  // log(this / den) with a single std::log; both running products are inside
  // [1e-150, 1e150], so their quotient cannot overflow.
  double value_over(const LogProduct& den) const {
    return acc_ - den.acc_ + std::log(prod_ / den.prod_);
  }

 private:
  double acc_ = 0.0;
  double prod_ = 1.0;
};

// In-place lower Cholesky reading only the lower triangle; returns false on a
// nonpositive pivot. Hand-rolled rather than Eigen::LLT because compute() also
// takes an L1 norm of the input (n^2 complex-abs calls) for rcond bookkeeping
// nothing here uses, and its blocked kernels cost more than the arithmetic at
// chain-sized dimensions.
template <class M>
bool cholesky_lower(M& m) {
  const int n = static_cast<int>(m.rows());
  for (int k = 0; k < n; ++k) {
    double x = m(k, k).real();
    for (int q = 0; q < k; ++q) x -= std::norm(m(k, q));
    if (!(x > 0)) return false;
    const double root = std::sqrt(x);
    m(k, k) = root;
    for (int i = k + 1; i < n; ++i) {
      cd acc = m(i, k);
      for (int q = 0; q < k; ++q) acc -= m(i, q) * std::conj(m(k, q));
      m(i, k) = acc / root;
    }
  }
  return true;
}

// factor := chol(m), with the same escalating-shift repair as psd_inverse.
// factor's strict upper triangle is left untouched (callers below never read
// it); generic over the matrix type so fixed-size instantiations stay unrolled.
template <class M, class MIn>
void psd_factor(M& factor, const MIn& m) {
  factor = m;
  if (cholesky_lower(factor)) return;
  const int n = static_cast<int>(m.rows());
  const double scale = std::max(1.0, std::abs(m.trace().real()) / std::max(1, n));
  for (double shift = 1e-14; shift <= 1e-4; shift *= 100.0) {
    factor = m;
    factor.diagonal().array() += cd(shift * scale, 0.0);
    if (cholesky_lower(factor)) return;
  }
  throw ConditioningError("psd_factor: factorization failed after repair");
}

// log|m| off an existing factor.
template <class M>
double psd_factor_logdet(const M& factor) {
  LogProduct diag;
  for (int i = 0; i < factor.rows(); ++i) diag.mul(factor(i, i).real());
  return 2.0 * diag.value();
}

// dst = m^{-1} off an existing factor, by explicit substitution; scratch
// receives the inverted Cholesky factor. dst is exactly Hermitian with a real
// diagonal.
template <class M>
void psd_factor_inverse(const M& L, M& scratch, M& dst) {
  const int n = static_cast<int>(L.rows());
  scratch.resize(n, n);
  dst.resize(n, n);
  for (int j = 0; j < n; ++j) {
    scratch(j, j) = cd(1.0 / L(j, j).real(), 0.0);
    for (int i = j + 1; i < n; ++i) {
      cd acc(0.0, 0.0);
      for (int k = j; k < i; ++k) acc += L(i, k) * scratch(k, j);
      scratch(i, j) = -acc / L(i, i).real();
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      cd acc(0.0, 0.0);
      for (int k = i; k < n; ++k) acc += std::conj(scratch(k, i)) * scratch(k, j);
      if (i == j) {
        dst(i, i) = cd(acc.real(), 0.0);
      } else {
        dst(i, j) = acc;
        dst(j, i) = std::conj(acc);
      }
    }
  }
}

}  // namespace vemove
