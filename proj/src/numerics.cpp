#include "numerics.hpp"

#include <cmath>

namespace vemove {
namespace {

// LLT with escalating relative shift. Returns the shift that worked; throws
// when even the largest repair fails.
double factor_with_repair(const Mat& m, Eigen::LLT<Mat>& llt) {
  llt.compute(m);
  if (llt.info() == Eigen::Success) return 0.0;
  const int n = static_cast<int>(m.rows());
  const double scale = std::max(1.0, std::abs(m.trace().real()) / std::max(1, n));
  for (double shift = 1e-14; shift <= 1e-4; shift *= 100.0) {
    llt.compute(m + shift * scale * Mat::Identity(n, n));
    if (llt.info() == Eigen::Success) return shift * scale;
  }
  throw ConditioningError("Hermitian factorization failed after repair up to 1e-4 relative shift");
}

}  // namespace

Mat hermitianize(const Mat& m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("hermitianize: matrix must be square, got " +
                                std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
  return 0.5 * (m + m.adjoint());
}

Mat regularized_inverse(const Mat& m, double jitter) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("regularized_inverse: matrix must be square");
  }
  const int n = static_cast<int>(m.rows());
  Mat shifted = m + jitter * Mat::Identity(n, n);
  Eigen::LLT<Mat> llt(shifted);
  if (llt.info() == Eigen::Success) {
    return hermitianize(llt.solve(Mat::Identity(n, n)));
  }
  Eigen::FullPivLU<Mat> lu(shifted);
  if (!lu.isInvertible()) {
    throw ConditioningError("regularized_inverse: singular even after jitter " +
                            std::to_string(jitter));
  }
  return hermitianize(lu.inverse());
}

Mat psd_inverse(const Mat& m) {
  const int n = static_cast<int>(m.rows());
  Eigen::LLT<Mat> llt;
  factor_with_repair(m, llt);
  return hermitianize(llt.solve(Mat::Identity(n, n)));
}

Mat psd_solve(const Mat& m, const Mat& rhs) {
  Eigen::LLT<Mat> llt;
  factor_with_repair(m, llt);
  return llt.solve(rhs);
}

double logdet_psd(const Mat& m) {
  Eigen::LLT<Mat> llt;
  factor_with_repair(m, llt);
  double logdet = 0.0;
  for (int i = 0; i < m.rows(); ++i) {
    logdet += 2.0 * std::log(llt.matrixLLT()(i, i).real());
  }
  return logdet;
}

double complex_gaussian_logpdf(const Vec& x, const Vec& mean, const Mat& cov) {
  const int n = static_cast<int>(x.size());
  if (mean.size() != n || cov.rows() != n || cov.cols() != n) {
    throw std::invalid_argument("complex_gaussian_logpdf: dimension mismatch");
  }
  Eigen::LLT<Mat> llt;
  factor_with_repair(cov, llt);
  double logdet = 0.0;
  for (int i = 0; i < n; ++i) logdet += 2.0 * std::log(llt.matrixLLT()(i, i).real());
  Vec centered = x - mean;
  double quad = llt.matrixL().solve(centered).squaredNorm();
  return -(n * std::log(M_PI) + logdet) - quad;
}

Mat kron_transpose_identity(const Mat& q, int n, double scale) {
  const int r = static_cast<int>(q.rows());
  const int c = static_cast<int>(q.cols());
  Mat out = Mat::Zero(r * n, c * n);
  for (int row = 0; row < r; ++row) {
    for (int col = 0; col < c; ++col) {
      const cd value = scale * q(col, row);
      for (int i = 0; i < n; ++i) out(row * n + i, col * n + i) = value;
    }
  }
  return out;
}

}  // namespace vemove
