#pragma once

// Small generators shared across the test files.

#include "common.hpp"
#include "rng.hpp"

namespace vemove::testing {

inline Mat random_complex(Rng& rng, int rows, int cols) {
  Mat m(rows, cols);
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) m(r, c) = rng.complex_normal();
  }
  return m;
}

// Hermitian PD with eigenvalues bounded away from zero by `ridge`.
inline Mat random_psd(Rng& rng, int n, double ridge = 0.1) {
  const Mat m = random_complex(rng, n, n);
  Mat out = m * m.adjoint() / n + ridge * Mat::Identity(n, n);
  return ((out + out.adjoint()) / 2.0).eval();
}

inline RVec random_positive(Rng& rng, int n, double lo = 0.2, double hi = 2.0) {
  RVec v(n);
  for (int i = 0; i < n; ++i) v(i) = lo + (hi - lo) * rng.uniform();
  return v;
}

inline Signal random_signal(Rng& rng, int n, double scale = 1.0) {
  Signal s(n);
  for (int i = 0; i < n; ++i) s(i) = scale * rng.normal();
  return s;
}

inline double rel_err(const Mat& got, const Mat& want) {
  const double denom = want.norm();
  return (got - want).norm() / (denom > 0 ? denom : 1.0);
}

inline double rel_err(const Vec& got, const Vec& want) {
  const double denom = want.norm();
  return (got - want).norm() / (denom > 0 ? denom : 1.0);
}

}  // namespace vemove::testing
