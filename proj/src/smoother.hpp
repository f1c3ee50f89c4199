#pragma once

// Gaussian smoothing for one frequency bin's chain of stacked mixing vectors:
// a_1 ~ N(mean, evolution_cov), a_{l+1} | a_l ~ N(a_l, evolution_cov), and per
// frame a rank-limited Gaussian evidence kept in information form (precision,
// precision * mean). The backward recursion also runs in information form with
// a flat start (zero information after the last frame), so the marginals are
// the exact conditionals: at l = L they coincide with the forward stats, and
// singular evidence needs no special casing. All inversions are exact; jitter
// enters only the accumulated pairwise moment, once.

#include <vector>

#include "common.hpp"

namespace vemove {

struct ChainPrior {
  Vec mean;           // IJ
  Mat evolution_cov;  // IJ x IJ Hermitian PD
};

struct InstantStats {
  Mat precision;       // IJ x IJ Hermitian PSD, may be singular
  Vec precision_mean;  // IJ
};

// Evidence for one frame: precision = s_second_moment^T kron I / noise_var,
// precision_mean = vec(x s_mean^H) / noise_var.
InstantStats instantaneous_stats(const Vec& x, const Vec& s_mean, const Mat& s_second_moment,
                                 double noise_var, int channels);
void instantaneous_stats_into(const Vec& x, const Vec& s_mean, const Mat& s_second_moment,
                              double noise_var, int channels, InstantStats& out);

struct ForwardStats {
  std::vector<Vec> mean;
  std::vector<Mat> cov;
};

struct BackwardStats {
  std::vector<Mat> info;       // zero at the last frame
  std::vector<Vec> info_mean;
};

struct Marginals {
  std::vector<Vec> mean;
  std::vector<Mat> cov;
  std::vector<double> logdet;  // log|cov| per frame, free from the factorization
};

// Joint statistics of consecutive pairs (a_{l+1}, a_l), l = 1 .. L-1. The
// stacked order puts a_{l+1} in the top block. second_moment accumulates
// cov + mean mean^H over pairs plus jitter I added once at the end;
// logdet_sum adds the exact log-determinants of the unregularized pairwise
// covariances (the chain entropy needs them).
struct PairwiseStats {
  Mat second_moment;
  double logdet_sum = 0.0;
  std::vector<Vec> mean;
  std::vector<Mat> cov;  // filled only when keep_covariances
};

// One full smoothing sweep with buffers reused across calls; construct once
// per worker and feed it every bin of the same (dim, frames) shape.
class ChainSmoother {
 public:
  ChainSmoother(int dim, int frames);

  void run(const ChainPrior& prior, const std::vector<InstantStats>& stats, double jitter,
           bool keep_pairwise_covs = false);

  const ForwardStats& forward() const { return fwd_; }
  const BackwardStats& backward() const { return bwd_; }
  const Marginals& marginals() const { return marg_; }
  const PairwiseStats& pairwise() const { return pair_; }

 private:
  // The chain dimension picks a stack-allocated fixed-size instantiation when
  // it is one of the common small sizes; everything else runs dynamically.
  template <int N>
  void run_impl(const ChainPrior& prior, const std::vector<InstantStats>& stats, double jitter,
                bool keep_pairwise_covs);

  int n_;
  int frames_;
  std::vector<Mat> fwd_prec_;
  ForwardStats fwd_;
  BackwardStats bwd_;
  Marginals marg_;
  PairwiseStats pair_;
};

// Convenience single-shot entry points over ChainSmoother.
ForwardStats forward_pass(const ChainPrior& prior, const std::vector<InstantStats>& stats);
BackwardStats backward_pass(const ChainPrior& prior, const std::vector<InstantStats>& stats);
Marginals smooth_marginals(const ChainPrior& prior, const std::vector<InstantStats>& stats);
PairwiseStats pairwise_stats(const ChainPrior& prior, const std::vector<InstantStats>& stats,
                             double jitter, bool keep_covariances = false);

}  // namespace vemove
