#include "smoother.hpp"

#include <cmath>
#include <stdexcept>

#include "numerics.hpp"

namespace vemove {
namespace {

// dst = m^-1 (Hermitian PD up to repair); optionally reports log|m|. factor
// and scratch are reused workspace of m's size.
template <class M, class MIn>
void invert_into_t(M& factor, const MIn& m, M& scratch, M& dst, double* logdet) {
  psd_factor(factor, m);
  if (logdet) *logdet = psd_factor_logdet(factor);
  psd_factor_inverse(factor, scratch, dst);
}

template <class M>
void herm_t(M& m) {
  const int n = static_cast<int>(m.rows());
  for (int i = 0; i < n; ++i) {
    m(i, i) = cd(m(i, i).real(), 0.0);
    for (int j = i + 1; j < n; ++j) {
      const cd v = 0.5 * (m(i, j) + std::conj(m(j, i)));
      m(i, j) = v;
      m(j, i) = std::conj(v);
    }
  }
}

}  // namespace

InstantStats instantaneous_stats(const Vec& x, const Vec& s_mean, const Mat& s_second_moment,
                                 double noise_var, int channels) {
  InstantStats out;
  instantaneous_stats_into(x, s_mean, s_second_moment, noise_var, channels, out);
  return out;
}

void instantaneous_stats_into(const Vec& x, const Vec& s_mean, const Mat& s_second_moment,
                              double noise_var, int channels, InstantStats& out) {
  if (noise_var <= 0) throw std::invalid_argument("instantaneous_stats: noise_var must be > 0");
  if (x.size() != channels) throw std::invalid_argument("instantaneous_stats: x size != channels");
  const int sources = static_cast<int>(s_mean.size());
  const int n = channels * sources;
  // Single-channel precisions are dense, so the loop below rewrites every slot
  // and a reused buffer needs no clearing. With more channels the zero pattern
  // depends on the channel count, so same-size reuse must start from zero.
  if (out.precision.rows() != n || out.precision.cols() != n) {
    out.precision.resize(n, n);
    out.precision.setZero();
  } else if (channels > 1) {
    out.precision.setZero();
  }
  const double inv_nv = 1.0 / noise_var;
  const cd* qm = s_second_moment.data();
  cd* pd = out.precision.data();
  for (int r = 0; r < sources; ++r) {
    for (int c = 0; c < sources; ++c) {
      const cd value = qm[r * sources + c] * inv_nv;  // s_second_moment(c, r)
      cd* slot = pd + c * channels * n + r * channels;
      for (int i = 0; i < channels; ++i) slot[i * (n + 1)] = value;
    }
  }
  out.precision_mean.resize(n);
  cd* pm = out.precision_mean.data();
  for (int j = 0; j < sources; ++j) {
    const cd scale = std::conj(s_mean(j)) * inv_nv;
    for (int i = 0; i < channels; ++i) pm[j * channels + i] = x(i) * scale;
  }
}

ChainSmoother::ChainSmoother(int dim, int frames) : n_(dim), frames_(frames) {
  if (dim < 1 || frames < 1) throw std::invalid_argument("ChainSmoother: dim and frames >= 1");
  fwd_prec_.assign(frames, Mat(dim, dim));
  fwd_.mean.assign(frames, Vec(dim));
  fwd_.cov.assign(frames, Mat(dim, dim));
  bwd_.info.assign(frames, Mat(dim, dim));
  bwd_.info_mean.assign(frames, Vec(dim));
  marg_.mean.assign(frames, Vec(dim));
  marg_.cov.assign(frames, Mat(dim, dim));
  marg_.logdet.assign(frames, 0.0);
  pair_.second_moment = Mat::Zero(2 * dim, 2 * dim);
  if (frames > 1) pair_.mean.assign(frames - 1, Vec(2 * dim));
}

void ChainSmoother::run(const ChainPrior& prior, const std::vector<InstantStats>& stats,
                        double jitter, bool keep_pairwise_covs) {
  if (static_cast<int>(stats.size()) != frames_) {
    throw std::invalid_argument("ChainSmoother: stats size != frames");
  }
  if (prior.mean.size() != n_ || prior.evolution_cov.rows() != n_) {
    throw std::invalid_argument("ChainSmoother: prior dimension mismatch");
  }
  switch (n_) {
    case 1: run_impl<1>(prior, stats, jitter, keep_pairwise_covs); break;
    case 2: run_impl<2>(prior, stats, jitter, keep_pairwise_covs); break;
    case 4: run_impl<4>(prior, stats, jitter, keep_pairwise_covs); break;
    default: run_impl<Eigen::Dynamic>(prior, stats, jitter, keep_pairwise_covs); break;
  }
}

template <int N>
void ChainSmoother::run_impl(const ChainPrior& prior, const std::vector<InstantStats>& stats,
                             double jitter, bool keep_pairwise_covs) {
  constexpr int N2 = N == Eigen::Dynamic ? Eigen::Dynamic : 2 * N;
  using MatN = Eigen::Matrix<cd, N, N>;
  using VecN = Eigen::Matrix<cd, N, 1>;
  using MatN2 = Eigen::Matrix<cd, N2, N2>;
  using VecN2 = Eigen::Matrix<cd, N2, 1>;
  const int n = n_;
  const int last = frames_ - 1;

  Eigen::PartialPivLU<MatN> lu_n;
  MatN factor(n, n);
  MatN evo_cov(n, n), evo_prec(n, n), tmp_a(n, n), tmp_b(n, n), cov(n, n), scratch(n, n);
  VecN prior_mean(n), vtmp(n), carried(n), mean_cur(n);
  evo_cov = prior.evolution_cov;
  prior_mean = prior.mean;

  // Stored stats and pass outputs are read through maps. The factorizations
  // read only the lower triangle of their exactly Hermitian inputs, and the
  // backward recurrence re-symmetrizes its state every step, so none of these
  // reads needs a symmetrizing copy first.
  using CMapN = Eigen::Map<const MatN>;
  using CMapVN = Eigen::Map<const VecN>;

  // forward
  invert_into_t(factor, evo_cov, scratch, evo_prec, nullptr);
  for (int l = 0; l < frames_; ++l) {
    if (l == 0) {
      tmp_b = evo_prec;
      carried.noalias() = evo_prec * prior_mean;
    } else {
      tmp_a = cov + evo_cov;  // cov still holds the previous filtered covariance
      invert_into_t(factor, tmp_a, scratch, tmp_b, nullptr);
      carried.noalias() = tmp_b * mean_cur;
    }
    tmp_a = CMapN(stats[l].precision.data(), n, n) + tmp_b;
    invert_into_t(factor, tmp_a, scratch, cov, nullptr);
    vtmp = CMapVN(stats[l].precision_mean.data(), n) + carried;
    mean_cur.noalias() = cov * vtmp;
    fwd_.cov[l] = cov;
    fwd_.mean[l] = mean_cur;
  }

  // backward, flat at the last frame
  MatN binfo(n, n);
  VecN binfo_mean(n);
  binfo.setZero();
  binfo_mean.setZero();
  bwd_.info[last] = binfo;
  bwd_.info_mean[last] = binfo_mean;
  for (int l = last - 1; l >= 0; --l) {
    tmp_a = CMapN(stats[l + 1].precision.data(), n, n) + binfo;
    // (I + C S) is invertible for PSD C and PD S; no repair needed.
    tmp_b.noalias() = tmp_a * evo_cov;
    tmp_b.diagonal().array() += 1.0;
    vtmp = CMapVN(stats[l + 1].precision_mean.data(), n) + binfo_mean;
    if constexpr (N == Eigen::Dynamic) {
      lu_n.compute(tmp_b);
      binfo_mean = lu_n.solve(vtmp);
      binfo = lu_n.solve(tmp_a);
    } else {
      scratch = tmp_b.inverse();  // analytic at these sizes; see invertibility note
      binfo_mean.noalias() = scratch * vtmp;
      binfo.noalias() = scratch * tmp_a;
    }
    herm_t(binfo);
    bwd_.info[l] = binfo;
    bwd_.info_mean[l] = binfo_mean;
  }

  // marginals
  for (int l = 0; l < frames_; ++l) {
    invert_into_t(factor, CMapN(fwd_.cov[l].data(), n, n), scratch, tmp_b, nullptr);
    fwd_prec_[l] = tmp_b;
    tmp_a = tmp_b + CMapN(bwd_.info[l].data(), n, n);
    double prec_logdet = 0.0;
    invert_into_t(factor, tmp_a, scratch, cov, &prec_logdet);
    marg_.cov[l] = cov;
    marg_.logdet[l] = -prec_logdet;
    vtmp.noalias() = tmp_b * CMapVN(fwd_.mean[l].data(), n);
    vtmp += CMapVN(bwd_.info_mean[l].data(), n);
    mean_cur.noalias() = cov * vtmp;
    marg_.mean[l] = mean_cur;
  }

  // pairwise joints and their accumulated second moment
  pair_.logdet_sum = 0.0;
  if (keep_pairwise_covs) {
    pair_.cov.assign(std::max(0, frames_ - 1), Mat());
  } else {
    pair_.cov.clear();
  }
  if (frames_ == 1) {
    pair_.second_moment.setZero();
    pair_.second_moment.diagonal().array() += jitter;
    return;
  }
  MatN2 factor2(2 * n, 2 * n);
  MatN2 prec2(2 * n, 2 * n), cov2(2 * n, 2 * n), acc2(2 * n, 2 * n), scratch2(2 * n, 2 * n);
  VecN2 info2(2 * n), mean2(2 * n);
  acc2.setZero();
  for (int l = 0; l < frames_ - 1; ++l) {
    tmp_a = CMapN(stats[l + 1].precision.data(), n, n) + CMapN(bwd_.info[l + 1].data(), n, n);
    tmp_b = fwd_prec_[l];
    prec2.topLeftCorner(n, n) = evo_prec + tmp_a;
    prec2.topRightCorner(n, n) = -evo_prec;
    prec2.bottomLeftCorner(n, n) = -evo_prec;
    prec2.bottomRightCorner(n, n) = tmp_b + evo_prec;
    double prec_logdet = 0.0;
    invert_into_t(factor2, prec2, scratch2, cov2, &prec_logdet);
    pair_.logdet_sum -= prec_logdet;
    info2.head(n) = CMapVN(stats[l + 1].precision_mean.data(), n) +
                    CMapVN(bwd_.info_mean[l + 1].data(), n);
    info2.tail(n).noalias() = tmp_b * CMapVN(fwd_.mean[l].data(), n);
    mean2.noalias() = cov2 * info2;
    acc2 += cov2;
    acc2.noalias() += mean2 * mean2.adjoint();
    pair_.mean[l] = mean2;
    if (keep_pairwise_covs) pair_.cov[l] = cov2;
  }
  acc2.diagonal().array() += jitter;
  herm_t(acc2);
  pair_.second_moment = acc2;
}

ForwardStats forward_pass(const ChainPrior& prior, const std::vector<InstantStats>& stats) {
  ChainSmoother s(static_cast<int>(prior.mean.size()), static_cast<int>(stats.size()));
  s.run(prior, stats, 0.0);
  return s.forward();
}

BackwardStats backward_pass(const ChainPrior& prior, const std::vector<InstantStats>& stats) {
  ChainSmoother s(static_cast<int>(prior.mean.size()), static_cast<int>(stats.size()));
  s.run(prior, stats, 0.0);
  return s.backward();
}

Marginals smooth_marginals(const ChainPrior& prior, const std::vector<InstantStats>& stats) {
  ChainSmoother s(static_cast<int>(prior.mean.size()), static_cast<int>(stats.size()));
  s.run(prior, stats, 0.0);
  return s.marginals();
}

PairwiseStats pairwise_stats(const ChainPrior& prior, const std::vector<InstantStats>& stats,
                             double jitter, bool keep_covariances) {
  ChainSmoother s(static_cast<int>(prior.mean.size()), static_cast<int>(stats.size()));
  s.run(prior, stats, jitter, keep_covariances);
  return s.pairwise();
}

}  // namespace vemove
