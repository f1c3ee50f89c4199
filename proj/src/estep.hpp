#pragma once

// Conditional posteriors of sources and components at one (bin, frame), given
// the mixing-chain moments and current parameters. The component posterior is
// evaluated in closed form through the source posterior: only its diagonal is
// kept (that is all later updates consume), and the block structure makes the
// K x K determinant available from J x J quantities.

#include <vector>

#include "common.hpp"

namespace vemove {

struct ChannelMoment {
  Mat a_hat;  // I x J, posterior mean of the mixing matrix
  Mat u;      // J x J Hermitian PSD, E[A^H A]
};

ChannelMoment channel_moment(const Vec& a_mean, const Mat& a_cov, int channels, int sources);

struct SourcePosterior {
  Vec mean;           // J
  Mat cov;            // J x J
  Mat second_moment;  // cov + mean mean^H
  double cov_logdet;
};

// prior_var holds p_j > 0, the per-source prior variances at this (f, l).
SourcePosterior source_posterior(const ChannelMoment& cm, const RVec& prior_var, const Vec& x,
                                 double noise_var);

// Reusable scratch for the per-cell loops; one instance per worker keeps the
// inner E-step free of allocations.
struct EstepWorkspace {
  Mat prec;
  Mat factor;
  Mat factor_inv;
  Vec rhs;
};

void source_posterior_into(const ChannelMoment& cm, const RVec& prior_var, const Vec& x,
                           double noise_var, EstepWorkspace& ws, SourcePosterior& out);

// Same computation reading the mixing moments in place: u as stored, a as the
// column-stacked I*J mean (the layout a_hat maps onto), so per-cell callers
// need not assemble a ChannelMoment copy first.
void source_posterior_into(const Mat& u, const Vec& a_stacked, int channels,
                           const RVec& prior_var, const Vec& x, double noise_var,
                           EstepWorkspace& ws, SourcePosterior& out);

struct ComponentPosterior {
  Vec mean;            // K
  RVec var;            // K, in [0, d_k]
  RVec second_moment;  // var + |mean|^2
  double cov_logdet;   // log|full posterior cov|
};

// d holds the per-component prior variances d_k = w(f,k) h(k,l) > 0; source_of
// maps components to sources; prior_var must equal the block sums of d.
// Identity maintained exactly: the mean summed over a source's block equals
// that source's posterior mean.
ComponentPosterior component_posterior(const ChannelMoment& cm, const SourcePosterior& sp,
                                       const RVec& d, const std::vector<int>& source_of,
                                       const RVec& prior_var, double noise_var);

void component_posterior_into(const ChannelMoment& cm, const SourcePosterior& sp, const RVec& d,
                              const std::vector<int>& source_of, const RVec& prior_var,
                              double noise_var, ComponentPosterior& out);

// As above, but taking E[A^H A] directly (the only mixing moment this split
// uses).
void component_posterior_into(const Mat& u, const SourcePosterior& sp, const RVec& d,
                              const std::vector<int>& source_of, const RVec& prior_var,
                              double noise_var, ComponentPosterior& out);

}  // namespace vemove
