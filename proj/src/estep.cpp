#include "estep.hpp"

#include <cmath>
#include <stdexcept>

#include "numerics.hpp"

namespace vemove {

ChannelMoment channel_moment(const Vec& a_mean, const Mat& a_cov, int channels, int sources) {
  if (a_mean.size() != channels * sources) {
    throw std::invalid_argument("channel_moment: a_mean size != channels * sources");
  }
  ChannelMoment cm;
  cm.a_hat = Eigen::Map<const Mat>(a_mean.data(), channels, sources);
  cm.u.resize(sources, sources);
  for (int j = 0; j < sources; ++j) {
    for (int r = 0; r < sources; ++r) {
      cd acc = 0.0;
      for (int i = 0; i < channels; ++i) {
        acc += a_cov(r * channels + i, j * channels + i) +
               a_mean(r * channels + i) * std::conj(a_mean(j * channels + i));
      }
      cm.u(j, r) = acc;
    }
  }
  cm.u = hermitianize(cm.u);
  return cm;
}

SourcePosterior source_posterior(const ChannelMoment& cm, const RVec& prior_var, const Vec& x,
                                 double noise_var) {
  EstepWorkspace ws;
  SourcePosterior sp;
  source_posterior_into(cm, prior_var, x, noise_var, ws, sp);
  return sp;
}

void source_posterior_into(const ChannelMoment& cm, const RVec& prior_var, const Vec& x,
                           double noise_var, EstepWorkspace& ws, SourcePosterior& out) {
  // a_hat is I x J column-major, so its storage is already the stacked layout.
  const Vec a = Eigen::Map<const Vec>(cm.a_hat.data(), cm.a_hat.size());
  source_posterior_into(cm.u, a, static_cast<int>(cm.a_hat.rows()), prior_var, x, noise_var, ws,
                        out);
}

void source_posterior_into(const Mat& u, const Vec& a_stacked, int channels,
                           const RVec& prior_var, const Vec& x, double noise_var,
                           EstepWorkspace& ws, SourcePosterior& out) {
  const int sources = static_cast<int>(u.rows());
  if (prior_var.size() != sources) {
    throw std::invalid_argument("source_posterior: prior_var size != sources");
  }
  for (int j = 0; j < sources; ++j) {
    if (!(prior_var(j) > 0)) {
      throw std::invalid_argument("source_posterior: prior variances must be positive");
    }
  }

  // Closed-form posteriors for the one- and two-source cases, which cover the
  // intended use of the toolkit; matrix sizes there are too small for the
  // factor-based path's bookkeeping to pay off. Degenerate precisions fall
  // through to the general path and its diagonal repair.
  const cd* ud = u.data();
  const cd* ad = a_stacked.data();
  const cd* xd = x.data();
  const double inv_nv = 1.0 / noise_var;
  if (sources == 1) {
    const double prec = ud[0].real() * inv_nv + 1.0 / prior_var(0);
    if (prec > 0) {
      const double cov = 1.0 / prec;
      cd acc(0.0, 0.0);
      for (int i = 0; i < channels; ++i) acc += std::conj(ad[i]) * xd[i];
      out.cov.resize(1, 1);
      out.cov(0, 0) = cov;
      out.cov_logdet = std::log(cov);
      out.mean.resize(1);
      out.mean(0) = acc * (cov * inv_nv);
      out.second_moment.resize(1, 1);
      out.second_moment(0, 0) = cov + std::norm(out.mean(0));
      return;
    }
  } else if (sources == 2) {
    const double p00 = ud[0].real() * inv_nv + 1.0 / prior_var(0);
    const double p11 = ud[3].real() * inv_nv + 1.0 / prior_var(1);
    const cd p10 = ud[1] * inv_nv;  // u(1, 0)
    const double det = p00 * p11 - std::norm(p10);
    if (p00 > 0 && det > 0) {
      out.cov.resize(2, 2);
      out.mean.resize(2);
      out.second_moment.resize(2, 2);
      cd* cv = out.cov.data();
      cd* mn = out.mean.data();
      cd* sm = out.second_moment.data();
      const double inv_det = 1.0 / det;
      const double c00 = p11 * inv_det;
      const double c11 = p00 * inv_det;
      const cd c10 = -p10 * inv_det;  // cov(1, 0)
      cv[0] = c00;
      cv[1] = c10;
      cv[2] = std::conj(c10);
      cv[3] = c11;
      out.cov_logdet = -std::log(det);
      cd r0(0.0, 0.0), r1(0.0, 0.0);
      for (int i = 0; i < channels; ++i) {
        r0 += std::conj(ad[i]) * xd[i];
        r1 += std::conj(ad[channels + i]) * xd[i];
      }
      r0 *= inv_nv;
      r1 *= inv_nv;
      mn[0] = c00 * r0 + std::conj(c10) * r1;
      mn[1] = c10 * r0 + c11 * r1;
      sm[0] = c00 + std::norm(mn[0]);
      sm[3] = c11 + std::norm(mn[1]);
      const cd s10 = c10 + mn[1] * std::conj(mn[0]);  // second_moment(1, 0)
      sm[1] = s10;
      sm[2] = std::conj(s10);
      return;
    }
  }

  ws.prec = cm.u;
  ws.prec *= 1.0 / noise_var;
  for (int j = 0; j < sources; ++j) {
    ws.prec(j, j) = cd(ws.prec(j, j).real() + 1.0 / prior_var(j), 0.0);
  }

  // One factorization serves the inverse and the log-determinant.
  psd_factor(ws.factor, ws.prec);
  out.cov_logdet = -psd_factor_logdet(ws.factor);
  psd_factor_inverse(ws.factor, ws.factor_inv, out.cov);

  ws.rhs.resize(sources);
  for (int j = 0; j < sources; ++j) {
    cd acc(0.0, 0.0);
    for (int i = 0; i < channels; ++i) acc += std::conj(cm.a_hat(i, j)) * x(i);
    ws.rhs(j) = acc / noise_var;
  }
  out.mean.resize(sources);
  out.mean.noalias() = out.cov * ws.rhs;
  out.second_moment.resize(sources, sources);
  out.second_moment = out.cov;
  out.second_moment.noalias() += out.mean * out.mean.adjoint();
}

ComponentPosterior component_posterior(const ChannelMoment& cm, const SourcePosterior& sp,
                                       const RVec& d, const std::vector<int>& source_of,
                                       const RVec& prior_var, double noise_var) {
  ComponentPosterior cp;
  component_posterior_into(cm, sp, d, source_of, prior_var, noise_var, cp);
  return cp;
}

void component_posterior_into(const ChannelMoment& cm, const SourcePosterior& sp, const RVec& d,
                              const std::vector<int>& source_of, const RVec& prior_var,
                              double noise_var, ComponentPosterior& out) {
  const int k = static_cast<int>(d.size());
  const int sources = static_cast<int>(prior_var.size());
  if (static_cast<int>(source_of.size()) != k) {
    throw std::invalid_argument("component_posterior: source_of size != components");
  }
  for (int q = 0; q < k; ++q) {
    if (!(d(q) > 0)) {
      throw std::invalid_argument(
          "component_posterior: component prior variances must be positive");
    }
  }

  out.mean.resize(k);
  out.var.resize(k);
  out.second_moment.resize(k);

  // With one component per source the split is the identity: d_q == p_j makes
  // the gain d_q / p_j exactly one, the component variance collapses to the
  // source posterior variance (from Sigma = P - Sigma U P / v), and the
  // log-determinant correction log det D - log det P vanishes.
  if (k == sources) {
    bool identity = true;
    for (int q = 0; q < k; ++q) {
      if (source_of[q] != q || d(q) != prior_var(q)) {
        identity = false;
        break;
      }
    }
    if (identity) {
      for (int q = 0; q < k; ++q) {
        out.mean(q) = sp.mean(q);
        out.var(q) = std::max(0.0, sp.cov(q, q).real());
        out.second_moment(q) = out.var(q) + std::norm(out.mean(q));
      }
      out.cov_logdet = sp.cov_logdet;
      return;
    }
  }

  LogProduct prod_d;
  for (int q = 0; q < k; ++q) {
    const int j = source_of[q];
    // t_j = [U Sigma^s]_{jj} / (v p_j) is the j-th diagonal of the Hermitian
    // matrix (v U^{-1} + P)^{-1}; real up to roundoff even though U Sigma^s is
    // not. Only the diagonal is ever needed, so skip the full product.
    cd us_jj(0.0, 0.0);
    for (int r = 0; r < sources; ++r) us_jj += cm.u(j, r) * sp.cov(r, j);
    const double t = us_jj.real() / (noise_var * prior_var(j));
    out.mean(q) = (d(q) / prior_var(j)) * sp.mean(j);
    out.var(q) = std::max(0.0, d(q) * (1.0 - d(q) * t));
    out.second_moment(q) = out.var(q) + std::norm(out.mean(q));
    prod_d.mul(d(q));
  }
  LogProduct prod_p;
  for (int j = 0; j < sources; ++j) prod_p.mul(prior_var(j));
  out.cov_logdet = prod_d.value_over(prod_p) + sp.cov_logdet;
}

}  // namespace vemove
