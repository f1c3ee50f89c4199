#include "mstep.hpp"

#include <cmath>
#include <stdexcept>

#include "numerics.hpp"

namespace vemove {
namespace {

// E||x - A s||^2 under independent q(a), q(s): ||x||^2 - 2 Re(x^H A_hat s_hat)
// + tr(U Q^s). Nonnegative in exact arithmetic.
double residual_power(const Observations& obs, const Posteriors& post, int f, int l) {
  const int idx = post.dims.at(f, l);
  const int channels = post.dims.channels;
  const int sources = post.dims.sources;
  const cd* x = obs.x[idx].data();
  const cd* a = post.a_mean[idx].data();
  const cd* s = post.s_mean[idx].data();
  const cd* u = post.u[idx].data();
  const cd* q = post.s_qmom[idx].data();
  double power = 0.0, cross = 0.0;
  for (int i = 0; i < channels; ++i) {
    power += std::norm(x[i]);
    cd ax(0.0, 0.0);
    for (int j = 0; j < sources; ++j) ax += a[j * channels + i] * s[j];
    cross += (std::conj(x[i]) * ax).real();
  }
  double quad = 0.0;
  for (int j = 0; j < sources; ++j) {
    for (int r = 0; r < sources; ++r) {
      quad += (u[r * sources + j] * q[j * sources + r]).real();
    }
  }
  return power - 2.0 * cross + quad;
}

}  // namespace

double update_noise_variance(const Observations& obs, const Posteriors& post, int f,
                             double floor, std::vector<std::string>* warnings) {
  const int frames = post.dims.frames;
  double acc = 0.0;
  for (int l = 0; l < frames; ++l) acc += residual_power(obs, post, f, l);
  const double mean = acc / (static_cast<double>(frames) * post.dims.channels);
  if (mean < 0) {
    if (warnings) {
      warnings->push_back("noise variance at bin " + std::to_string(f) +
                          " went negative numerically; clamped to floor");
    }
    return floor;
  }
  return mean + floor;
}

Vec updated_prior_mean(const Posteriors& post, int f) {
  return post.a_mean[post.dims.at(f, 0)];
}

Mat update_evolution_cov(const Posteriors& post, int f) {
  const int n = post.dims.stacked();
  const Mat& q = post.pair_moment[f];
  Mat steps = q.topLeftCorner(n, n) - q.topRightCorner(n, n) - q.bottomLeftCorner(n, n) +
              q.bottomRightCorner(n, n);
  steps += post.a_cov[post.dims.at(f, 0)];
  return hermitianize(steps / post.dims.frames);
}

void update_spectral_templates(NmfModel& nmf, const Posteriors& post, double floor) {
  const int bins = post.dims.bins;
  const int frames = post.dims.frames;
  for (int f = 0; f < bins; ++f) {
    for (int k = 0; k < nmf.components(); ++k) {
      double acc = 0.0;
      for (int l = 0; l < frames; ++l) acc += post.c_qmom[post.dims.at(f, l)](k) / nmf.h(k, l);
      nmf.w(f, k) = std::max(floor, acc / frames);
    }
  }
}

void update_activations(NmfModel& nmf, const Posteriors& post, double floor) {
  const int bins = post.dims.bins;
  const int frames = post.dims.frames;
  for (int l = 0; l < frames; ++l) {
    for (int k = 0; k < nmf.components(); ++k) {
      double acc = 0.0;
      for (int f = 0; f < bins; ++f) acc += post.c_qmom[post.dims.at(f, l)](k) / nmf.w(f, k);
      nmf.h(k, l) = std::max(floor, acc / bins);
    }
  }
}

double expected_complete_loglik(const Observations& obs, const Parameters& params,
                                const Posteriors& post) {
  const Dims& d = post.dims;
  const int n = d.stacked();
  double acc = 0.0;

  // observation term
  for (int f = 0; f < d.bins; ++f) {
    const double v = params.noise_var(f);
    const double log_pv = std::log(M_PI * v);
    double residual = 0.0;
    for (int l = 0; l < d.frames; ++l) residual += residual_power(obs, post, f, l);
    acc += -static_cast<double>(d.frames) * d.channels * log_pv - residual / v;
  }

  // component prior term; log w and log h factor out of the (f, l, k) sum
  const RMat& w = params.nmf.w;
  const RMat& h = params.nmf.h;
  double log_w_sum = w.array().log().sum();
  double log_h_sum = h.array().log().sum();
  acc += -static_cast<double>(d.bins) * d.frames * d.components * std::log(M_PI) -
         d.frames * log_w_sum - d.bins * log_h_sum;
  for (int f = 0; f < d.bins; ++f) {
    for (int l = 0; l < d.frames; ++l) {
      const RVec& q = post.c_qmom[d.at(f, l)];
      for (int k = 0; k < d.components; ++k) acc -= q(k) / (w(f, k) * h(k, l));
    }
  }

  // chain transition and start terms
  for (int f = 0; f < d.bins; ++f) {
    const Mat prec = psd_inverse(params.evolution_cov[f]);
    const double logdet = logdet_psd(params.evolution_cov[f]);
    if (d.frames >= 2) {
      const Mat& q = post.pair_moment[f];
      Mat steps = q.topLeftCorner(n, n) - q.topRightCorner(n, n) - q.bottomLeftCorner(n, n) +
                  q.bottomRightCorner(n, n);
      acc += -(d.frames - 1.0) * (n * std::log(M_PI) + logdet) -
             prec.cwiseProduct(steps.transpose()).sum().real();
    }
    const Vec delta = post.a_mean[d.at(f, 0)] - params.prior_mean[f];
    acc += -(n * std::log(M_PI) + logdet) -
           prec.cwiseProduct(post.a_cov[d.at(f, 0)].transpose()).sum().real() -
           (delta.adjoint() * prec * delta).value().real();
  }
  return acc;
}

double free_energy(const Observations& obs, const Parameters& params, const Posteriors& post) {
  const Dims& d = post.dims;
  const int n = d.stacked();
  const double log_pie = std::log(M_PI) + 1.0;
  double acc = expected_complete_loglik(obs, params, post);

  // component posterior entropy
  for (int f = 0; f < d.bins; ++f) {
    for (int l = 0; l < d.frames; ++l) {
      acc += d.components * log_pie + post.c_logdet[d.at(f, l)];
    }
  }

  // chain entropy: sum of pairwise entropies minus interior marginal entropies
  for (int f = 0; f < d.bins; ++f) {
    if (d.frames == 1) {
      acc += n * log_pie + post.a_logdet[d.at(f, 0)];
      continue;
    }
    acc += (d.frames - 1.0) * 2 * n * log_pie + post.pair_logdet[f];
    for (int l = 1; l <= d.frames - 2; ++l) {
      acc -= n * log_pie + post.a_logdet[d.at(f, l)];
    }
  }
  return acc;
}

}  // namespace vemove
