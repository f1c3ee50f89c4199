#include "vem.hpp"

#include <chrono>
#include <limits>
#include <stdexcept>
#include <utility>

#include "estep.hpp"
#include "mstep.hpp"
#include "numerics.hpp"
#include "parallel.hpp"
#include "smoother.hpp"

namespace vemove {
namespace {

Dims make_dims(const Observations& obs, const NmfModel& nmf) {
  nmf.validate();
  Dims d = obs.dims;
  d.sources = nmf.num_sources();
  d.components = nmf.components();
  if (d.channels < 1 || d.bins < 1 || d.frames < 1) {
    throw std::invalid_argument("run_vem: observations are empty");
  }
  if (d.sources < 1) throw std::invalid_argument("run_vem: model has no sources");
  if (nmf.w.rows() != d.bins) {
    throw std::invalid_argument("run_vem: nmf templates have " + std::to_string(nmf.w.rows()) +
                                " bins, observations have " + std::to_string(d.bins));
  }
  if (nmf.h.cols() != d.frames) {
    throw std::invalid_argument("run_vem: nmf activations have " + std::to_string(nmf.h.cols()) +
                                " frames, observations have " + std::to_string(d.frames));
  }
  return d;
}

// u(j, r) = sum_i E[a_{i,r} conj(a_{i,j})] from the mixing posterior moments.
// cov comes out of the smoother exactly Hermitian, so filling the lower
// triangle and mirroring preserves that without a temporary.
void refresh_u(const Vec& a_mean, const Mat& a_cov, int channels, int sources, Mat& u) {
  const int n = channels * sources;
  const cd* a = a_mean.data();
  const cd* cov = a_cov.data();
  u.resize(sources, sources);
  cd* ud = u.data();
  if (channels == 1) {  // the channel sum degenerates to single entries
    for (int j = 0; j < sources; ++j) {
      ud[j * sources + j] = cd(cov[j * sources + j].real() + std::norm(a[j]), 0.0);
      for (int r = j + 1; r < sources; ++r) {
        const cd acc = cov[j * sources + r] + a[r] * std::conj(a[j]);
        ud[r * sources + j] = acc;             // u(j, r)
        ud[j * sources + r] = std::conj(acc);  // u(r, j)
      }
    }
    return;
  }
  for (int j = 0; j < sources; ++j) {
    for (int r = 0; r <= j; ++r) {
      const cd* diag = cov + j * channels * n + r * channels;  // (r*I, j*I) block
      cd acc = 0.0;
      for (int i = 0; i < channels; ++i) {
        acc += diag[i * (n + 1)] + a[r * channels + i] * std::conj(a[j * channels + i]);
      }
      if (r == j) {
        ud[j * sources + j] = cd(acc.real(), 0.0);
      } else {
        ud[r * sources + j] = acc;           // u(j, r)
        ud[j * sources + r] = std::conj(acc);  // u(r, j)
      }
    }
  }
}

}  // namespace

InitBundle make_init(const Observations& obs, const NmfModel& nmf, const VemConfig& cfg) {
  const Dims dims = make_dims(obs, nmf);
  const int n = dims.stacked();
  const size_t cells = static_cast<size_t>(dims.bins) * dims.frames;

  InitBundle b;
  b.nmf = nmf;
  b.a_mean.assign(cells, Vec::Constant(n, cd(cfg.init_a_value, 0.0)));
  b.a_cov.assign(cells, cfg.init_posterior_cov_scale * Mat::Identity(n, n));
  b.prior_mean.assign(dims.bins, Vec::Constant(n, cd(cfg.init_a_value, 0.0)));
  const double evo_scale =
      cfg.pin_evolution_cov ? cfg.pinned_evolution_value : cfg.init_evolution_cov_scale;
  b.evolution_cov.assign(dims.bins, evo_scale * Mat::Identity(n, n));
  b.noise_var.resize(dims.bins);
  for (int f = 0; f < dims.bins; ++f) {
    double power = 0.0;
    for (int l = 0; l < dims.frames; ++l) power += obs.x[dims.at(f, l)].squaredNorm();
    power /= static_cast<double>(dims.frames) * dims.channels;
    b.noise_var(f) = std::max(cfg.init_noise_scale * power, cfg.jitter);
  }
  return b;
}

VemResult run_vem(const Observations& obs, const InitBundle& init, const VemConfig& cfg) {
  const Dims dims = make_dims(obs, init.nmf);
  const int channels = dims.channels;
  const int sources = dims.sources;
  const int bins = dims.bins;
  const int frames = dims.frames;
  const int components = dims.components;
  const int n = dims.stacked();
  const size_t cells = static_cast<size_t>(bins) * frames;
  if (init.a_mean.size() != cells || init.a_cov.size() != cells ||
      static_cast<int>(init.prior_mean.size()) != bins ||
      static_cast<int>(init.evolution_cov.size()) != bins || init.noise_var.size() != bins) {
    throw std::invalid_argument("run_vem: init bundle sizes do not match observations");
  }

  VemResult res;
  res.params.nmf = init.nmf;
  res.params.prior_mean = init.prior_mean;
  res.params.evolution_cov = init.evolution_cov;
  res.params.noise_var = init.noise_var;
  res.post.allocate(dims);
  res.post.a_mean = init.a_mean;
  res.post.a_cov = init.a_cov;
  for (size_t idx = 0; idx < cells; ++idx) {
    res.post.a_logdet[idx] = logdet_psd(res.post.a_cov[idx]);
    refresh_u(res.post.a_mean[idx], res.post.a_cov[idx], channels, sources, res.post.u[idx]);
  }

  const int workers = cfg.threads <= 0 ? default_thread_count() : cfg.threads;
  std::vector<std::vector<std::string>> bin_warnings(bins);

  // Per-worker scratch, constructed once and reused across iterations; every
  // buffer reaches its final size on the first cell and no Eigen temporary is
  // allocated after that.
  struct WorkerState {
    ChainSmoother smoother;
    std::vector<InstantStats> stats;
    RVec p, dvec;
    ChainPrior prior;
    ChannelMoment cm;
    EstepWorkspace ws;
    SourcePosterior sp;
    ComponentPosterior cp;
    WorkerState(int n, int frames, int sources, int components)
        : smoother(n, frames), stats(frames), p(sources), dvec(components) {}
  };
  std::vector<WorkerState> wstate;
  wstate.reserve(workers);
  for (int w = 0; w < workers; ++w) wstate.emplace_back(n, frames, sources, components);

  for (int iter = 1; iter <= cfg.iterations; ++iter) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<RMat> power = source_power(res.params.nmf);

    parallel_for(
        workers,
        [&](int w) {
          WorkerState& st = wstate[w];
          for (int f = w; f < bins; f += workers) {
            const double v = res.params.noise_var(f);
            for (int l = 0; l < frames; ++l) {
              const int idx = dims.at(f, l);
              for (int j = 0; j < sources; ++j) st.p(j) = power[j](f, l);
              for (int k = 0; k < components; ++k) {
                st.dvec(k) = res.params.nmf.w(f, k) * res.params.nmf.h(k, l);
              }
              st.cm.a_hat = Eigen::Map<const Mat>(res.post.a_mean[idx].data(), channels, sources);
              st.cm.u = res.post.u[idx];
              source_posterior_into(st.cm, st.p, obs.x[idx], v, st.ws, st.sp);
              component_posterior_into(st.cm, st.sp, st.dvec, res.params.nmf.source_of, st.p, v,
                                       st.cp);
              // Swap rather than copy: every field is rewritten in full on the
              // next cell, so the displaced buffers serve as that cell's
              // scratch and nothing is ever copied back.
              res.post.s_mean[idx].swap(st.sp.mean);
              res.post.s_cov[idx].swap(st.sp.cov);
              res.post.s_qmom[idx].swap(st.sp.second_moment);
              res.post.s_logdet[idx] = st.sp.cov_logdet;
              res.post.c_mean[idx].swap(st.cp.mean);
              res.post.c_var[idx].swap(st.cp.var);
              res.post.c_qmom[idx].swap(st.cp.second_moment);
              res.post.c_logdet[idx] = st.cp.cov_logdet;
              instantaneous_stats_into(obs.x[idx], res.post.s_mean[idx], res.post.s_qmom[idx], v,
                                       channels, st.stats[l]);
            }
            st.prior.mean = res.params.prior_mean[f];
            st.prior.evolution_cov = res.params.evolution_cov[f];
            st.smoother.run(st.prior, st.stats, cfg.jitter);
            const Marginals& mg = st.smoother.marginals();
            for (int l = 0; l < frames; ++l) {
              const int idx = dims.at(f, l);
              res.post.a_mean[idx] = mg.mean[l];
              res.post.a_cov[idx] = mg.cov[l];
              res.post.a_logdet[idx] = mg.logdet[l];
              refresh_u(mg.mean[l], mg.cov[l], channels, sources, res.post.u[idx]);
            }
            res.post.pair_moment[f] = st.smoother.pairwise().second_moment;
            res.post.pair_logdet[f] = st.smoother.pairwise().logdet_sum;

            res.params.noise_var(f) =
                update_noise_variance(obs, res.post, f, cfg.jitter, &bin_warnings[f]);
            res.params.prior_mean[f] = updated_prior_mean(res.post, f);
            if (!cfg.pin_evolution_cov) {
              res.params.evolution_cov[f] = update_evolution_cov(res.post, f);
            }
          }
        },
        workers);

    update_spectral_templates(res.params.nmf, res.post);
    update_activations(res.params.nmf, res.post);
    rescale(res.params.nmf);

    for (int f = 0; f < bins; ++f) {
      for (auto& msg : bin_warnings[f]) res.warnings.push_back(std::move(msg));
      bin_warnings[f].clear();
    }

    IterationDiag diag;
    diag.iteration = iter;
    // The bound is a diagnostic, not part of the update; skipping it keeps the
    // per-iteration timings a clean measurement of the E and M steps alone.
    diag.free_energy = cfg.trace_free_energy ? free_energy(obs, res.params, res.post)
                                             : std::numeric_limits<double>::quiet_NaN();
    diag.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    res.trace.push_back(diag);
  }
  return res;
}

std::vector<std::vector<Mat>> reconstruct_images(const Posteriors& post) {
  const Dims& d = post.dims;
  std::vector<std::vector<Mat>> images(
      d.sources, std::vector<Mat>(d.channels, Mat::Zero(d.bins, d.frames)));
  for (int f = 0; f < d.bins; ++f) {
    for (int l = 0; l < d.frames; ++l) {
      const int idx = d.at(f, l);
      const Vec& a = post.a_mean[idx];
      const Vec& s = post.s_mean[idx];
      for (int j = 0; j < d.sources; ++j) {
        for (int i = 0; i < d.channels; ++i) {
          images[j][i](f, l) = a(j * d.channels + i) * s(j);
        }
      }
    }
  }
  return images;
}

}  // namespace vemove
