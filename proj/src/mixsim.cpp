#include "mixsim.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "rng.hpp"

namespace vemove {

TfMixture generate_stft_mixture(const TfMixtureSpec& spec, uint64_t seed) {
  if (spec.channels < 1 || spec.sources < 1 || spec.bins < 1 || spec.frames < 1 ||
      spec.components_per_source < 1) {
    throw std::invalid_argument("generate_stft_mixture: all sizes must be >= 1");
  }
  if (spec.evolution_scale < 0 || spec.noise_var < 0) {
    throw std::invalid_argument("generate_stft_mixture: variances must be >= 0");
  }
  const int I = spec.channels;
  const int J = spec.sources;
  const int F = spec.bins;
  const int L = spec.frames;
  const int K = J * spec.components_per_source;
  const int n = I * J;

  Rng rng(derive_seed(seed, "tf_mixture"));

  TfMixture out;
  out.params.nmf.w.resize(F, K);
  out.params.nmf.h.resize(K, L);
  out.params.nmf.source_of.resize(K);
  for (int k = 0; k < K; ++k) {
    out.params.nmf.source_of[k] = k / spec.components_per_source;
    for (int f = 0; f < F; ++f) out.params.nmf.w(f, k) = 0.25 + rng.uniform();
    for (int l = 0; l < L; ++l) out.params.nmf.h(k, l) = 0.25 + rng.uniform();
  }
  out.params.nmf.validate();

  out.params.noise_var = RVec::Constant(F, spec.noise_var);
  out.params.prior_mean.resize(F);
  out.params.evolution_cov.assign(F, spec.evolution_scale * Mat::Identity(n, n));

  out.obs.dims.channels = I;
  out.obs.dims.sources = J;
  out.obs.dims.bins = F;
  out.obs.dims.frames = L;
  out.obs.dims.components = K;
  const size_t cells = static_cast<size_t>(F) * L;
  out.obs.x.resize(cells);
  out.a_true.resize(cells);
  out.s_true.resize(cells);

  const double step_sd = std::sqrt(spec.evolution_scale);
  const double noise_sd = std::sqrt(spec.noise_var);
  for (int f = 0; f < F; ++f) {
    out.params.prior_mean[f] = spec.mean_scale * rng.complex_normal_vec(n);
    Vec a = out.params.prior_mean[f] + step_sd * rng.complex_normal_vec(n);
    for (int l = 0; l < L; ++l) {
      const int idx = out.obs.dims.at(f, l);
      if (l > 0) a += step_sd * rng.complex_normal_vec(n);
      out.a_true[idx] = a;

      Vec s = Vec::Zero(J);
      for (int k = 0; k < K; ++k) {
        const double d = out.params.nmf.w(f, k) * out.params.nmf.h(k, l);
        s(out.params.nmf.source_of[k]) += std::sqrt(d) * rng.complex_normal();
      }
      out.s_true[idx] = s;

      const auto a_mat = Eigen::Map<const Mat>(a.data(), I, J);
      out.obs.x[idx] = a_mat * s + noise_sd * rng.complex_normal_vec(I);
    }
  }
  return out;
}

Signal make_test_source(int kind, double seconds, int sample_rate, uint64_t seed) {
  if (seconds <= 0 || sample_rate < 1000) {
    throw std::invalid_argument("make_test_source: bad duration or sample rate");
  }
  const int len = static_cast<int>(std::lround(seconds * sample_rate));
  Rng rng(seed);
  Signal out = Signal::Zero(len);
  const double dt = 1.0 / sample_rate;

  if (kind == 0) {
    const double f0 = 110.0 * std::pow(2.0, 1.5 * rng.uniform());
    const int partials = 8 + rng.uniform_int(0, 3);
    const double vib_rate = 4.0 + 2.0 * rng.uniform();
    const double vib_phase = 2.0 * M_PI * rng.uniform();
    std::vector<double> amp(partials), am_rate(partials), am_phase(partials), phase(partials);
    for (int m = 0; m < partials; ++m) {
      amp[m] = std::pow(m + 1.0, -0.7);
      am_rate[m] = 0.2 + rng.uniform();
      am_phase[m] = 2.0 * M_PI * rng.uniform();
      phase[m] = 2.0 * M_PI * rng.uniform();
    }
    for (int i = 0; i < len; ++i) {
      const double t = i * dt;
      const double inst = f0 * (1.0 + 0.005 * std::sin(2.0 * M_PI * vib_rate * t + vib_phase));
      double sample = 0.0;
      for (int m = 0; m < partials; ++m) {
        phase[m] += 2.0 * M_PI * (m + 1) * inst * dt;
        const double env = 0.55 + 0.45 * std::sin(2.0 * M_PI * am_rate[m] * t + am_phase[m]);
        sample += amp[m] * env * std::sin(phase[m]);
      }
      out(i) = sample;
    }
  } else if (kind == 1) {
    const double fc = 400.0 * std::pow(2.0, 2.0 * rng.uniform());
    const double q = 2.0 + 3.0 * rng.uniform();
    const double w0 = 2.0 * M_PI * fc / sample_rate;
    const double alpha = std::sin(w0) / (2.0 * q);
    const double b0 = alpha, b2 = -alpha;
    const double a0 = 1.0 + alpha, a1 = -2.0 * std::cos(w0), a2 = 1.0 - alpha;
    const double am_rate = 0.2 + rng.uniform();
    const double am_phase = 2.0 * M_PI * rng.uniform();
    double x1 = 0, x2 = 0, y1 = 0, y2 = 0;
    for (int i = 0; i < len; ++i) {
      const double x0 = rng.normal();
      const double y0 = (b0 * x0 + b2 * x2 - a1 * y1 - a2 * y2) / a0;
      x2 = x1;
      x1 = x0;
      y2 = y1;
      y1 = y0;
      const double t = i * dt;
      const double env = 0.55 + 0.45 * std::sin(2.0 * M_PI * am_rate * t + am_phase);
      out(i) = env * y0;
    }
  } else {
    throw std::invalid_argument("make_test_source: kind must be 0 or 1");
  }

  // 20 ms attack and release ramps
  const int ramp = std::min(len / 4, sample_rate / 50);
  for (int i = 0; i < ramp; ++i) {
    const double g = 0.5 * (1.0 - std::cos(M_PI * i / ramp));
    out(i) *= g;
    out(len - 1 - i) *= g;
  }
  const double rms = std::sqrt(out.squaredNorm() / len);
  if (rms > 0) out *= 0.1 / rms;
  return out;
}

RMat random_fir(int channels, int taps, uint64_t seed) {
  if (channels < 1 || taps < 1) throw std::invalid_argument("random_fir: sizes must be >= 1");
  Rng rng(seed);
  RMat h = RMat::Zero(channels, taps);
  for (int c = 0; c < channels; ++c) {
    const int delay = rng.uniform_int(0, std::min(3, taps - 1));
    const double decay = std::max(1.0, taps / 4.0);
    h(c, delay) = 1.0;
    for (int t = delay + 1; t < taps; ++t) {
      h(c, t) = 0.6 * rng.normal() * std::exp(-(t - delay) / decay);
    }
    const double norm = h.row(c).norm();
    h.row(c) *= (0.7 + 0.6 * rng.uniform()) / norm;
  }
  return h;
}

std::vector<RMat> interpolate_filters(const RMat& start, const RMat& end, int steps) {
  if (start.rows() != end.rows() || start.cols() != end.cols()) {
    throw std::invalid_argument("interpolate_filters: start and end shapes differ");
  }
  if (steps < 2) throw std::invalid_argument("interpolate_filters: steps must be >= 2");
  std::vector<RMat> out(steps);
  for (int i = 0; i < steps; ++i) {
    const double alpha = static_cast<double>(i) / (steps - 1);
    out[i] = (1.0 - alpha) * start + alpha * end;
  }
  return out;
}

MultiSignal render_moving_source(const Signal& s, const RMat& start, const RMat& end) {
  if (start.rows() != end.rows() || start.cols() != end.cols()) {
    throw std::invalid_argument("render_moving_source: start and end shapes differ");
  }
  const int channels = static_cast<int>(start.rows());
  const int taps = static_cast<int>(start.cols());
  const int len = static_cast<int>(s.size());
  if (len < 2) throw std::invalid_argument("render_moving_source: signal too short");

  MultiSignal out(channels, Signal::Zero(len));
  for (int c = 0; c < channels; ++c) {
    for (int i = 0; i < len; ++i) {
      const double alpha = static_cast<double>(i) / (len - 1);
      double acc = 0.0;
      const int tmax = std::min(taps - 1, i);
      for (int t = 0; t <= tmax; ++t) {
        const double tap = (1.0 - alpha) * start(c, t) + alpha * end(c, t);
        acc += tap * s(i - t);
      }
      out[c](i) = acc;
    }
  }
  return out;
}

void add_noise(MultiSignal& x, double snr_db, uint64_t seed) {
  if (x.empty()) throw std::invalid_argument("add_noise: no channels");
  if (std::isinf(snr_db) && snr_db > 0) return;
  double power = 0.0;
  for (const auto& ch : x) power += ch.squaredNorm();
  if (power <= 0) throw std::invalid_argument("add_noise: signal is silent");
  // Scale by the realized noise energy, not its expectation, so the output
  // signal-to-noise ratio hits snr_db exactly.
  Rng rng(seed);
  std::vector<Signal> noise(x.size());
  double noise_energy = 0.0;
  for (size_t c = 0; c < x.size(); ++c) {
    noise[c].resize(x[c].size());
    for (int i = 0; i < noise[c].size(); ++i) noise[c](i) = rng.normal();
    noise_energy += noise[c].squaredNorm();
  }
  const double scale = std::sqrt(power / (std::pow(10.0, snr_db / 10.0) * noise_energy));
  for (size_t c = 0; c < x.size(); ++c) x[c] += scale * noise[c];
}

NmfModel semi_blind_nmf_init(const std::vector<MultiSignal>& source_images, double corruption_db,
                             int components_per_source, const StftParams& stft_params,
                             int nmf_iterations, uint64_t seed) {
  const int sources = static_cast<int>(source_images.size());
  if (sources < 1) throw std::invalid_argument("semi_blind_nmf_init: no sources");
  if (components_per_source < 1) {
    throw std::invalid_argument("semi_blind_nmf_init: components_per_source must be >= 1");
  }

  // channel-averaged power spectrogram per source
  std::vector<RMat> power(sources);
  for (int j = 0; j < sources; ++j) {
    if (source_images[j].empty()) {
      throw std::invalid_argument("semi_blind_nmf_init: source " + std::to_string(j) +
                                  " has no channels");
    }
    for (const auto& ch : source_images[j]) {
      Spectrogram spec = stft_analyze(ch, stft_params);
      RMat p = spec.frames.cwiseAbs2();
      if (power[j].size() == 0) {
        power[j] = p;
      } else {
        power[j] += p;
      }
    }
    power[j] /= static_cast<double>(source_images[j].size());
  }
  for (int j = 1; j < sources; ++j) {
    if (power[j].rows() != power[0].rows() || power[j].cols() != power[0].cols()) {
      throw std::invalid_argument("semi_blind_nmf_init: source lengths differ");
    }
  }

  const double ratio = std::pow(10.0, -corruption_db / 10.0);
  std::vector<std::pair<RMat, RMat>> parts(sources);
  for (int j = 0; j < sources; ++j) {
    RMat interf = RMat::Zero(power[j].rows(), power[j].cols());
    for (int r = 0; r < sources; ++r) {
      if (r != j) interf += power[r];
    }
    RMat corrupted = power[j];
    const double interf_energy = interf.sum();
    if (sources > 1 && interf_energy > 0) {
      corrupted += (power[j].sum() / interf_energy) * ratio * interf;
    }
    parts[j] = kl_nmf_fit(corrupted, components_per_source, nmf_iterations,
                          derive_seed(seed, "nmf_init", j));
  }
  return concat_models(parts);
}

}  // namespace vemove
