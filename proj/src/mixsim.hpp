#pragma once

// Synthetic data. Two families: mixtures drawn directly from the transform-
// domain model (for controlled inference checks), and time-domain scenes where
// each source passes through an FIR filter whose taps crossfade linearly from
// a start set to an end set over the file (a source moving between two
// positions).

#include <cstdint>
#include <utility>
#include <vector>

#include "model.hpp"
#include "stft.hpp"

namespace vemove {

struct TfMixtureSpec {
  int channels = 2;
  int sources = 2;
  int bins = 33;
  int frames = 32;
  int components_per_source = 4;
  double evolution_scale = 1e-3;  // random-walk step variance per coefficient
  double noise_var = 1e-4;
  double mean_scale = 1.0;        // scale of the chain start means
};

struct TfMixture {
  Observations obs;
  Parameters params;        // the generating parameters
  std::vector<Vec> a_true;  // per (f, l): stacked mixing vector
  std::vector<Vec> s_true;  // per (f, l): source vector
};

TfMixture generate_stft_mixture(const TfMixtureSpec& spec, uint64_t seed);

// kind 0: harmonic tone cluster with slow per-partial amplitude movement and
// light vibrato. kind 1: resonant noise band with slow amplitude movement.
// RMS-normalized to 0.1.
Signal make_test_source(int kind, double seconds, int sample_rate, uint64_t seed);

// channels x taps. Each channel gets a short lead delay, a unit direct tap and
// an exponentially decaying random tail; unit energy per channel.
RMat random_fir(int channels, int taps, uint64_t seed);

// `steps` filters sliding linearly from start to end; endpoints exact.
std::vector<RMat> interpolate_filters(const RMat& start, const RMat& end, int steps);

// Per-sample linear crossfade from start taps to end taps across the signal.
MultiSignal render_moving_source(const Signal& s, const RMat& start, const RMat& end);

// Adds white Gaussian noise at the given SNR relative to the current content.
// Throws on silent input; +inf leaves the signal untouched.
void add_noise(MultiSignal& x, double snr_db, uint64_t seed);

// Factorizes each source's channel-averaged power spectrogram after mixing in
// the other sources' power at `corruption_db` below the target's energy, and
// concatenates the per-source factors into one partitioned model.
NmfModel semi_blind_nmf_init(const std::vector<MultiSignal>& source_images, double corruption_db,
                             int components_per_source, const StftParams& stft_params,
                             int nmf_iterations, uint64_t seed);

}  // namespace vemove
