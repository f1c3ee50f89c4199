#pragma once

// Iteration driver. One sweep per iteration, bin-parallel where the model is
// bin-separable: source posterior, component posterior, chain smoothing, then
// the per-bin noise and chain-prior updates; the spectral factor updates and
// the free energy close the iteration. Bins deposit into preallocated slots
// and cross-bin sums run sequentially, so results do not depend on the thread
// count.

#include <cstdint>
#include <string>
#include <vector>

#include "model.hpp"

namespace vemove {

struct VemConfig {
  int iterations = 100;
  int components_per_source = 25;
  double jitter = 1e-7;
  double init_noise_scale = 1000.0;        // v_f starts at this times the mean observed power
  double init_posterior_cov_scale = 1e3;   // initial chain posterior covariance, times I
  double init_evolution_cov_scale = 1.0;   // initial random-walk step covariance, times I
  double init_a_value = 1.0;               // initial mixing posterior mean, every entry
  bool pin_evolution_cov = false;          // keep the step covariance fixed (static-filter mode)
  double pinned_evolution_value = 1e-10;   // its diagonal when pinned
  int threads = 0;                         // 0 picks the hardware count
  bool trace_free_energy = true;           // off: trace carries NaN and iterations skip the bound
};

struct InitBundle {
  NmfModel nmf;
  std::vector<Vec> a_mean;         // per (f, l)
  std::vector<Mat> a_cov;          // per (f, l)
  std::vector<Vec> prior_mean;     // per f
  std::vector<Mat> evolution_cov;  // per f
  RVec noise_var;                  // per f
};

InitBundle make_init(const Observations& obs, const NmfModel& nmf, const VemConfig& cfg);

struct IterationDiag {
  int iteration = 0;      // 1-based
  double free_energy = 0;
  double seconds = 0;     // wall time of this iteration
};

struct VemResult {
  Parameters params;
  Posteriors post;
  std::vector<IterationDiag> trace;
  std::vector<std::string> warnings;
};

VemResult run_vem(const Observations& obs, const InitBundle& init, const VemConfig& cfg);

// Per-source per-channel image spectrograms: entry (f, l) of result[j][i] is
// a_hat(i, j) * s_hat(j) at that (f, l).
std::vector<std::vector<Mat>> reconstruct_images(const Posteriors& post);

}  // namespace vemove
