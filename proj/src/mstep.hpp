#pragma once

// Parameter updates. Each one is the exact maximizer of the expected
// complete-data log-likelihood over its own block, holding the posteriors and
// the other parameters at the values it was handed, so each application is a
// coordinate-ascent step on the free energy.

#include <string>
#include <vector>

#include "model.hpp"

namespace vemove {

// Mean residual power at bin f over frames and channels, plus `floor`. The
// exact quantity is nonnegative; if roundoff drives it negative the result is
// clamped to `floor` and a warning is appended.
double update_noise_variance(const Observations& obs, const Posteriors& post, int f,
                             double floor, std::vector<std::string>* warnings);

// Chain start mean: the smoothed mean at the first frame.
Vec updated_prior_mean(const Posteriors& post, int f);

// Random-walk step covariance from the accumulated pairwise moment plus the
// first-frame smoothed covariance, divided by the frame count. Assumes the
// prior mean was just set to the first smoothed mean.
Mat update_evolution_cov(const Posteriors& post, int f);

// Spectral templates first (using current activations), then activations
// (using the updated templates); both consume the diagonal component second
// moments. Entries stay >= floor.
void update_spectral_templates(NmfModel& nmf, const Posteriors& post, double floor = 1e-12);
void update_activations(NmfModel& nmf, const Posteriors& post, double floor = 1e-12);

// E_q[log p(x, s, a; theta)] with every expectation taken under the moments
// stored in `post`. Parameters enter only through `params`, so callers may
// evaluate perturbed copies.
double expected_complete_loglik(const Observations& obs, const Parameters& params,
                                const Posteriors& post);

// loglik plus the entropies of the chain and component posteriors. Increases
// monotonically over the update sweep; evaluated once per iteration.
double free_energy(const Observations& obs, const Parameters& params, const Posteriors& post);

}  // namespace vemove
