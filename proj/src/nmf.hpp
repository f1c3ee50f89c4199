#pragma once

// Nonnegative factorization of power spectrograms with the KL objective, plus
// the component-to-source partition bookkeeping used by the separation model:
// source j owns a contiguous block of dictionary columns, and its prior
// variance at (f, l) is the sum of w(f,k) h(k,l) over its block.

#include <cstdint>
#include <utility>
#include <vector>

#include "common.hpp"

namespace vemove {

struct NmfModel {
  RMat w;                      // bins x components, entries >= floor
  RMat h;                      // components x frames
  std::vector<int> source_of;  // per column: owning source, nondecreasing blocks

  int components() const { return static_cast<int>(w.cols()); }
  int num_sources() const;
  void validate() const;  // throws std::invalid_argument with the offending field
};

// Per-source prior variance maps: result[j](f, l) = sum_{k in block j} w(f,k) h(k,l).
std::vector<RMat> source_power(const NmfModel& model);

// KL(V || W H) with the 0 log 0 = 0 convention.
double kl_divergence(const RMat& v, const RMat& wh);

// Multiplicative updates from a seeded positive init; entries floored at
// `floor` after every update. Monotone in the KL objective.
std::pair<RMat, RMat> kl_nmf_fit(const RMat& v, int components, int iterations,
                                 uint64_t seed, double floor = 1e-12);

// Concatenates per-source factorizations of per-source spectrograms into one
// model with the matching partition.
NmfModel concat_models(const std::vector<std::pair<RMat, RMat>>& parts);

// Scale columns of w to unit L1 and compensate rows of h; products w(f,k)h(k,l)
// are unchanged. Applied once per iteration after the spectral updates.
void rescale(NmfModel& model);

}  // namespace vemove
