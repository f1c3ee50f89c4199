#pragma once

// Deterministic randomness. One 64-bit seed drives a run; every consumer gets
// its own stream via derive_seed(root, tag[, index]), so adding a consumer
// never shifts the draws of existing ones. Gaussians come from an explicit
// Box-Muller on mt19937_64 words rather than std::normal_distribution, whose
// sequence is implementation-defined.

#include <cstdint>
#include <random>
#include <string_view>

#include "common.hpp"

namespace vemove {

uint64_t derive_seed(uint64_t root, std::string_view tag);
uint64_t derive_seed(uint64_t root, std::string_view tag, uint64_t index);

class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  // [0, 1), 53-bit resolution.
  double uniform();
  // N(0, 1). Box-Muller cosine branch, one fresh uniform pair per call.
  double normal();
  // Circular complex, E|z|^2 = 1. Uses both Box-Muller branches of one pair.
  cd complex_normal();
  Vec complex_normal_vec(int n);
  // Zero-mean draw with the given Hermitian PSD covariance (LLT factor times
  // an i.i.d. circular vector).
  Vec complex_normal_with_cov(const Mat& cov);
  // Inclusive bounds, rejection sampled, bias free.
  int uniform_int(int lo, int hi);

 private:
  std::mt19937_64 gen_;
};

}  // namespace vemove
