#pragma once

// Separation scores for multichannel source-image estimates. Each estimate
// channel is decomposed by least squares onto delayed copies (0 .. max_delay-1
// samples) of all reference image channels: the part explained by the true
// source's own image is the target, the rest of the explained part is
// interference, and the unexplained remainder is artifact. The three parts are
// mutually orthogonal and sum to the estimate exactly. Ratios are in dB over
// channel-concatenated energies, capped at +-200.

#include <vector>

#include "common.hpp"

namespace vemove {

struct BssScores {
  double sdr = 0;
  double sir = 0;
  double sar = 0;
};

class BssProjector {
 public:
  BssProjector(const std::vector<MultiSignal>& references, int max_delay);

  struct Decomposition {
    MultiSignal target, interf, artif;
  };
  Decomposition decompose(const MultiSignal& estimate, int source) const;
  BssScores score(const MultiSignal& estimate, int source) const;

 private:
  Signal project(const Eigen::ColPivHouseholderQR<RMat>& qr, int rank, const Signal& x) const;

  int delays_ = 0;
  int channels_ = 0;
  int sources_ = 0;
  int length_ = 0;
  // Rank-revealing orthogonal bases for the delayed-copy spans. Projecting
  // through Q keeps the decomposition orthogonal even when delayed copies of
  // tonal references are almost linearly dependent; normal equations square
  // that conditioning and fall apart.
  Eigen::ColPivHouseholderQR<RMat> full_qr_;
  std::vector<Eigen::ColPivHouseholderQR<RMat>> sub_qr_;  // per source block
  int full_rank_ = 0;
  std::vector<int> sub_rank_;
};

std::vector<BssScores> bss_eval_images(const std::vector<MultiSignal>& estimates,
                                       const std::vector<MultiSignal>& references,
                                       int max_delay = 32);

}  // namespace vemove
