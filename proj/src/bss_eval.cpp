#include "bss_eval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vemove {
namespace {

double ratio_db(double num, double den) {
  if (num <= 0) return -200.0;
  if (den <= 0) return 200.0;
  return std::clamp(10.0 * std::log10(num / den), -200.0, 200.0);
}

}  // namespace

BssProjector::BssProjector(const std::vector<MultiSignal>& references, int max_delay) {
  sources_ = static_cast<int>(references.size());
  if (sources_ < 1) throw std::invalid_argument("BssProjector: no references");
  if (max_delay < 1) throw std::invalid_argument("BssProjector: max_delay must be >= 1");
  channels_ = static_cast<int>(references[0].size());
  if (channels_ < 1) throw std::invalid_argument("BssProjector: references have no channels");
  length_ = static_cast<int>(references[0][0].size());
  if (length_ <= max_delay) throw std::invalid_argument("BssProjector: signals shorter than max_delay");
  for (const auto& ref : references) {
    if (static_cast<int>(ref.size()) != channels_) {
      throw std::invalid_argument("BssProjector: channel counts differ between references");
    }
    for (const auto& ch : ref) {
      if (static_cast<int>(ch.size()) != length_) {
        throw std::invalid_argument("BssProjector: signal lengths differ");
      }
    }
  }
  delays_ = max_delay;

  const int per_source = channels_ * delays_;
  RMat basis(length_, sources_ * per_source);
  for (int j = 0; j < sources_; ++j) {
    for (int c = 0; c < channels_; ++c) {
      for (int d = 0; d < delays_; ++d) {
        const int col = (j * channels_ + c) * delays_ + d;
        basis.col(col).setZero();
        basis.col(col).tail(length_ - d) = references[j][c].head(length_ - d);
      }
    }
  }
  full_qr_.compute(basis);
  full_rank_ = static_cast<int>(full_qr_.rank());
  sub_qr_.resize(sources_);
  sub_rank_.resize(sources_);
  for (int j = 0; j < sources_; ++j) {
    sub_qr_[j].compute(basis.middleCols(j * per_source, per_source));
    sub_rank_[j] = static_cast<int>(sub_qr_[j].rank());
  }
}

Signal BssProjector::project(const Eigen::ColPivHouseholderQR<RMat>& qr, int rank,
                             const Signal& x) const {
  Signal w = qr.householderQ().transpose() * x;
  w.tail(length_ - rank).setZero();
  return qr.householderQ() * w;
}

BssProjector::Decomposition BssProjector::decompose(const MultiSignal& estimate,
                                                    int source) const {
  if (source < 0 || source >= sources_) throw std::invalid_argument("decompose: bad source index");
  if (static_cast<int>(estimate.size()) != channels_) {
    throw std::invalid_argument("decompose: estimate channel count mismatch");
  }

  Decomposition out;
  out.target.resize(channels_);
  out.interf.resize(channels_);
  out.artif.resize(channels_);
  for (int c = 0; c < channels_; ++c) {
    if (static_cast<int>(estimate[c].size()) != length_) {
      throw std::invalid_argument("decompose: estimate length mismatch");
    }
    const Signal explained = project(full_qr_, full_rank_, estimate[c]);
    const Signal target = project(sub_qr_[source], sub_rank_[source], estimate[c]);
    out.target[c] = target;
    out.interf[c] = explained - target;
    out.artif[c] = estimate[c] - explained;
  }
  return out;
}

BssScores BssProjector::score(const MultiSignal& estimate, int source) const {
  const Decomposition dec = decompose(estimate, source);
  double target = 0, interf = 0, artif = 0, explained = 0;
  for (int c = 0; c < channels_; ++c) {
    target += dec.target[c].squaredNorm();
    interf += dec.interf[c].squaredNorm();
    artif += dec.artif[c].squaredNorm();
    explained += (dec.target[c] + dec.interf[c]).squaredNorm();
  }
  BssScores s;
  s.sdr = ratio_db(target, interf + artif);
  s.sir = ratio_db(target, interf);
  s.sar = ratio_db(explained, artif);
  return s;
}

std::vector<BssScores> bss_eval_images(const std::vector<MultiSignal>& estimates,
                                       const std::vector<MultiSignal>& references,
                                       int max_delay) {
  if (estimates.size() != references.size()) {
    throw std::invalid_argument("bss_eval_images: estimate and reference counts differ");
  }
  BssProjector projector(references, max_delay);
  std::vector<BssScores> out(estimates.size());
  for (size_t j = 0; j < estimates.size(); ++j) {
    out[j] = projector.score(estimates[j], static_cast<int>(j));
  }
  return out;
}

}  // namespace vemove
