#include "model.hpp"

#include <stdexcept>

namespace vemove {

Observations Observations::from_spectrograms(const std::vector<Mat>& channels) {
  if (channels.empty()) throw std::invalid_argument("Observations: no channels");
  Observations obs;
  obs.dims.channels = static_cast<int>(channels.size());
  obs.dims.bins = static_cast<int>(channels[0].rows());
  obs.dims.frames = static_cast<int>(channels[0].cols());
  for (const auto& ch : channels) {
    if (ch.rows() != obs.dims.bins || ch.cols() != obs.dims.frames) {
      throw std::invalid_argument("Observations: channel spectrogram shapes differ");
    }
  }
  obs.x.resize(static_cast<size_t>(obs.dims.bins) * obs.dims.frames);
  for (int f = 0; f < obs.dims.bins; ++f) {
    for (int l = 0; l < obs.dims.frames; ++l) {
      Vec v(obs.dims.channels);
      for (int i = 0; i < obs.dims.channels; ++i) v(i) = channels[i](f, l);
      obs.x[obs.dims.at(f, l)] = std::move(v);
    }
  }
  return obs;
}

void Posteriors::allocate(const Dims& d) {
  dims = d;
  const size_t n = static_cast<size_t>(d.bins) * d.frames;
  a_mean.assign(n, Vec());
  a_cov.assign(n, Mat());
  a_logdet.assign(n, 0.0);
  u.assign(n, Mat());
  pair_moment.assign(d.bins, Mat());
  pair_logdet.assign(d.bins, 0.0);
  s_mean.assign(n, Vec());
  s_cov.assign(n, Mat());
  s_qmom.assign(n, Mat());
  s_logdet.assign(n, 0.0);
  c_mean.assign(n, Vec());
  c_var.assign(n, RVec());
  c_qmom.assign(n, RVec());
  c_logdet.assign(n, 0.0);
}

}  // namespace vemove
