#include "stft.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include <unsupported/Eigen/FFT>

namespace vemove {
namespace {

void check_params(const StftParams& p) {
  if (p.window < 4 || p.window % 2 != 0) {
    throw std::invalid_argument("stft: window must be even and >= 4, got " +
                                std::to_string(p.window));
  }
}

RVec sine_window(int n) {
  RVec w(n);
  for (int i = 0; i < n; ++i) w(i) = std::sin(M_PI * (i + 0.5) / n);
  return w;
}

}  // namespace

int stft_num_frames(int length, const StftParams& p) {
  check_params(p);
  const int hop = p.window / 2;
  return (length + hop - 1) / hop;
}

Spectrogram stft_analyze(const Signal& x, const StftParams& p) {
  check_params(p);
  const int n = p.window;
  const int hop = n / 2;
  const int len = static_cast<int>(x.size());
  if (len == 0) throw std::invalid_argument("stft_analyze: empty signal");
  const int frames = (len + hop - 1) / hop;
  const int bins = n / 2 + 1;

  Signal padded = Signal::Zero(frames * hop + hop);
  padded.head(len) = x;
  const RVec w = sine_window(n);

  Spectrogram out;
  out.window = n;
  out.frames.resize(bins, frames);

  Eigen::FFT<double> fft;
  std::vector<cd> buf(n), spec(n);
  for (int l = 0; l < frames; ++l) {
    for (int i = 0; i < n; ++i) buf[i] = cd(padded(l * hop + i) * w(i), 0.0);
    fft.fwd(spec, buf);
    for (int k = 0; k < bins; ++k) out.frames(k, l) = spec[k];
  }
  return out;
}

Signal stft_synthesize(const Spectrogram& s, const StftParams& p, int length) {
  check_params(p);
  const int n = p.window;
  if (s.window != n) {
    throw std::invalid_argument("stft_synthesize: spectrogram was analyzed with window " +
                                std::to_string(s.window) + ", params say " + std::to_string(n));
  }
  const int hop = n / 2;
  const int bins = n / 2 + 1;
  if (s.bins() != bins) {
    throw std::invalid_argument("stft_synthesize: expected " + std::to_string(bins) + " bins");
  }
  const int frames = s.num_frames();
  const RVec w = sine_window(n);

  Signal acc = Signal::Zero(frames * hop + hop);
  Eigen::FFT<double> fft;
  std::vector<cd> spec(n), buf(n);
  for (int l = 0; l < frames; ++l) {
    for (int k = 0; k < bins; ++k) spec[k] = s.frames(k, l);
    for (int k = bins; k < n; ++k) spec[k] = std::conj(s.frames(n - k, l));
    fft.inv(buf, spec);
    for (int i = 0; i < n; ++i) acc(l * hop + i) += buf[i].real() * w(i);
  }

  Signal out = Signal::Zero(length);
  const int copy = std::min<int>(length, static_cast<int>(acc.size()));
  out.head(copy) = acc.head(copy);
  return out;
}

}  // namespace vemove
