#pragma once

// Half-spectrum STFT with a sine window on both analysis and synthesis.
// w[n] = sin(pi (n + 0.5) / N), hop = N / 2; w^2 overlap-adds to exactly 1, so
// analyze-then-synthesize is the identity away from the first and last hop
// (those samples see a single frame and come back attenuated). Forward DFT is
// unnormalized, the inverse carries 1/N.

#include "common.hpp"

namespace vemove {

struct StftParams {
  int window = 512;  // even, >= 4; hop is window / 2
};

struct Spectrogram {
  Mat frames;      // bins x frames, bins = window/2 + 1
  int window = 0;  // analysis window length the frames were made with

  int bins() const { return static_cast<int>(frames.rows()); }
  int num_frames() const { return static_cast<int>(frames.cols()); }
};

// Frames start at l*hop for l = 0 .. L-1 with L = ceil(len / hop); the input
// is zero-padded up to L*hop + hop so the last frame is complete.
Spectrogram stft_analyze(const Signal& x, const StftParams& p);

// Overlap-add resynthesis, truncated (or zero-extended) to `length` samples.
Signal stft_synthesize(const Spectrogram& s, const StftParams& p, int length);

// Number of frames analyze will produce for a signal of the given length.
int stft_num_frames(int length, const StftParams& p);

}  // namespace vemove
