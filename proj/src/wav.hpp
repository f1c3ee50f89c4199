#pragma once

// Minimal RIFF/WAVE reader and writer: PCM16 and IEEE float32, any channel
// count. Samples are doubles in [-1, 1] nominal range; float32 files round
// trip bit-for-bit within float precision, PCM16 quantizes on write.

#include <string>

#include "common.hpp"

namespace vemove {

struct WavData {
  int sample_rate = 0;
  MultiSignal channels;

  int num_channels() const { return static_cast<int>(channels.size()); }
  int num_samples() const { return channels.empty() ? 0 : static_cast<int>(channels[0].size()); }
};

enum class WavFormat { Float32, Pcm16 };

WavData wav_read(const std::string& path);
void wav_write(const std::string& path, const WavData& data,
               WavFormat format = WavFormat::Float32);

}  // namespace vemove
