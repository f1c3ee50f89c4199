#include "wav.hpp"

#include "errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace vemove {
namespace {

[[noreturn]] void fail(const std::string& path, const std::string& why) {
  throw IoError("wav: " + path + ": " + why);
}

uint32_t read_u32(const unsigned char* p) {
  return p[0] | (p[1] << 8) | (p[2] << 16) | (uint32_t(p[3]) << 24);
}
uint16_t read_u16(const unsigned char* p) { return p[0] | (p[1] << 8); }

void put_u32(std::vector<unsigned char>& b, uint32_t v) {
  b.push_back(v & 0xff);
  b.push_back((v >> 8) & 0xff);
  b.push_back((v >> 16) & 0xff);
  b.push_back((v >> 24) & 0xff);
}
void put_u16(std::vector<unsigned char>& b, uint16_t v) {
  b.push_back(v & 0xff);
  b.push_back((v >> 8) & 0xff);
}

}  // namespace

WavData wav_read(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(path, "cannot open for reading");
  std::vector<unsigned char> raw((std::istreambuf_iterator<char>(f)),
                                 std::istreambuf_iterator<char>());
  if (raw.size() < 44) fail(path, "file too short for a WAVE header");
  if (std::memcmp(raw.data(), "RIFF", 4) != 0 || std::memcmp(raw.data() + 8, "WAVE", 4) != 0) {
    fail(path, "not a RIFF/WAVE file");
  }

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t sample_rate = 0;
  size_t data_off = 0, data_len = 0;
  size_t pos = 12;
  while (pos + 8 <= raw.size()) {
    const char* id = reinterpret_cast<const char*>(raw.data() + pos);
    uint32_t size = read_u32(raw.data() + pos + 4);
    size_t body = pos + 8;
    if (body + size > raw.size()) size = static_cast<uint32_t>(raw.size() - body);
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (size < 16) fail(path, "fmt chunk too short");
      format = read_u16(raw.data() + body);
      channels = read_u16(raw.data() + body + 2);
      sample_rate = read_u32(raw.data() + body + 4);
      bits = read_u16(raw.data() + body + 14);
      if (format == 0xFFFE && size >= 40) {  // extensible: subformat GUID leads with the tag
        format = read_u16(raw.data() + body + 24);
      }
    } else if (std::memcmp(id, "data", 4) == 0) {
      data_off = body;
      data_len = size;
    }
    pos = body + size + (size & 1);
  }
  if (channels == 0) fail(path, "missing fmt chunk");
  if (data_off == 0) fail(path, "missing data chunk");

  const int bytes_per = bits / 8;
  if (format == 1 && bits != 16) fail(path, "PCM depth " + std::to_string(bits) + " unsupported");
  if (format == 3 && bits != 32) fail(path, "float depth " + std::to_string(bits) + " unsupported");
  if (format != 1 && format != 3) fail(path, "format tag " + std::to_string(format) + " unsupported");

  const size_t frame_bytes = static_cast<size_t>(bytes_per) * channels;
  const size_t frames = frame_bytes ? data_len / frame_bytes : 0;
  if (frames == 0) fail(path, "empty data chunk");

  WavData out;
  out.sample_rate = static_cast<int>(sample_rate);
  out.channels.assign(channels, Signal::Zero(static_cast<int>(frames)));
  const unsigned char* d = raw.data() + data_off;
  for (size_t n = 0; n < frames; ++n) {
    for (int c = 0; c < channels; ++c) {
      const unsigned char* s = d + n * frame_bytes + c * bytes_per;
      if (format == 1) {
        int16_t v = static_cast<int16_t>(s[0] | (s[1] << 8));
        out.channels[c](static_cast<int>(n)) = v / 32768.0;
      } else {
        float v;
        std::memcpy(&v, s, 4);
        out.channels[c](static_cast<int>(n)) = v;
      }
    }
  }
  return out;
}

void wav_write(const std::string& path, const WavData& data, WavFormat format) {
  if (data.channels.empty()) fail(path, "no channels to write");
  const int channels = data.num_channels();
  const int frames = data.num_samples();
  for (const auto& ch : data.channels) {
    if (ch.size() != frames) fail(path, "channel lengths differ");
  }
  if (data.sample_rate <= 0) fail(path, "sample_rate must be positive");

  const int bytes_per = format == WavFormat::Float32 ? 4 : 2;
  const uint32_t data_bytes = static_cast<uint32_t>(frames) * channels * bytes_per;

  std::vector<unsigned char> b;
  b.reserve(44 + data_bytes);
  b.insert(b.end(), {'R', 'I', 'F', 'F'});
  put_u32(b, 36 + data_bytes);
  b.insert(b.end(), {'W', 'A', 'V', 'E'});
  b.insert(b.end(), {'f', 'm', 't', ' '});
  put_u32(b, 16);
  put_u16(b, format == WavFormat::Float32 ? 3 : 1);
  put_u16(b, static_cast<uint16_t>(channels));
  put_u32(b, static_cast<uint32_t>(data.sample_rate));
  put_u32(b, static_cast<uint32_t>(data.sample_rate) * channels * bytes_per);
  put_u16(b, static_cast<uint16_t>(channels * bytes_per));
  put_u16(b, static_cast<uint16_t>(8 * bytes_per));
  b.insert(b.end(), {'d', 'a', 't', 'a'});
  put_u32(b, data_bytes);

  for (int n = 0; n < frames; ++n) {
    for (int c = 0; c < channels; ++c) {
      const double v = data.channels[c](n);
      if (format == WavFormat::Float32) {
        float fv = static_cast<float>(v);
        unsigned char s[4];
        std::memcpy(s, &fv, 4);
        b.insert(b.end(), s, s + 4);
      } else {
        // Symmetric with the reader's /32768 so in-range samples round-trip
        // within half a quantization step.
        long code = std::clamp(std::lrint(v * 32768.0), -32768L, 32767L);
        put_u16(b, static_cast<uint16_t>(static_cast<int16_t>(code)));
      }
    }
  }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(path, "cannot open for writing");
  f.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
  if (!f) fail(path, "short write");
}

}  // namespace vemove
