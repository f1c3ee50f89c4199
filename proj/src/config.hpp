#pragma once

// Run configuration, loaded from a JSON file. Every command reads the shared
// top-level fields plus its own section; unknown keys and out-of-range values
// are reported with their full path. Command-line overrides land on the parsed
// struct, never on the file.

#include <cstdint>
#include <string>
#include <vector>

#include "stft.hpp"
#include "vem.hpp"

namespace vemove {

struct SimulateConfig {
  int channels = 2;
  int sources = 2;
  double duration_s = 2.0;
  int sample_rate = 16000;
  int filter_taps = 32;
  double snr_db = 20.0;
  std::vector<std::string> source_kinds;  // "harmonic" or "noise_band" per source
};

struct SeparateConfig {
  std::string mixture = "mixture.wav";
  std::string nmf_init = "semi_blind";  // or "random"
  double corruption_db = 20.0;
  std::vector<std::string> references;  // clean image files, required for semi_blind
  int nmf_iterations = 200;
  int sources = 2;  // used by random init
};

struct EvaluateConfig {
  std::vector<std::string> estimates;
  std::vector<std::string> references;
  int max_delay = 32;
};

struct RunConfig {
  uint64_t seed = 0;
  std::string output_dir = ".";
  int threads = 0;
  StftParams stft;
  VemConfig vem;
  SimulateConfig simulate;
  SeparateConfig separate;
  EvaluateConfig evaluate;
};

RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

}  // namespace vemove
