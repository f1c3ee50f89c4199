#include "pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "bss_eval.hpp"
#include "errors.hpp"
#include "mixsim.hpp"
#include "rng.hpp"
#include "wav.hpp"

namespace vemove {
namespace {

namespace fs = std::filesystem;

fs::path ensure_output_dir(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
  return p;
}

std::ofstream open_text(const fs::path& p) {
  std::ofstream f(p);
  if (!f) throw IoError("cannot open " + p.string() + " for writing");
  f << std::setprecision(12);
  return f;
}

int kind_index(const std::string& kind) { return kind == "noise_band" ? 1 : 0; }

Observations observations_from_wav(const WavData& wav, const StftParams& stft) {
  std::vector<Mat> specs;
  specs.reserve(wav.channels.size());
  for (const auto& ch : wav.channels) specs.push_back(stft_analyze(ch, stft).frames);
  return Observations::from_spectrograms(specs);
}

NmfModel random_nmf_model(const Observations& obs, int sources, int components_per_source,
                          uint64_t seed) {
  // positive factors scaled so the summed source power matches the mixture
  const int bins = obs.dims.bins;
  const int frames = obs.dims.frames;
  double power = 0.0;
  for (const auto& x : obs.x) power += x.squaredNorm() / x.size();
  power /= static_cast<double>(bins) * frames;
  const int k_total = sources * components_per_source;
  const double scale = std::sqrt(std::max(power, 1e-12) / k_total);

  Rng rng(derive_seed(seed, "random_nmf"));
  NmfModel model;
  model.w.resize(bins, k_total);
  model.h.resize(k_total, frames);
  model.source_of.resize(k_total);
  for (int k = 0; k < k_total; ++k) {
    model.source_of[k] = k / components_per_source;
    for (int f = 0; f < bins; ++f) model.w(f, k) = scale * (0.1 + rng.uniform());
    for (int l = 0; l < frames; ++l) model.h(k, l) = scale * (0.1 + rng.uniform());
  }
  model.validate();
  return model;
}

void write_diagnostics(const fs::path& path, const VemResult& result) {
  std::ofstream f = open_text(path);
  f << "# iteration free_energy seconds\n";
  for (const auto& d : result.trace) {
    f << d.iteration << " " << d.free_energy << " " << d.seconds << "\n";
  }
  for (const auto& w : result.warnings) f << "# warning: " << w << "\n";
}

void write_scores(const fs::path& path, const std::vector<BssScores>& scores) {
  std::ofstream f = open_text(path);
  f << "# source sdr_db sir_db sar_db\n";
  BssScores mean;
  for (size_t j = 0; j < scores.size(); ++j) {
    f << "source_" << (j + 1) << " " << scores[j].sdr << " " << scores[j].sir << " "
      << scores[j].sar << "\n";
    mean.sdr += scores[j].sdr;
    mean.sir += scores[j].sir;
    mean.sar += scores[j].sar;
  }
  if (!scores.empty()) {
    const double n = static_cast<double>(scores.size());
    f << "mean " << mean.sdr / n << " " << mean.sir / n << " " << mean.sar / n << "\n";
  }
}

std::vector<MultiSignal> read_signal_set(const std::vector<std::string>& paths, int* sample_rate) {
  std::vector<MultiSignal> out;
  out.reserve(paths.size());
  for (const auto& p : paths) {
    WavData wav = wav_read(p);
    if (sample_rate) {
      if (*sample_rate == 0) *sample_rate = wav.sample_rate;
      if (*sample_rate != wav.sample_rate) {
        throw IoError("sample rates differ across input files (" + p + ")");
      }
    }
    out.push_back(std::move(wav.channels));
  }
  return out;
}

VemResult separate_mixture(const RunConfig& cfg, const WavData& mixture, NmfModel nmf) {
  Observations obs = observations_from_wav(mixture, cfg.stft);
  VemConfig vem_cfg = cfg.vem;
  vem_cfg.threads = cfg.threads;
  InitBundle init = make_init(obs, nmf, vem_cfg);
  return run_vem(obs, init, vem_cfg);
}

std::vector<MultiSignal> synthesize_estimates(const Posteriors& post, const StftParams& stft,
                                              int length) {
  const auto images = reconstruct_images(post);
  std::vector<MultiSignal> out(images.size());
  for (size_t j = 0; j < images.size(); ++j) {
    out[j].resize(images[j].size());
    for (size_t i = 0; i < images[j].size(); ++i) {
      Spectrogram spec;
      spec.frames = images[j][i];
      spec.window = stft.window;
      out[j][i] = stft_synthesize(spec, stft, length);
    }
  }
  return out;
}

void run_separation_to_dir(const RunConfig& cfg, const fs::path& out_dir) {
  const WavData mixture = wav_read(cfg.separate.mixture);

  NmfModel nmf;
  if (cfg.separate.nmf_init == "semi_blind") {
    int sr = mixture.sample_rate;
    std::vector<MultiSignal> refs = read_signal_set(cfg.separate.references, &sr);
    nmf = semi_blind_nmf_init(refs, cfg.separate.corruption_db, cfg.vem.components_per_source,
                              cfg.stft, cfg.separate.nmf_iterations,
                              derive_seed(cfg.seed, "separate"));
  } else {
    Observations obs = observations_from_wav(mixture, cfg.stft);
    nmf = random_nmf_model(obs, cfg.separate.sources, cfg.vem.components_per_source,
                           derive_seed(cfg.seed, "separate"));
  }

  VemResult result = separate_mixture(cfg, mixture, std::move(nmf));
  write_diagnostics(out_dir / "diagnostics.txt", result);

  const auto estimates =
      synthesize_estimates(result.post, cfg.stft, mixture.num_samples());
  for (size_t j = 0; j < estimates.size(); ++j) {
    WavData out;
    out.sample_rate = mixture.sample_rate;
    out.channels = estimates[j];
    wav_write((out_dir / ("estimate_" + std::to_string(j + 1) + ".wav")).string(), out);
  }
}

}  // namespace

void cmd_simulate(const RunConfig& cfg) {
  const fs::path out_dir = ensure_output_dir(cfg.output_dir);
  const SimulateConfig& sim = cfg.simulate;

  std::vector<std::string> kinds = sim.source_kinds;
  if (kinds.empty()) {
    for (int j = 0; j < sim.sources; ++j) kinds.push_back(j % 2 == 0 ? "harmonic" : "noise_band");
  }

  MultiSignal mixture(sim.channels);
  std::vector<MultiSignal> images(sim.sources);
  std::vector<Signal> sources(sim.sources);
  for (int j = 0; j < sim.sources; ++j) {
    sources[j] = make_test_source(kind_index(kinds[j]), sim.duration_s, sim.sample_rate,
                                  derive_seed(cfg.seed, "source", j));
    const RMat start = random_fir(sim.channels, sim.filter_taps,
                                  derive_seed(cfg.seed, "filter_start", j));
    const RMat end =
        random_fir(sim.channels, sim.filter_taps, derive_seed(cfg.seed, "filter_end", j));
    images[j] = render_moving_source(sources[j], start, end);
    for (int c = 0; c < sim.channels; ++c) {
      if (mixture[c].size() == 0) {
        mixture[c] = images[j][c];
      } else {
        mixture[c] += images[j][c];
      }
    }
  }
  add_noise(mixture, sim.snr_db, derive_seed(cfg.seed, "noise"));

  nlohmann::json manifest;
  manifest["seed"] = cfg.seed;
  manifest["sample_rate"] = sim.sample_rate;
  manifest["channels"] = sim.channels;
  manifest["sources"] = sim.sources;
  manifest["snr_db"] = sim.snr_db;
  manifest["filter_taps"] = sim.filter_taps;
  manifest["source_kinds"] = kinds;
  manifest["mixture"] = "mixture.wav";

  WavData wav;
  wav.sample_rate = sim.sample_rate;
  wav.channels = mixture;
  wav_write((out_dir / "mixture.wav").string(), wav);
  std::vector<std::string> image_files, source_files;
  for (int j = 0; j < sim.sources; ++j) {
    const std::string image_name = "image_" + std::to_string(j + 1) + ".wav";
    wav.channels = images[j];
    wav_write((out_dir / image_name).string(), wav);
    image_files.push_back(image_name);
    const std::string source_name = "source_" + std::to_string(j + 1) + ".wav";
    wav.channels = {sources[j]};
    wav_write((out_dir / source_name).string(), wav);
    source_files.push_back(source_name);
  }
  manifest["images"] = image_files;
  manifest["sources_mono"] = source_files;

  std::ofstream mf = open_text(out_dir / "manifest.json");
  mf << manifest.dump(2) << "\n";
}

void cmd_separate(const RunConfig& cfg) {
  const fs::path out_dir = ensure_output_dir(cfg.output_dir);
  run_separation_to_dir(cfg, out_dir);
}

void cmd_evaluate(const RunConfig& cfg) {
  const fs::path out_dir = ensure_output_dir(cfg.output_dir);
  if (cfg.evaluate.estimates.empty() || cfg.evaluate.references.empty()) {
    throw ConfigError("config: evaluate.estimates and evaluate.references must both be set");
  }
  int sr = 0;
  const auto estimates = read_signal_set(cfg.evaluate.estimates, &sr);
  const auto references = read_signal_set(cfg.evaluate.references, &sr);
  const auto scores = bss_eval_images(estimates, references, cfg.evaluate.max_delay);
  write_scores(out_dir / "scores.txt", scores);
}

void cmd_experiment(const RunConfig& cfg) {
  const fs::path out_dir = ensure_output_dir(cfg.output_dir);
  cmd_simulate(cfg);

  // references and mixture now live in output_dir
  std::vector<std::string> reference_files;
  for (int j = 0; j < cfg.simulate.sources; ++j) {
    reference_files.push_back((out_dir / ("image_" + std::to_string(j + 1) + ".wav")).string());
  }
  const std::string mixture_file = (out_dir / "mixture.wav").string();

  int sr = 0;
  const auto references = read_signal_set(reference_files, &sr);
  const WavData mixture = wav_read(mixture_file);

  // the unseparated mixture is the baseline estimate for every source
  BssProjector projector(references, cfg.evaluate.max_delay);
  std::vector<BssScores> input_scores(cfg.simulate.sources);
  for (int j = 0; j < cfg.simulate.sources; ++j) {
    input_scores[j] = projector.score(mixture.channels, j);
  }
  write_scores(out_dir / "scores_input.txt", input_scores);

  RunConfig run = cfg;
  run.separate.mixture = mixture_file;
  run.separate.nmf_init = "semi_blind";
  run.separate.references = reference_files;
  run.separate.sources = cfg.simulate.sources;

  struct Variant {
    const char* name;
    bool pinned;
  };
  const Variant variants[] = {{"learned", false}, {"pinned", true}};
  std::ostringstream summary;
  summary << std::setprecision(6);
  double mean_input = 0;
  for (const auto& s : input_scores) mean_input += s.sdr;
  mean_input /= input_scores.empty() ? 1.0 : static_cast<double>(input_scores.size());
  summary << "input mean_sdr_db " << mean_input << "\n";

  for (const auto& variant : variants) {
    RunConfig vcfg = run;
    vcfg.vem.pin_evolution_cov = variant.pinned;
    const fs::path vdir = ensure_output_dir((out_dir / variant.name).string());
    vcfg.output_dir = vdir.string();
    run_separation_to_dir(vcfg, vdir);

    std::vector<std::string> estimate_files;
    for (int j = 0; j < cfg.simulate.sources; ++j) {
      estimate_files.push_back((vdir / ("estimate_" + std::to_string(j + 1) + ".wav")).string());
    }
    const auto estimates = read_signal_set(estimate_files, &sr);
    const auto scores = bss_eval_images(estimates, references, cfg.evaluate.max_delay);
    write_scores(out_dir / ("scores_" + std::string(variant.name) + ".txt"), scores);

    double mean_sdr = 0;
    for (const auto& s : scores) mean_sdr += s.sdr;
    mean_sdr /= scores.empty() ? 1.0 : static_cast<double>(scores.size());
    summary << variant.name << " mean_sdr_db " << mean_sdr << " gain_db "
            << (mean_sdr - mean_input) << "\n";
  }

  std::ofstream sf = open_text(out_dir / "summary.txt");
  sf << summary.str();
}

}  // namespace vemove
