#include "config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "errors.hpp"

namespace vemove {
namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& path, const std::string& why) {
  throw ConfigError("config: " + path + ": " + why);
}

void check_keys(const json& j, const std::string& path, const std::set<std::string>& allowed) {
  if (!j.is_object()) bad(path, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) {
      std::ostringstream known;
      for (const auto& k : allowed) known << (known.tellp() > 0 ? ", " : "") << k;
      bad(path + "." + it.key(), "unknown key; known keys here: " + known.str());
    }
  }
}

template <typename T>
T get_number(const json& j, const std::string& path, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number()) bad(path + "." + key, "expected a number");
  return v.get<T>();
}

bool get_bool(const json& j, const std::string& path, const char* key, bool fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_boolean()) bad(path + "." + key, "expected true or false");
  return j.at(key).get<bool>();
}

std::string get_string(const json& j, const std::string& path, const char* key,
                       const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_string()) bad(path + "." + key, "expected a string");
  return j.at(key).get<std::string>();
}

std::vector<std::string> get_string_list(const json& j, const std::string& path, const char* key) {
  std::vector<std::string> out;
  if (!j.contains(key)) return out;
  if (!j.at(key).is_array()) bad(path + "." + key, "expected an array of strings");
  for (const auto& v : j.at(key)) {
    if (!v.is_string()) bad(path + "." + key, "expected an array of strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

void require_positive(int value, const std::string& where) {
  if (value < 1) bad(where, "must be >= 1 (got " + std::to_string(value) + ")");
}

void require_positive(double value, const std::string& where) {
  if (!(value > 0)) bad(where, "must be > 0 (got " + std::to_string(value) + ")");
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: not valid JSON: ") + e.what());
  }

  RunConfig cfg;
  check_keys(root, "root",
             {"seed", "output_dir", "threads", "stft", "vem", "simulate", "separate", "evaluate"});
  if (root.contains("seed")) {
    if (!root.at("seed").is_number_unsigned()) bad("root.seed", "expected a nonnegative integer");
    cfg.seed = root.at("seed").get<uint64_t>();
  }
  cfg.output_dir = get_string(root, "root", "output_dir", cfg.output_dir);
  cfg.threads = get_number<int>(root, "root", "threads", cfg.threads);
  if (cfg.threads < 0) bad("root.threads", "must be >= 0 (0 picks the hardware count)");

  if (root.contains("stft")) {
    const json& s = root.at("stft");
    check_keys(s, "stft", {"window"});
    cfg.stft.window = get_number<int>(s, "stft", "window", cfg.stft.window);
    if (cfg.stft.window < 4 || cfg.stft.window % 2 != 0) {
      bad("stft.window", "must be even and >= 4 (got " + std::to_string(cfg.stft.window) + ")");
    }
  }

  if (root.contains("vem")) {
    const json& v = root.at("vem");
    check_keys(v, "vem",
               {"iterations", "components_per_source", "jitter", "init_noise_scale",
                "init_posterior_cov_scale", "init_evolution_cov_scale", "init_a_value",
                "evolution_cov", "pinned_evolution_value"});
    cfg.vem.iterations = get_number<int>(v, "vem", "iterations", cfg.vem.iterations);
    require_positive(cfg.vem.iterations, "vem.iterations");
    cfg.vem.components_per_source =
        get_number<int>(v, "vem", "components_per_source", cfg.vem.components_per_source);
    require_positive(cfg.vem.components_per_source, "vem.components_per_source");
    cfg.vem.jitter = get_number<double>(v, "vem", "jitter", cfg.vem.jitter);
    require_positive(cfg.vem.jitter, "vem.jitter");
    cfg.vem.init_noise_scale =
        get_number<double>(v, "vem", "init_noise_scale", cfg.vem.init_noise_scale);
    require_positive(cfg.vem.init_noise_scale, "vem.init_noise_scale");
    cfg.vem.init_posterior_cov_scale =
        get_number<double>(v, "vem", "init_posterior_cov_scale", cfg.vem.init_posterior_cov_scale);
    require_positive(cfg.vem.init_posterior_cov_scale, "vem.init_posterior_cov_scale");
    cfg.vem.init_evolution_cov_scale =
        get_number<double>(v, "vem", "init_evolution_cov_scale", cfg.vem.init_evolution_cov_scale);
    require_positive(cfg.vem.init_evolution_cov_scale, "vem.init_evolution_cov_scale");
    cfg.vem.init_a_value = get_number<double>(v, "vem", "init_a_value", cfg.vem.init_a_value);
    const std::string mode = get_string(v, "vem", "evolution_cov", "learned");
    if (mode == "learned") {
      cfg.vem.pin_evolution_cov = false;
    } else if (mode == "pinned") {
      cfg.vem.pin_evolution_cov = true;
    } else {
      bad("vem.evolution_cov", "must be \"learned\" or \"pinned\" (got \"" + mode + "\")");
    }
    cfg.vem.pinned_evolution_value =
        get_number<double>(v, "vem", "pinned_evolution_value", cfg.vem.pinned_evolution_value);
    require_positive(cfg.vem.pinned_evolution_value, "vem.pinned_evolution_value");
  }

  if (root.contains("simulate")) {
    const json& s = root.at("simulate");
    check_keys(s, "simulate",
               {"channels", "sources", "duration_s", "sample_rate", "filter_taps", "snr_db",
                "source_kinds"});
    cfg.simulate.channels = get_number<int>(s, "simulate", "channels", cfg.simulate.channels);
    require_positive(cfg.simulate.channels, "simulate.channels");
    cfg.simulate.sources = get_number<int>(s, "simulate", "sources", cfg.simulate.sources);
    require_positive(cfg.simulate.sources, "simulate.sources");
    cfg.simulate.duration_s = get_number<double>(s, "simulate", "duration_s", cfg.simulate.duration_s);
    require_positive(cfg.simulate.duration_s, "simulate.duration_s");
    cfg.simulate.sample_rate = get_number<int>(s, "simulate", "sample_rate", cfg.simulate.sample_rate);
    if (cfg.simulate.sample_rate < 1000) bad("simulate.sample_rate", "must be >= 1000");
    cfg.simulate.filter_taps = get_number<int>(s, "simulate", "filter_taps", cfg.simulate.filter_taps);
    require_positive(cfg.simulate.filter_taps, "simulate.filter_taps");
    cfg.simulate.snr_db = get_number<double>(s, "simulate", "snr_db", cfg.simulate.snr_db);
    cfg.simulate.source_kinds = get_string_list(s, "simulate", "source_kinds");
    for (const auto& kind : cfg.simulate.source_kinds) {
      if (kind != "harmonic" && kind != "noise_band") {
        bad("simulate.source_kinds", "entries must be \"harmonic\" or \"noise_band\" (got \"" +
                                         kind + "\")");
      }
    }
    if (!cfg.simulate.source_kinds.empty() &&
        static_cast<int>(cfg.simulate.source_kinds.size()) != cfg.simulate.sources) {
      bad("simulate.source_kinds", "must list one kind per source or be omitted");
    }
  }

  if (root.contains("separate")) {
    const json& s = root.at("separate");
    check_keys(s, "separate",
               {"mixture", "nmf_init", "corruption_db", "references", "nmf_iterations", "sources"});
    cfg.separate.mixture = get_string(s, "separate", "mixture", cfg.separate.mixture);
    cfg.separate.nmf_init = get_string(s, "separate", "nmf_init", cfg.separate.nmf_init);
    if (cfg.separate.nmf_init != "semi_blind" && cfg.separate.nmf_init != "random") {
      bad("separate.nmf_init",
          "must be \"semi_blind\" or \"random\" (got \"" + cfg.separate.nmf_init + "\")");
    }
    cfg.separate.corruption_db =
        get_number<double>(s, "separate", "corruption_db", cfg.separate.corruption_db);
    cfg.separate.references = get_string_list(s, "separate", "references");
    cfg.separate.nmf_iterations =
        get_number<int>(s, "separate", "nmf_iterations", cfg.separate.nmf_iterations);
    require_positive(cfg.separate.nmf_iterations, "separate.nmf_iterations");
    cfg.separate.sources = get_number<int>(s, "separate", "sources", cfg.separate.sources);
    require_positive(cfg.separate.sources, "separate.sources");
    if (cfg.separate.nmf_init == "semi_blind" && cfg.separate.references.empty()) {
      bad("separate.references", "semi_blind init needs the clean image files listed here");
    }
  }

  if (root.contains("evaluate")) {
    const json& e = root.at("evaluate");
    check_keys(e, "evaluate", {"estimates", "references", "max_delay"});
    cfg.evaluate.estimates = get_string_list(e, "evaluate", "estimates");
    cfg.evaluate.references = get_string_list(e, "evaluate", "references");
    cfg.evaluate.max_delay = get_number<int>(e, "evaluate", "max_delay", cfg.evaluate.max_delay);
    require_positive(cfg.evaluate.max_delay, "evaluate.max_delay");
  }

  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("config: cannot open " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_config(buf.str());
}

}  // namespace vemove
