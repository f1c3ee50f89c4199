#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include <vemove.h>

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::path("/tmp") / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::strlen(vemove_version()) > 0);
  CHECK(std::string(vemove_status_name(VEMOVE_OK)) == "ok");
  CHECK(std::string(vemove_status_name(VEMOVE_ERR_IO)) == "io");
  CHECK(std::string(vemove_status_name(VEMOVE_ERR_CONFIG)) == "config");
}

TEST_CASE("null arguments are rejected") {
  CHECK(vemove_config_new(nullptr) == VEMOVE_ERR_INVALID_ARGUMENT);
  CHECK(vemove_config_set_seed(nullptr, 1) == VEMOVE_ERR_INVALID_ARGUMENT);
  CHECK(vemove_config_set_output_dir(nullptr, "x") == VEMOVE_ERR_INVALID_ARGUMENT);
  CHECK(vemove_run_simulate(nullptr) == VEMOVE_ERR_INVALID_ARGUMENT);
  CHECK(std::strlen(vemove_last_error()) > 0);
}

TEST_CASE("config parsing and overrides") {
  vemove_config* cfg = nullptr;
  REQUIRE(vemove_config_from_json("{\"seed\": 9}", &cfg) == VEMOVE_OK);
  CHECK(vemove_config_set_seed(cfg, 17) == VEMOVE_OK);
  CHECK(vemove_config_set_iterations(cfg, 3) == VEMOVE_OK);
  CHECK(vemove_config_set_iterations(cfg, 0) == VEMOVE_ERR_INVALID_ARGUMENT);
  CHECK(vemove_config_set_output_dir(cfg, "/tmp/somewhere") == VEMOVE_OK);
  vemove_config_free(cfg);

  cfg = nullptr;
  CHECK(vemove_config_from_json("{nope", &cfg) == VEMOVE_ERR_CONFIG);
  CHECK(cfg == nullptr);
  CHECK(std::strlen(vemove_last_error()) > 0);

  CHECK(vemove_config_from_json("{\"bogus\": 1}", &cfg) == VEMOVE_ERR_CONFIG);
  CHECK(std::string(vemove_last_error()).find("root.bogus") != std::string::npos);

  CHECK(vemove_config_load("/tmp/vemove_missing.json", &cfg) == VEMOVE_ERR_IO);
}

TEST_CASE("run functions map missing inputs to io errors") {
  TempDir dir("vemove_capi_io");
  const std::string json = std::string("{\"output_dir\": \"") + dir.path.string() +
                           "\", \"separate\": {\"mixture\": \"" + dir.path.string() +
                           "/none.wav\", \"nmf_init\": \"random\"}}";
  vemove_config* cfg = nullptr;
  REQUIRE(vemove_config_from_json(json.c_str(), &cfg) == VEMOVE_OK);
  CHECK(vemove_run_separate(cfg) == VEMOVE_ERR_IO);
  CHECK(std::strlen(vemove_last_error()) > 0);
  vemove_config_free(cfg);
}

TEST_CASE("simulate then separate then evaluate runs end to end") {
  TempDir dir("vemove_capi_e2e");
  const std::string out = dir.path.string();

  // Small everything: a short scene, a small window, very few iterations.
  const std::string json = std::string("{") +
      "\"seed\": 5, \"output_dir\": \"" + out + "\"," +
      "\"stft\": {\"window\": 128}," +
      "\"vem\": {\"iterations\": 2, \"components_per_source\": 3}," +
      "\"simulate\": {\"channels\": 2, \"sources\": 2, \"duration_s\": 0.3," +
      "               \"sample_rate\": 8000, \"filter_taps\": 8, \"snr_db\": 20}," +
      "\"separate\": {\"mixture\": \"" + out + "/mixture.wav\"," +
      "               \"nmf_init\": \"semi_blind\", \"nmf_iterations\": 20," +
      "               \"references\": [\"" + out + "/image_1.wav\", \"" + out +
      "/image_2.wav\"]}," +
      "\"evaluate\": {\"estimates\": [\"" + out + "/estimate_1.wav\", \"" + out +
      "/estimate_2.wav\"]," +
      "              \"references\": [\"" + out + "/image_1.wav\", \"" + out +
      "/image_2.wav\"], \"max_delay\": 8}}";

  vemove_config* cfg = nullptr;
  REQUIRE(vemove_config_from_json(json.c_str(), &cfg) == VEMOVE_OK);

  REQUIRE(vemove_run_simulate(cfg) == VEMOVE_OK);
  CHECK(fs::exists(dir.path / "mixture.wav"));
  CHECK(fs::exists(dir.path / "image_1.wav"));
  CHECK(fs::exists(dir.path / "image_2.wav"));
  CHECK(fs::exists(dir.path / "manifest.json"));

  REQUIRE(vemove_run_separate(cfg) == VEMOVE_OK);
  CHECK(fs::exists(dir.path / "estimate_1.wav"));
  CHECK(fs::exists(dir.path / "estimate_2.wav"));
  CHECK(fs::exists(dir.path / "diagnostics.txt"));

  // diagnostics carries one line per iteration
  std::ifstream diag(dir.path / "diagnostics.txt");
  int lines = 0;
  std::string line;
  while (std::getline(diag, line)) {
    if (!line.empty() && line[0] != '#') ++lines;
  }
  CHECK(lines == 2);

  REQUIRE(vemove_run_evaluate(cfg) == VEMOVE_OK);
  CHECK(fs::exists(dir.path / "scores.txt"));
  std::ifstream scores(dir.path / "scores.txt");
  int source_lines = 0;
  bool mean_line = false;
  while (std::getline(scores, line)) {
    if (line.rfind("source_", 0) == 0) ++source_lines;
    if (line.rfind("mean ", 0) == 0) mean_line = true;
  }
  CHECK(source_lines == 2);
  CHECK(mean_line);

  vemove_config_free(cfg);
}
