// Command-line front end. Builds a config from --config plus overrides and
// dispatches to the library through its C interface.

#include <cstdint>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include <vemove.h>

namespace {

struct Options {
  std::string config_path;
  uint64_t seed = 0;
  int iterations = 0;
  std::string output_dir;
  bool has_seed = false;
  bool has_iterations = false;
  bool has_output_dir = false;
};

void add_common_flags(CLI::App* cmd, Options& opt) {
  cmd->add_option("--config", opt.config_path, "JSON configuration file");
  cmd->add_option("--seed", opt.seed, "Root random seed")->each([&](const std::string&) {
    opt.has_seed = true;
  });
  cmd->add_option("--iterations", opt.iterations, "Inference iterations")
      ->check(CLI::PositiveNumber)
      ->each([&](const std::string&) { opt.has_iterations = true; });
  cmd->add_option("--output-dir", opt.output_dir, "Directory for output files")
      ->each([&](const std::string&) { opt.has_output_dir = true; });
}

int fail(const char* stage, vemove_status status) {
  std::fprintf(stderr, "error (%s, %s): %s\n", stage, vemove_status_name(status),
               vemove_last_error());
  return 1;
}

int run(vemove_status (*command)(const vemove_config*), const Options& opt) {
  vemove_config* cfg = nullptr;
  vemove_status status = opt.config_path.empty()
                             ? vemove_config_new(&cfg)
                             : vemove_config_load(opt.config_path.c_str(), &cfg);
  if (status != VEMOVE_OK) return fail("config", status);

  if (opt.has_seed) status = vemove_config_set_seed(cfg, opt.seed);
  if (status == VEMOVE_OK && opt.has_iterations) {
    status = vemove_config_set_iterations(cfg, opt.iterations);
  }
  if (status == VEMOVE_OK && opt.has_output_dir) {
    status = vemove_config_set_output_dir(cfg, opt.output_dir.c_str());
  }
  if (status != VEMOVE_OK) {
    vemove_config_free(cfg);
    return fail("config", status);
  }

  status = command(cfg);
  vemove_config_free(cfg);
  if (status != VEMOVE_OK) return fail("run", status);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Separation of moving sound sources from a multichannel recording"};
  app.set_version_flag("--version", vemove_version());
  app.require_subcommand(1);

  struct Command {
    const char* name;
    const char* description;
    vemove_status (*fn)(const vemove_config*);
  };
  const Command commands[] = {
      {"simulate", "Render a synthetic moving-source scene", vemove_run_simulate},
      {"separate", "Separate a mixture file into source images", vemove_run_separate},
      {"evaluate", "Score estimates against reference images", vemove_run_evaluate},
      {"experiment", "Full simulate / separate / evaluate round trip", vemove_run_experiment},
  };

  Options opts[4];
  CLI::App* sub[4];
  for (int i = 0; i < 4; ++i) {
    sub[i] = app.add_subcommand(commands[i].name, commands[i].description);
    add_common_flags(sub[i], opts[i]);
  }

  CLI11_PARSE(app, argc, argv);

  for (int i = 0; i < 4; ++i) {
    if (sub[i]->parsed()) return run(commands[i].fn, opts[i]);
  }
  return 0;
}
