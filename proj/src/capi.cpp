#include "vemove.h"

#include <new>
#include <stdexcept>
#include <string>

#include "config.hpp"
#include "errors.hpp"
#include "numerics.hpp"
#include "pipeline.hpp"

struct vemove_config {
  vemove::RunConfig run;
};

namespace {

thread_local std::string g_last_error;

vemove_status fail(vemove_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <typename Fn>
vemove_status guarded(Fn&& fn) {
  try {
    fn();
    return VEMOVE_OK;
  } catch (const vemove::ConfigError& e) {
    return fail(VEMOVE_ERR_CONFIG, e.what());
  } catch (const vemove::IoError& e) {
    return fail(VEMOVE_ERR_IO, e.what());
  } catch (const vemove::ConditioningError& e) {
    return fail(VEMOVE_ERR_NUMERIC, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(VEMOVE_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(VEMOVE_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(VEMOVE_ERR_INTERNAL, e.what());
  }
}

vemove_status run_command(const vemove_config* cfg, void (*command)(const vemove::RunConfig&)) {
  if (!cfg) return fail(VEMOVE_ERR_INVALID_ARGUMENT, "config is null");
  return guarded([&] { command(cfg->run); });
}

}  // namespace

extern "C" {

const char* vemove_version(void) { return "1.0.0"; }

const char* vemove_status_name(vemove_status status) {
  switch (status) {
    case VEMOVE_OK: return "ok";
    case VEMOVE_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case VEMOVE_ERR_IO: return "io";
    case VEMOVE_ERR_CONFIG: return "config";
    case VEMOVE_ERR_NUMERIC: return "numeric";
    case VEMOVE_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* vemove_last_error(void) { return g_last_error.c_str(); }

vemove_status vemove_config_new(vemove_config** out) {
  if (!out) return fail(VEMOVE_ERR_INVALID_ARGUMENT, "out pointer is null");
  *out = nullptr;
  return guarded([&] { *out = new vemove_config(); });
}

vemove_status vemove_config_load(const char* path, vemove_config** out) {
  if (!path || !out) return fail(VEMOVE_ERR_INVALID_ARGUMENT, "path or out pointer is null");
  *out = nullptr;
  return guarded([&] { *out = new vemove_config{vemove::load_config(path)}; });
}

vemove_status vemove_config_from_json(const char* json_text, vemove_config** out) {
  if (!json_text || !out) return fail(VEMOVE_ERR_INVALID_ARGUMENT, "text or out pointer is null");
  *out = nullptr;
  return guarded([&] { *out = new vemove_config{vemove::parse_config(json_text)}; });
}

void vemove_config_free(vemove_config* cfg) { delete cfg; }

vemove_status vemove_config_set_seed(vemove_config* cfg, uint64_t seed) {
  if (!cfg) return fail(VEMOVE_ERR_INVALID_ARGUMENT, "config is null");
  cfg->run.seed = seed;
  return VEMOVE_OK;
}

vemove_status vemove_config_set_iterations(vemove_config* cfg, int iterations) {
  if (!cfg) return fail(VEMOVE_ERR_INVALID_ARGUMENT, "config is null");
  if (iterations < 1) return fail(VEMOVE_ERR_INVALID_ARGUMENT, "iterations must be >= 1");
  cfg->run.vem.iterations = iterations;
  return VEMOVE_OK;
}

vemove_status vemove_config_set_output_dir(vemove_config* cfg, const char* dir) {
  if (!cfg || !dir) return fail(VEMOVE_ERR_INVALID_ARGUMENT, "config or dir is null");
  cfg->run.output_dir = dir;
  return VEMOVE_OK;
}

vemove_status vemove_run_simulate(const vemove_config* cfg) {
  return run_command(cfg, vemove::cmd_simulate);
}

vemove_status vemove_run_separate(const vemove_config* cfg) {
  return run_command(cfg, vemove::cmd_separate);
}

vemove_status vemove_run_evaluate(const vemove_config* cfg) {
  return run_command(cfg, vemove::cmd_evaluate);
}

vemove_status vemove_run_experiment(const vemove_config* cfg) {
  return run_command(cfg, vemove::cmd_experiment);
}

}  // extern "C"
