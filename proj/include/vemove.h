#ifndef VEMOVE_H
#define VEMOVE_H

/* C interface to the separation toolkit. A vemove_config carries one run's
 * settings (loaded from a JSON file or string, then optionally overridden);
 * the four run functions execute a full command against it, writing their
 * outputs under the configured output directory. All functions return a
 * status code; on failure, vemove_last_error() describes what went wrong for
 * the calling thread. */

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct vemove_config vemove_config;

typedef enum vemove_status {
  VEMOVE_OK = 0,
  VEMOVE_ERR_INVALID_ARGUMENT = 1,
  VEMOVE_ERR_IO = 2,
  VEMOVE_ERR_CONFIG = 3,
  VEMOVE_ERR_NUMERIC = 4,
  VEMOVE_ERR_INTERNAL = 5
} vemove_status;

/* Library version, "major.minor.patch". Static storage; do not free. */
const char* vemove_version(void);

/* Short name of a status code ("ok", "io", ...). Static storage. */
const char* vemove_status_name(vemove_status status);

/* Message of the last failure on the calling thread, or "" if none. Valid
 * until the next failing call on the same thread. */
const char* vemove_last_error(void);

/* Configuration with built-in defaults for everything. */
vemove_status vemove_config_new(vemove_config** out);

/* Configuration parsed from a JSON file / a JSON string. */
vemove_status vemove_config_load(const char* path, vemove_config** out);
vemove_status vemove_config_from_json(const char* json_text, vemove_config** out);

void vemove_config_free(vemove_config* cfg);

/* Field overrides, applied on top of whatever was parsed. */
vemove_status vemove_config_set_seed(vemove_config* cfg, uint64_t seed);
vemove_status vemove_config_set_iterations(vemove_config* cfg, int iterations);
vemove_status vemove_config_set_output_dir(vemove_config* cfg, const char* dir);

/* Render a synthetic scene: per-source images, the noisy mixture, and a
 * manifest, under the output directory. */
vemove_status vemove_run_simulate(const vemove_config* cfg);

/* Separate the configured mixture file; writes per-source image estimates and
 * an iteration diagnostics file. */
vemove_status vemove_run_separate(const vemove_config* cfg);

/* Score estimate files against reference image files; writes scores.txt. */
vemove_status vemove_run_evaluate(const vemove_config* cfg);

/* simulate + separate (tracking and static-filter variants) + evaluate, with
 * a summary of the separation gains. */
vemove_status vemove_run_experiment(const vemove_config* cfg);

#ifdef __cplusplus
}
#endif

#endif /* VEMOVE_H */
