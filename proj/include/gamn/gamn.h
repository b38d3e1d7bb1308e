/* Licensed under the Apache License, Version 2.0 (the "License"); you
 * may not use this file except in compliance with the License.  You
 * may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or
 * implied.  See the License for the specific language governing
 * permissions and limitations under the License.
 */

/* C interface of the gamn shared library.
 *
 * Every function returns a gamn_status. On failure the message is kept
 * per thread and read with gamn_last_error(). Handles are opaque and
 * released with the matching *_free function; passing NULL to a free
 * function is a no-op.
 */

#ifndef GAMN_GAMN_H
#define GAMN_GAMN_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(GAMN_BUILDING_LIBRARY)
#    define GAMN_API __declspec(dllexport)
#  else
#    define GAMN_API __declspec(dllimport)
#  endif
#else
#  define GAMN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gamn_status {
    GAMN_OK = 0,
    GAMN_ERR_CONFIG = 1,    /* bad or missing configuration key */
    GAMN_ERR_RUNTIME = 2,   /* a run failed; message names seed and epoch */
    GAMN_ERR_TOLERANCE = 3, /* grad-check above tolerance */
    GAMN_ERR_IO = 4,
    GAMN_ERR_ARGUMENT = 5,  /* NULL handle, index out of range, ... */
    GAMN_ERR_INTERNAL = 6
} gamn_status;

typedef struct gamn_config gamn_config;
typedef struct gamn_trace gamn_trace;

GAMN_API const char* gamn_version(void);

/* Message of the last failing call on this thread; "" if none. */
GAMN_API const char* gamn_last_error(void);

/* Name of the offending key for the last GAMN_ERR_CONFIG; "" otherwise. */
GAMN_API const char* gamn_last_error_key(void);

/* ---- configuration ---------------------------------------------------- */

GAMN_API gamn_status gamn_config_load(const char* path, gamn_config** out);
GAMN_API gamn_status gamn_config_parse(const char* text, gamn_config** out);
GAMN_API void gamn_config_free(gamn_config* cfg);

/* Overrides one dotted key and re-validates; the config is unchanged on
 * failure. */
GAMN_API gamn_status gamn_config_set(gamn_config* cfg, const char* key, const char* value);

/* Resolved value of a key, valid until the next call on this thread. */
GAMN_API gamn_status gamn_config_get(const gamn_config* cfg, const char* key, const char** value);

/* Resolved config text. The string stays valid until the next call on this
 * thread. */
GAMN_API gamn_status gamn_config_dump(const gamn_config* cfg, const char** text);

/* ---- commands ---------------------------------------------------------- */

/* jobs == 0 uses the available hardware parallelism. Output files go to
 * out_dir, or output.dir from the config when out_dir is NULL. */
GAMN_API gamn_status gamn_cmd_run(const gamn_config* cfg, const char* out_dir, unsigned jobs);
GAMN_API gamn_status gamn_cmd_sweep_power(const gamn_config* cfg, const double* powers_dbm,
                                          size_t count, const char* out_dir, unsigned jobs);
GAMN_API gamn_status gamn_cmd_sweep_n(const gamn_config* cfg, const size_t* ns, size_t count,
                                      const char* out_dir, unsigned jobs);

/* Writes the four gradient names and errors as "name value\n" lines to
 * *report (valid until the next call on this thread). Returns
 * GAMN_ERR_TOLERANCE when any error reaches tolerance. */
GAMN_API gamn_status gamn_cmd_grad_check(const gamn_config* cfg, double tolerance,
                                         const char** report);

/* ---- single runs ------------------------------------------------------- */

/* Realization `index` of the config's master seed with the given variant
 * name ("GAMN", "GAMNreal", "GAMN_no_euler", "PGA"). */
GAMN_API gamn_status gamn_run(const gamn_config* cfg, const char* variant, uint64_t index,
                              gamn_trace** out);
GAMN_API void gamn_trace_free(gamn_trace* trace);

GAMN_API size_t gamn_trace_epochs(const gamn_trace* trace);
GAMN_API gamn_status gamn_trace_wsr(const gamn_trace* trace, size_t epoch, double* wsr);
GAMN_API double gamn_trace_initial_wsr(const gamn_trace* trace);
GAMN_API uint64_t gamn_trace_seed(const gamn_trace* trace);

/* Interleaved (re, im) copies of the final iterates; *count receives the
 * number of complex entries. Pass NULL buffers to query the count. */
GAMN_API gamn_status gamn_trace_theta(const gamn_trace* trace, double* re_im, size_t* count);
GAMN_API gamn_status gamn_trace_precoder(const gamn_trace* trace, double* re_im, size_t* count);

GAMN_API gamn_status gamn_trace_save_checkpoint(const gamn_trace* trace, const char* path);

/* Channel realization `index` written as a plain-text dump. */
GAMN_API gamn_status gamn_channel_dump(const gamn_config* cfg, uint64_t index, const char* path);

#ifdef __cplusplus
}
#endif

#endif /* GAMN_GAMN_H */
