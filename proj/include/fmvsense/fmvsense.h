#ifndef FMVSENSE_H
#define FMVSENSE_H

/*
 * C interface to the fmvsense engine.
 *
 * Objects are opaque handles owned by the caller and released with the
 * matching *_free function. Every fallible call returns an fmv_status; on
 * failure a description is available from fmv_last_error() on the same
 * thread until the next failing call. Strings handed out through char**
 * parameters are NUL-terminated, heap allocated, and released with
 * fmv_string_free(). File outputs are written atomically.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(FMV_BUILDING_LIBRARY)
#    define FMV_API __declspec(dllexport)
#  else
#    define FMV_API __declspec(dllimport)
#  endif
#else
#  define FMV_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fmv_status {
  FMV_OK = 0,
  FMV_ERR_VALIDATION = 1, /* malformed input or violated precondition */
  FMV_ERR_IO = 2,         /* file could not be read or written */
  FMV_ERR_ARGUMENT = 3,   /* null handle or pointer */
  FMV_ERR_STATE = 4,      /* call not allowed in the handle's current state */
  FMV_ERR_INTERNAL = 5
} fmv_status;

typedef struct fmv_config fmv_config;
typedef struct fmv_engine fmv_engine;

typedef struct fmv_stats {
  uint64_t frames_processed;
  uint64_t frames_skipped;
  uint64_t cataloging_invocations;
  uint64_t detections_in;
  uint64_t detections_after_gates;
  uint64_t detections_after_nms;
  uint64_t tracks_born;
  uint64_t tracks_died;
  uint64_t events_emitted;
  uint64_t events_ungeolocated;
} fmv_stats;

FMV_API const char* fmv_version(void);
FMV_API const char* fmv_last_error(void);
FMV_API void fmv_string_free(char* s);

/* Configuration */
FMV_API fmv_status fmv_config_default(fmv_config** out);
FMV_API fmv_status fmv_config_parse(const char* json_text, fmv_config** out);
FMV_API fmv_status fmv_config_load(const char* path, fmv_config** out);
FMV_API fmv_status fmv_config_to_json(const fmv_config* cfg, char** out);
FMV_API void fmv_config_free(fmv_config* cfg);

/* Engine: push frames, then finish, then read results. */
FMV_API fmv_status fmv_engine_create(const fmv_config* cfg, fmv_engine** out);
FMV_API void fmv_engine_free(fmv_engine* engine);
/* One stream line (a JSON frame record). */
FMV_API fmv_status fmv_engine_push_frame(fmv_engine* engine, const char* json_line);
/* Streams every line of a file through the engine. */
FMV_API fmv_status fmv_engine_push_file(fmv_engine* engine, const char* stream_path);
FMV_API fmv_status fmv_engine_finish(fmv_engine* engine);
FMV_API fmv_status fmv_engine_stats(const fmv_engine* engine, fmv_stats* out);
/* The following require fmv_engine_finish() first. */
FMV_API fmv_status fmv_engine_event_count(const fmv_engine* engine, size_t* out);
FMV_API fmv_status fmv_engine_events_jsonl(const fmv_engine* engine, char** out);
FMV_API fmv_status fmv_engine_cop_geojson(const fmv_engine* engine, char** out);
/* Either path may be NULL to skip that output. */
FMV_API fmv_status fmv_engine_write_outputs(const fmv_engine* engine, const char* events_path, const char* cop_path);

/* Tile plan as JSON. context_label may be NULL for every actionable label. */
FMV_API fmv_status fmv_plan_json(const fmv_config* cfg, int width, int height, const char* context_label,
                                 char** out);

/*
 * Simulates a scenario file into a stream file and a ground-truth file.
 * noise_path may be NULL (noise-free). seed_override, when non-NULL, replaces
 * the seed of the noise file (or enables seeded noise with the file's
 * parameters).
 */
FMV_API fmv_status fmv_simulate_files(const char* scenario_path, const char* noise_path,
                                      const uint64_t* seed_override, const char* stream_out,
                                      const char* truth_out);

/* Scores an event log against a ground-truth file; the report is JSON. */
FMV_API fmv_status fmv_evaluate_files(const char* pred_path, const char* truth_path, uint64_t tol_frames,
                                      char** report_json);

#ifdef __cplusplus
}
#endif

#endif /* FMVSENSE_H */
