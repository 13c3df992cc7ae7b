/* C interface to the mass channel similarity graph engine.
 *
 * All objects are opaque handles owned by the caller and released with the
 * matching *_free function. Functions return an mcsg_status; on failure the
 * message of the last error on the calling thread is available through
 * mcsg_last_error(). Strings and buffers handed out by the library are
 * released with mcsg_string_free / mcsg_response_free.
 */
#ifndef MCSG_H
#define MCSG_H

#include <stddef.h>
#include <stdint.h>

#if defined(MCSG_BUILDING_LIBRARY)
#define MCSG_API __attribute__((visibility("default")))
#else
#define MCSG_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mcsg_status {
  MCSG_OK = 0,
  MCSG_NOOP = 1, /* request valid but nothing changed (undo on empty stack, ...) */
  MCSG_ERR_INVALID_ARGUMENT = -1,
  MCSG_ERR_FORMAT = -2,
  MCSG_ERR_VALIDATION = -3,
  MCSG_ERR_NOT_FOUND = -4,
  MCSG_ERR_INSUFFICIENT_DATA = -5,
  MCSG_ERR_EMPTY_REGION = -6,
  MCSG_ERR_INTEGRITY = -7,
  MCSG_ERR_IO = -8,
  MCSG_ERR_INTERNAL = -99
} mcsg_status;

typedef enum mcsg_similarity { MCSG_PEARSON = 0, MCSG_COSINE = 1 } mcsg_similarity;

typedef struct mcsg_dataset mcsg_dataset;
typedef struct mcsg_session mcsg_session;

typedef struct mcsg_build_config {
  mcsg_similarity similarity;
  double tau;
  uint64_t seed;
  int max_depth;
  int min_split_size;
  double hybrid_weight;
} mcsg_build_config;

typedef struct mcsg_response {
  int status;               /* HTTP status code */
  char* content_type;       /* NUL-terminated */
  unsigned char* body;
  size_t body_size;
} mcsg_response;

MCSG_API const char* mcsg_last_error(void);
MCSG_API const char* mcsg_status_name(mcsg_status status);
MCSG_API void mcsg_string_free(char* s);

/* Datasets */
MCSG_API mcsg_status mcsg_dataset_load(const char* path, mcsg_dataset** out);
/* Planted-pattern generator (3 patterns x 15 channels + 5 background
 * channels on a 32x32 grid); noise is the Gaussian noise level. */
MCSG_API mcsg_status mcsg_dataset_synthetic(double noise, uint64_t seed, mcsg_dataset** out);
/* sidecar != 0 writes intensities to a binary file next to `path`. */
MCSG_API mcsg_status mcsg_dataset_save(const mcsg_dataset* ds, const char* path, int sidecar);
MCSG_API size_t mcsg_dataset_channel_count(const mcsg_dataset* ds);
MCSG_API void mcsg_dataset_free(mcsg_dataset* ds);

/* Sessions */
MCSG_API void mcsg_build_config_default(mcsg_build_config* config);
/* Builds the graph from the dataset. The session keeps its own reference to
 * the dataset, so the dataset handle may be freed afterwards. */
MCSG_API mcsg_status mcsg_session_create(const mcsg_dataset* ds, const mcsg_build_config* config,
                                         mcsg_session** out);
/* Starts from an exported graph document instead of building one. */
MCSG_API mcsg_status mcsg_session_create_imported(const mcsg_dataset* ds, const char* json,
                                                  mcsg_session** out);
MCSG_API void mcsg_session_free(mcsg_session* s);

MCSG_API mcsg_status mcsg_session_export(mcsg_session* s, char** out_json);
MCSG_API mcsg_status mcsg_session_import(mcsg_session* s, const char* json);
/* Edit command document, e.g. {"kind":"merge","targets":["community/0","community/1"]}.
 * out_result (optional) receives the JSON outcome. Returns MCSG_NOOP when
 * the edit changed nothing. */
MCSG_API mcsg_status mcsg_session_edit(mcsg_session* s, const char* command_json, char** out_result);
MCSG_API mcsg_status mcsg_session_undo(mcsg_session* s);
MCSG_API mcsg_status mcsg_session_redo(mcsg_session* s);
MCSG_API mcsg_status mcsg_session_qgp_csv(mcsg_session* s, char** out_csv);

/* Routes one HTTP request through the service endpoints. query may be NULL;
 * body may be NULL when body_size is 0. The response is filled even for
 * error statuses; the return value reports transport-level failure only. */
MCSG_API mcsg_status mcsg_session_handle(mcsg_session* s, const char* method, const char* path,
                                         const char* query, const char* body, size_t body_size,
                                         mcsg_response* out);
MCSG_API void mcsg_response_free(mcsg_response* r);

#ifdef __cplusplus
}
#endif

#endif /* MCSG_H */
