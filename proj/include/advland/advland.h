/*
 * advland: random-network adversarial landscape toolkit, C interface.
 *
 * All functions return an advland_status. On failure a human-readable message
 * is available from advland_last_error() until the next call on the same
 * thread. Objects are opaque and owned by the caller once created; release them
 * with the matching *_free function. Strings returned through char** are
 * allocated by the library and released with advland_string_free().
 */
#ifndef ADVLAND_H
#define ADVLAND_H

#include <stddef.h>
#include <stdint.h>

#if defined(ADVLAND_BUILDING_LIBRARY)
#define ADVLAND_API __attribute__((visibility("default")))
#else
#define ADVLAND_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum advland_status {
  ADVLAND_OK = 0,
  ADVLAND_ERR_INVALID_ARGUMENT = 1,
  ADVLAND_ERR_INVALID_DIMS = 2,
  ADVLAND_ERR_DIM_MISMATCH = 3,
  ADVLAND_ERR_NOT_SMOOTH = 4,
  ADVLAND_ERR_UNSUPPORTED = 5,
  ADVLAND_ERR_UNSUPPORTED_POWER = 6,
  ADVLAND_ERR_ZERO_GRADIENT = 7,
  ADVLAND_ERR_DOMAIN = 8,
  ADVLAND_ERR_PRECONDITION = 9,
  ADVLAND_ERR_UNKNOWN_BOUND = 10,
  ADVLAND_ERR_INVALID_TRIALS = 11,
  ADVLAND_ERR_INVALID_CONFIG = 12,
  ADVLAND_ERR_IO = 13,
  ADVLAND_ERR_PARSE = 14,
  ADVLAND_ERR_INTERNAL = 15
} advland_status;

typedef enum advland_activation {
  ADVLAND_ACTIVATION_RELU = 0,
  ADVLAND_ACTIVATION_TANH = 1
} advland_activation;

typedef enum advland_quantity {
  ADVLAND_QUANTITY_VALUE_ABS = 0,
  ADVLAND_QUANTITY_GRAD_NORM = 1,
  ADVLAND_QUANTITY_HESSIAN_OPNORM = 2,
  ADVLAND_QUANTITY_GRAD_DEVIATION_SUP = 3,
  ADVLAND_QUANTITY_FLIP_FRACTION = 4
} advland_quantity;

typedef struct advland_network advland_network;
typedef struct advland_sweep_config advland_sweep_config;

typedef struct advland_attack_outcome {
  double eta;
  double perturbation_norm;
  double value_before;
  double value_after;
  int flipped;
} advland_attack_outcome;

typedef struct advland_landscape_request {
  advland_quantity quantity;
  advland_activation activation;
  uint64_t d;
  uint64_t k;
  uint64_t trials;
  uint64_t seed;
  double radius;
  uint64_t iterations;
  uint64_t num_dirs;
  uint64_t num_radii;
} advland_landscape_request;

/* --- diagnostics ------------------------------------------------------- */

ADVLAND_API const char* advland_last_error(void);
ADVLAND_API const char* advland_status_string(advland_status status);
ADVLAND_API const char* advland_version(void);
ADVLAND_API void advland_string_free(char* s);

ADVLAND_API advland_status advland_activation_from_name(const char* name,
                                                        advland_activation* out);
ADVLAND_API advland_status advland_quantity_from_name(const char* name, advland_quantity* out);

/* --- networks ---------------------------------------------------------- */

ADVLAND_API advland_status advland_network_sample(uint32_t depth, uint64_t d, uint64_t k,
                                                  advland_activation activation, uint64_t seed,
                                                  advland_network** out);
ADVLAND_API void advland_network_free(advland_network* net);
ADVLAND_API advland_status advland_network_dims(const advland_network* net, uint32_t* depth,
                                                uint64_t* d, uint64_t* k);
ADVLAND_API advland_status advland_network_save(const advland_network* net, const char* path);
ADVLAND_API advland_status advland_network_load(const char* path, advland_network** out);

/* Writes d coordinates into out. */
ADVLAND_API advland_status advland_sample_input(uint64_t d, uint64_t seed, double* out);
ADVLAND_API advland_status advland_forward(const advland_network* net, const double* x,
                                           size_t n, double* value);
/* Writes n gradient coordinates into grad. */
ADVLAND_API advland_status advland_gradient(const advland_network* net, const double* x,
                                            size_t n, double* grad);

/* --- attacks ----------------------------------------------------------- */

ADVLAND_API advland_status advland_single_step_attack(const advland_network* net,
                                                      const double* x, size_t n,
                                                      double eta_magnitude,
                                                      advland_attack_outcome* out);
/* *found is 0 when no flip exists within eta_max; *eta is signed. */
ADVLAND_API advland_status advland_smallest_flip_eta(const advland_network* net,
                                                     const double* x, size_t n, double eta_max,
                                                     uint64_t grid, int* found, double* eta);
ADVLAND_API advland_status advland_universal_flip_eta(const advland_network* net,
                                                      const double* x, size_t n, double eta_max,
                                                      uint64_t grid, int* found, double* eta);
/* Full outcomes for the two searches. When no flip exists within eta_max the
 * outcome has eta = 0 and flipped = 0. For the universal search
 * perturbation_norm is |eta| times the norm of the universal direction. */
ADVLAND_API advland_status advland_smallest_flip_attack(const advland_network* net,
                                                        const double* x, size_t n,
                                                        double eta_max, uint64_t grid,
                                                        advland_attack_outcome* out);
ADVLAND_API advland_status advland_universal_flip_attack(const advland_network* net,
                                                         const double* x, size_t n,
                                                         double eta_max, uint64_t grid,
                                                         advland_attack_outcome* out);
/* JSON document {steps: [...], flipped, zero_gradient}. */
ADVLAND_API advland_status advland_multi_step_attack_json(const advland_network* net,
                                                          const double* x, size_t n,
                                                          double step_size, uint64_t max_steps,
                                                          char** json);
ADVLAND_API advland_status advland_attack_outcome_json(const advland_attack_outcome* outcome,
                                                       char** json);

/* --- landscape --------------------------------------------------------- */

ADVLAND_API void advland_landscape_request_init(advland_landscape_request* request);
ADVLAND_API advland_status advland_estimate_landscape_json(const advland_landscape_request* req,
                                                           char** json);

/* --- sweeps ------------------------------------------------------------ */

ADVLAND_API advland_status advland_sweep_config_new(advland_sweep_config** out);
ADVLAND_API advland_status advland_sweep_config_load(const char* path,
                                                     advland_sweep_config** out);
/* Same syntax as a config-file line: key = value. */
ADVLAND_API advland_status advland_sweep_config_set(advland_sweep_config* config,
                                                    const char* key, const char* value);
/* Copies output_path into buf (NUL-terminated, truncated to len). */
ADVLAND_API advland_status advland_sweep_config_output_path(const advland_sweep_config* config,
                                                            char* buf, size_t len);
ADVLAND_API void advland_sweep_config_free(advland_sweep_config* config);
/* Runs the sweep and returns the CSV text. */
ADVLAND_API advland_status advland_run_sweep_csv(const advland_sweep_config* config, char** csv);

/* --- bounds ------------------------------------------------------------ */

/* Runs the bound suite and returns JSON lines. Pass n_bounds = 0 for the
 * default suite. *all_pass is set to 1 when every report passes. */
ADVLAND_API advland_status advland_run_bound_suite(const char* const* bounds, size_t n_bounds,
                                                   const double* gammas, size_t n_gammas,
                                                   const uint64_t* sizes, size_t n_sizes,
                                                   uint64_t trials, uint64_t seed, char** jsonl,
                                                   int* all_pass);

#ifdef __cplusplus
}
#endif

#endif /* ADVLAND_H */
