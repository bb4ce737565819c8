/*
 * C interface to the arbench library: online AR prediction with missing
 * values (YW, KF, OGD, AERR) plus the ARLS offline baseline and the sweep
 * harness.
 *
 * All objects are opaque handles released with their matching *_free call.
 * Every fallible call returns an arb_status; on failure arb_last_error()
 * returns a message for the calling thread, valid until its next call.
 * Strings returned through char** are released with arb_string_free.
 */
#ifndef ARBENCH_ARBENCH_H
#define ARBENCH_ARBENCH_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(ARBENCH_BUILDING_LIBRARY)
#    define ARBENCH_API __declspec(dllexport)
#  else
#    define ARBENCH_API __declspec(dllimport)
#  endif
#else
#  define ARBENCH_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum arb_status {
  ARB_OK = 0,
  ARB_ERR_INVALID_ARGUMENT = 1,
  ARB_ERR_NEAR_SINGULAR = 2,
  ARB_ERR_NOT_SYMMETRIC = 3,
  ARB_ERR_NON_STATIONARY = 4,
  ARB_ERR_DEGENERATE_SERIES = 5,
  ARB_ERR_ZERO_VARIANCE = 6,
  ARB_ERR_PARSE = 7,
  ARB_ERR_MISSING_WARMUP = 8,
  ARB_ERR_DIVERGED = 9,
  ARB_ERR_TOO_SHORT = 10,
  ARB_ERR_LENGTH_MISMATCH = 11,
  ARB_ERR_EMPTY_INPUT = 12,
  ARB_ERR_IO = 13,
  ARB_ERR_CONFIG = 14,
  ARB_ERR_INTERNAL = 15
} arb_status;

typedef enum arb_method {
  ARB_METHOD_YW = 0,
  ARB_METHOD_KF = 1,
  ARB_METHOD_OGD = 2,
  ARB_METHOD_AERR = 3,
  ARB_METHOD_ARLS = 4
} arb_method;

typedef struct arb_series arb_series;
typedef struct arb_predictor arb_predictor;
typedef struct arb_config arb_config;
typedef struct arb_sweep arb_sweep;

typedef struct arb_hyperparams {
  double ogd_eta;
  double kf_sigma2;
  double kf_pinit;
  double aerr_radius;
  size_t aerr_samples;
  double aerr_eta;
  double aerr_gamma; /* negative: estimate the miss rate online */
  size_t arls_iters;
  double arls_tol;
  int yw_incremental;
} arb_hyperparams;

ARBENCH_API const char* arb_version(void);
ARBENCH_API const char* arb_last_error(void);
ARBENCH_API const char* arb_status_name(arb_status status);
ARBENCH_API void arb_string_free(char* text);

ARBENCH_API void arb_hyperparams_default(arb_hyperparams* out);
ARBENCH_API const char* arb_method_name(arb_method method);
/* Case-insensitive: "yw", "kf", "ogd", "aerr", "arls". */
ARBENCH_API arb_status arb_method_from_name(const char* name, arb_method* out);

/* splitmix64 stream derivation used by the sweep harness: stream 1 generates,
 * stream 2 masks, stream 16 + method seeds each method. */
ARBENCH_API uint64_t arb_derive_seed(uint64_t base, uint64_t stream);

/* ---- series ------------------------------------------------------------ */

/* present may be NULL (all present); present[i] == 0 marks slot i MISSING. */
ARBENCH_API arb_status arb_series_create(const double* values, const unsigned char* present,
                                         size_t length, arb_series** out);
ARBENCH_API arb_status arb_series_parse(const char* text, size_t text_length, arb_series** out);
ARBENCH_API arb_status arb_series_load(const char* path, arb_series** out);
ARBENCH_API arb_status arb_series_save(const arb_series* series, const char* path);
ARBENCH_API arb_status arb_series_render(const arb_series* series, char** text_out);
ARBENCH_API size_t arb_series_length(const arb_series* series);
ARBENCH_API size_t arb_series_missing_count(const arb_series* series);
ARBENCH_API arb_status arb_series_get(const arb_series* series, size_t index, double* value,
                                      int* present);
ARBENCH_API void arb_series_free(arb_series* series);

ARBENCH_API arb_status arb_generate_ar(const double* coeffs, size_t order, double noise_std,
                                       size_t length, uint64_t seed, arb_series** out);
ARBENCH_API arb_status arb_apply_missing_mask(const arb_series* series, double miss_rate,
                                              size_t protected_prefix, uint64_t seed,
                                              arb_series** out);
ARBENCH_API arb_status arb_zscore_normalize(const arb_series* series, arb_series** out);
ARBENCH_API arb_status arb_spectral_radius(const double* coeffs, size_t order, double* out);

/* ---- online predictors ------------------------------------------------- */

/* The first `order` slots of `warmup` prime the predictor. ARLS is rejected. */
ARBENCH_API arb_status arb_predictor_create(arb_method method, size_t order,
                                            const arb_hyperparams* hyper,
                                            const arb_series* warmup, uint64_t seed,
                                            arb_predictor** out);
ARBENCH_API arb_status arb_predictor_predict(const arb_predictor* predictor, double* out);
/* Emits the prediction for this step, then consumes the observation. */
ARBENCH_API arb_status arb_predictor_advance(arb_predictor* predictor, double observation,
                                             int present, double* prediction_out);
ARBENCH_API size_t arb_predictor_order(const arb_predictor* predictor);
/* Writes min(order, capacity) coefficients. */
ARBENCH_API arb_status arb_predictor_coefficients(const arb_predictor* predictor, double* out,
                                                  size_t capacity);
ARBENCH_API void arb_predictor_free(arb_predictor* predictor);

/* ---- whole-series runs ------------------------------------------------- */

/* Runs any method over the series; predictions_out needs length - order
 * slots. On ARB_ERR_DIVERGED, *written holds the number emitted before the
 * abort. */
ARBENCH_API arb_status arb_run(arb_method method, size_t order, const arb_hyperparams* hyper,
                               const arb_series* series, uint64_t seed, double* predictions_out,
                               size_t capacity, size_t* written);
ARBENCH_API arb_status arb_arls_impute(const arb_series* series, size_t order, size_t max_iters,
                                       double tol, double* coeffs_out, arb_series** imputed_out,
                                       size_t* iterations_out);
ARBENCH_API arb_status arb_mse(const double* actual, const double* predicted, size_t length,
                               double* out);
/* MSE of predictions[i] against truth slot order + i, skipping MISSING truth. */
ARBENCH_API arb_status arb_score_trace(const arb_series* truth, const double* predictions,
                                       size_t count, size_t order, double* out);

/* ---- benchmark configuration and sweeps -------------------------------- */

ARBENCH_API arb_status arb_config_create(arb_config** out);
ARBENCH_API arb_status arb_config_parse(const char* text, arb_config** out);
ARBENCH_API arb_status arb_config_load(const char* path, arb_config** out);
ARBENCH_API arb_status arb_config_set(arb_config* config, const char* key, const char* value);
ARBENCH_API arb_status arb_config_render(const arb_config* config, char** text_out);
ARBENCH_API void arb_config_free(arb_config* config);

/* axis: missing_rate | length | noise_std | coefficients | p_fit.
 * n_values == 0 selects the default value list for the axis. */
ARBENCH_API arb_status arb_sweep_run(const arb_config* config, const char* axis,
                                     const char* const* values, size_t n_values, unsigned jobs,
                                     arb_sweep** out);
ARBENCH_API arb_status arb_sweep_write(const arb_sweep* sweep, const char* dir,
                                       const char* const* extra_meta, size_t n_extra);
ARBENCH_API arb_status arb_sweep_records_csv(const arb_sweep* sweep, char** text_out);
ARBENCH_API arb_status arb_sweep_aggregates_csv(const arb_sweep* sweep, char** text_out);
ARBENCH_API size_t arb_sweep_rejected_count(const arb_sweep* sweep);
ARBENCH_API const char* arb_sweep_rejected(const arb_sweep* sweep, size_t index);
ARBENCH_API void arb_sweep_free(arb_sweep* sweep);

/* by: cell | missing_rate | axis_value. */
ARBENCH_API arb_status arb_report(const char* records_path, const char* by, char** text_out);

#ifdef __cplusplus
}
#endif

#endif /* ARBENCH_ARBENCH_H */
