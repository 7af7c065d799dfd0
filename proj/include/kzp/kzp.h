/* C interface to the kzp shared library.
 *
 * Every object is an opaque handle released by its matching *_free function.
 * Functions return KZP_OK or an error status; kzp_last_error() then holds a
 * message for the calling thread. Array getters follow one pattern: they
 * copy at most `capacity` elements into `out` (which may be NULL when
 * capacity is 0) and store the full element count in `*count`.
 */
#ifndef KZP_KZP_H
#define KZP_KZP_H

#include <stddef.h>
#include <stdint.h>

#if defined(KZP_BUILDING_LIBRARY)
#define KZP_API __attribute__((visibility("default")))
#else
#define KZP_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum kzp_status {
  KZP_OK = 0,
  KZP_ERR_ARGUMENT = 1,
  KZP_ERR_PARSE = 2,
  KZP_ERR_STRUCTURE = 3,
  KZP_ERR_IO = 4,
  KZP_ERR_INSUFFICIENT_DATA = 5,
  KZP_ERR_UNSUPPORTED = 6,
  KZP_ERR_INTERNAL = 7
} kzp_status;

typedef struct kzp_series kzp_series;
typedef struct kzp_result kzp_result;
typedef struct kzp_reconstruction kzp_reconstruction;
typedef struct kzp_ar_model kzp_ar_model;

KZP_API const char* kzp_version(void);
KZP_API const char* kzp_status_name(kzp_status status);
/* Message of the last failed call on this thread; "" after success. */
KZP_API const char* kzp_last_error(void);

/* ---- series ---- */

/* mask may be NULL (all observed); mask[i] != 0 marks an observed sample. */
KZP_API kzp_status kzp_series_create(const double* values,
                                     const unsigned char* mask, size_t n,
                                     int64_t start_index, kzp_series** out);
KZP_API kzp_status kzp_series_load_csv(const char* path, kzp_series** out);
KZP_API kzp_status kzp_series_save_csv(const kzp_series* series,
                                       const char* path);
KZP_API void kzp_series_free(kzp_series* series);

KZP_API size_t kzp_series_length(const kzp_series* series);
KZP_API size_t kzp_series_observed(const kzp_series* series);
KZP_API int64_t kzp_series_start(const kzp_series* series);
/* Either array may be NULL. */
KZP_API kzp_status kzp_series_data(const kzp_series* series, double* values,
                                   unsigned char* mask, size_t capacity,
                                   size_t* count);

typedef struct kzp_stats {
  size_t n_observed;
  double mean;
  double variance;    /* 1/(n-1) */
  double total_power; /* 1/n */
} kzp_stats;

KZP_API kzp_status kzp_series_stats(const kzp_series* series, kzp_stats* out);

/* ---- simulation ---- */

typedef struct kzp_component {
  double frequency;
  double amplitude;
  double phase;
} kzp_component;

typedef struct kzp_signal_spec {
  const kzp_component* components;
  size_t n_components;
  double noise_sigma;
  size_t n;
  uint64_t seed;
  int random_phase;
} kzp_signal_spec;

/* signal_only != 0 omits the noise term. */
KZP_API kzp_status kzp_simulate(const kzp_signal_spec* spec, int signal_only,
                                kzp_series** out);
KZP_API kzp_status kzp_inject_missing(const kzp_series* series, double p,
                                      uint64_t seed, kzp_series** out);
KZP_API kzp_status kzp_snr(const kzp_signal_spec* spec, double* out);
KZP_API kzp_status kzp_amplitude_for_snr(double snr, double noise_sigma,
                                         double* out);

/* ---- periodograms ---- */

typedef enum kzp_method { KZP_METHOD_DZ = 0, KZP_METHOD_NZ = 1 } kzp_method;
typedef enum kzp_edge { KZP_EDGE_DROP = 0, KZP_EDGE_PARTIAL = 1 } kzp_edge;
typedef enum kzp_dz_statistic {
  KZP_DZ_SUM_OF_SQUARES = 0,
  KZP_DZ_FIRST_DIFFERENCES = 1
} kzp_dz_statistic;

typedef struct kzp_params {
  int m;
  int k;
  double smooth_level;
  int method;       /* kzp_method */
  int digits;
  int top;
  int oversample;
  int edge;         /* kzp_edge */
  double min_coverage;
  int dz_statistic; /* kzp_dz_statistic */
} kzp_params;

KZP_API void kzp_params_default(kzp_params* params);
/* KZP_OK when every field lies in its domain. */
KZP_API kzp_status kzp_params_validate(const kzp_params* params);

/* Standard periodogram on the grid 0, step, 2 step, ... <= 0.5. */
KZP_API kzp_status kzp_raw_periodogram(const kzp_series* series, double step,
                                       double* frequencies, double* intensity,
                                       size_t capacity, size_t* count);

KZP_API kzp_status kzp_run(const kzp_series* series, const kzp_params* params,
                           kzp_result** out);
KZP_API void kzp_result_free(kzp_result* result);

KZP_API kzp_status kzp_result_top(const kzp_result* result, double* out,
                                  size_t capacity, size_t* count);
KZP_API double kzp_result_total_variance(const kzp_result* result);
/* Any of the arrays may be NULL. */
KZP_API kzp_status kzp_result_spectrum(const kzp_result* result,
                                       double* frequencies, double* raw,
                                       double* smoothed, int* half_widths,
                                       size_t capacity, size_t* count);
KZP_API kzp_status kzp_result_write_csv(const kzp_result* result,
                                        const char* path);
KZP_API kzp_status kzp_result_write_json(const kzp_result* result,
                                         const char* path);
KZP_API kzp_status kzp_result_write_svg(const kzp_result* result,
                                        const char* path);
/* NUL-terminated JSON summary; *count receives the length without NUL. */
KZP_API kzp_status kzp_result_json(const kzp_result* result, char* out,
                                   size_t capacity, size_t* count);

/* ---- reconstruction ---- */

KZP_API kzp_status kzp_reconstruct(const kzp_series* series,
                                   const double* frequencies,
                                   size_t n_frequencies, int m, int k,
                                   int edge, kzp_reconstruction** out);
KZP_API void kzp_reconstruction_free(kzp_reconstruction* rec);
/* New series handle holding the estimate; unreconstructed times are masked. */
KZP_API kzp_status kzp_reconstruction_estimate(const kzp_reconstruction* rec,
                                               kzp_series** out);
KZP_API size_t kzp_reconstruction_warmup(const kzp_reconstruction* rec);
/* truth may be NULL. */
KZP_API kzp_status kzp_reconstruction_write_csv(const kzp_reconstruction* rec,
                                                const kzp_series* truth,
                                                const kzp_series* observed,
                                                const char* path);
KZP_API kzp_status kzp_reconstruction_write_svg(const kzp_reconstruction* rec,
                                                const kzp_series* observed,
                                                const char* path);

typedef struct kzp_fit {
  double r;
  double r_squared;
  size_t n_scored;
} kzp_fit;

KZP_API kzp_status kzp_fit_metrics(const kzp_series* reference,
                                   const kzp_series* estimate, kzp_fit* out);

/* ---- autoregression ---- */

/* max_order < 0 selects floor(10 log10 n). */
KZP_API kzp_status kzp_ar_fit(const kzp_series* series, int max_order,
                              kzp_ar_model** out);
KZP_API void kzp_ar_free(kzp_ar_model* model);
KZP_API int kzp_ar_order(const kzp_ar_model* model);
KZP_API double kzp_ar_noise_variance(const kzp_ar_model* model);
KZP_API double kzp_ar_aic(const kzp_ar_model* model);
KZP_API int kzp_ar_stationary(const kzp_ar_model* model);
KZP_API kzp_status kzp_ar_coefficients(const kzp_ar_model* model, double* out,
                                       size_t capacity, size_t* count);
KZP_API kzp_status kzp_ar_unexplained(const kzp_ar_model* model,
                                      const kzp_series* series, double* out);
KZP_API kzp_status kzp_acf(const kzp_series* series, int max_lag, double* out,
                           size_t capacity, size_t* count);
KZP_API kzp_status kzp_acf_write_csv(const kzp_series* series, int max_lag,
                                     const char* path);
KZP_API kzp_status kzp_acf_write_svg(const kzp_series* series, int max_lag,
                                     const char* path);

/* ---- experiments ---- */

/* Runs a study ("sensitivity", "accuracy", "resolution", "robustness" or
 * "showcase") and writes its artifacts and manifest.json into out_dir.
 * config_path (key = value file) and overrides (same syntax, newline
 * separated) may be NULL; overrides win. */
KZP_API kzp_status kzp_experiment_run(const char* study,
                                      const char* config_path,
                                      const char* overrides,
                                      const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif
