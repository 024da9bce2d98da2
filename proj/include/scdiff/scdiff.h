/* libscdiff: spatial window modulation, spectral analysis and the
 * two-stage (alpha, beta) search, behind a plain C interface.
 *
 * Every function returns an scdiff_status. On failure the thread-local
 * message from scdiff_last_error() describes the problem. Handles are
 * opaque; free them with the matching *_free function (NULL is accepted).
 * Strings returned through char** are heap-allocated and must be released
 * with scdiff_string_free. */
#ifndef SCDIFF_H
#define SCDIFF_H

#include <stddef.h>
#include <stdint.h>

#if defined(SCDIFF_BUILDING_LIBRARY)
#define SCDIFF_API __attribute__((visibility("default")))
#else
#define SCDIFF_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum scdiff_status {
  SCDIFF_OK = 0,
  SCDIFF_ERR_INVALID_ARGUMENT = 1,
  SCDIFF_ERR_IO = 2,
  SCDIFF_ERR_CONFIG = 3,
  SCDIFF_ERR_NUMERIC = 4,    /* GP fit or optimizer failure */
  SCDIFF_ERR_TRANSPORT = 5,  /* external evaluator unreachable, timed out, or died */
  SCDIFF_ERR_CONTRACT = 6,   /* evaluator answered outside the protocol */
  SCDIFF_ERR_EVALUATION = 7, /* evaluator reported an error for a request */
  SCDIFF_ERR_INTERNAL = 8
} scdiff_status;

SCDIFF_API const char* scdiff_version(void);
SCDIFF_API const char* scdiff_status_name(scdiff_status status);
SCDIFF_API const char* scdiff_last_error(void);
SCDIFF_API void scdiff_string_free(char* s);

/* ---- special functions ---- */
SCDIFF_API scdiff_status scdiff_bessel_i0(double x, double* out);
SCDIFF_API scdiff_status scdiff_bessel_j1(double x, double* out);
/* J1(2 pi fc r) / r, with limit pi fc at r = 0. */
SCDIFF_API scdiff_status scdiff_jinc(double cycles_per_pixel, double r, double* out);

/* ---- windows ---- */
typedef enum scdiff_window_kind {
  SCDIFF_WINDOW_KAISER_BESSEL = 0,
  SCDIFF_WINDOW_GAUSSIAN = 1,
  SCDIFF_WINDOW_CIRCULAR = 2
} scdiff_window_kind;

typedef struct scdiff_window_spec {
  scdiff_window_kind kind;
  size_t height;
  size_t width;
  double radius;
  double beta;     /* kaiser-bessel shape */
  double eta;      /* gaussian stddev as a fraction of radius */
  int has_center;  /* 0: centre at (width/2, height/2) */
  double cx;
  double cy;
} scdiff_window_spec;

typedef struct scdiff_window scdiff_window;

SCDIFF_API scdiff_status scdiff_window_kind_parse(const char* name, scdiff_window_kind* out);
SCDIFF_API scdiff_status scdiff_window_create(const scdiff_window_spec* spec, scdiff_window** out);
SCDIFF_API void scdiff_window_free(scdiff_window* w);
SCDIFF_API scdiff_status scdiff_window_dims(const scdiff_window* w, size_t* height, size_t* width);
/* Row-major values owned by the handle. */
SCDIFF_API scdiff_status scdiff_window_values(const scdiff_window* w, const double** values);
SCDIFF_API scdiff_status scdiff_window_summary(const scdiff_window* w, double* peak, double* edge,
                                               size_t* support);
/* format: "csv" (17 significant digits) or "pgm" (8-bit plain). */
SCDIFF_API scdiff_status scdiff_window_write(const scdiff_window* w, const char* path,
                                             const char* format);

/* ---- feature maps (B x C x H x W, row-major) ---- */
typedef struct scdiff_feature_map scdiff_feature_map;

/* values may be NULL for zeros. */
SCDIFF_API scdiff_status scdiff_feature_map_create(size_t b, size_t c, size_t h, size_t w,
                                                   const double* values, scdiff_feature_map** out);
SCDIFF_API scdiff_status scdiff_feature_map_random(size_t b, size_t c, size_t h, size_t w,
                                                   uint64_t seed, scdiff_feature_map** out);
SCDIFF_API scdiff_status scdiff_feature_map_read(const char* path, scdiff_feature_map** out);
SCDIFF_API scdiff_status scdiff_feature_map_write(const scdiff_feature_map* x, const char* path);
SCDIFF_API void scdiff_feature_map_free(scdiff_feature_map* x);
SCDIFF_API scdiff_status scdiff_feature_map_dims(const scdiff_feature_map* x, size_t dims[4]);
SCDIFF_API scdiff_status scdiff_feature_map_values(const scdiff_feature_map* x,
                                                   const double** values, size_t* count);

/* x (1 - w) + alpha x w, window broadcast over batch and channels. */
SCDIFF_API scdiff_status scdiff_modulate(const scdiff_feature_map* x, const scdiff_window* w,
                                         double alpha, scdiff_feature_map** out);
/* Amplify the low-pass band (bins within cutoff of DC) by alpha. */
SCDIFF_API scdiff_status scdiff_freq_amplify(const scdiff_feature_map* x, double cutoff,
                                             double alpha, scdiff_feature_map** out);
/* max |edited - original| over pixels farther than radius from (cx, cy). */
SCDIFF_API scdiff_status scdiff_leakage(const scdiff_feature_map* original,
                                        const scdiff_feature_map* edited, double radius,
                                        double cx, double cy, double* out);

/* ---- spatial kernel of a circular low-pass mask ---- */
typedef struct scdiff_kernel scdiff_kernel;

SCDIFF_API scdiff_status scdiff_kernel_create(size_t height, size_t width, double cutoff,
                                              scdiff_kernel** out);
SCDIFF_API void scdiff_kernel_free(scdiff_kernel* k);
SCDIFF_API scdiff_status scdiff_kernel_dims(const scdiff_kernel* k, size_t* height, size_t* width);
/* Centered: index (height/2, width/2) is zero displacement. */
SCDIFF_API scdiff_status scdiff_kernel_values(const scdiff_kernel* k, const double** values);
/* Mean over pixels with round(r) == k, k = 0 .. min(h, w)/2. Pass
 * out = NULL to query the length through count. */
SCDIFF_API scdiff_status scdiff_kernel_radial_profile(const scdiff_kernel* k, double* out,
                                                      size_t capacity, size_t* count);
SCDIFF_API scdiff_status scdiff_kernel_write_csv(const scdiff_kernel* k, const char* path);

/* ---- search ---- */
typedef struct scdiff_config scdiff_config;
typedef struct scdiff_evaluator scdiff_evaluator;
typedef struct scdiff_search_result scdiff_search_result;

SCDIFF_API scdiff_status scdiff_config_parse(const char* json_text, scdiff_config** out);
SCDIFF_API scdiff_status scdiff_config_load(const char* path, scdiff_config** out);
SCDIFF_API void scdiff_config_free(scdiff_config* c);
SCDIFF_API scdiff_status scdiff_config_set_seed(scdiff_config* c, uint64_t seed);
SCDIFF_API scdiff_status scdiff_config_to_json(const scdiff_config* c, char** out);

/* Launches external evaluators and performs their handshake. */
SCDIFF_API scdiff_status scdiff_evaluator_create(const scdiff_config* c, scdiff_evaluator** out);
/* name: "peak", "identity", "infeasible" or "noisy-peak". */
SCDIFF_API scdiff_status scdiff_evaluator_synthetic(const char* name, scdiff_evaluator** out);
SCDIFF_API void scdiff_evaluator_free(scdiff_evaluator* e);
SCDIFF_API scdiff_status scdiff_evaluator_name(const scdiff_evaluator* e, char** out);
SCDIFF_API scdiff_status scdiff_evaluator_concurrent(const scdiff_evaluator* e, int* out);
/* Request fields other than alpha and beta come from the config. */
SCDIFF_API scdiff_status scdiff_evaluate(scdiff_evaluator* e, const scdiff_config* c, double alpha,
                                         double beta, double* s_text, double* s_img);

SCDIFF_API scdiff_status scdiff_vsml_score(double s_text, double s_img, double lambda, double* out);
SCDIFF_API scdiff_status scdiff_constraint_g(double s_img, double tau, double* out);

typedef struct scdiff_search_summary {
  double alpha;
  double beta;
  double score;
  int feasible;
  size_t evaluator_calls;
  size_t stage1_calls;
  size_t stage2_calls;
  size_t error_count;
} scdiff_search_summary;

SCDIFF_API scdiff_status scdiff_search_run(const scdiff_config* c, scdiff_evaluator* e,
                                           scdiff_search_result** out);
SCDIFF_API void scdiff_search_result_free(scdiff_search_result* r);
SCDIFF_API scdiff_status scdiff_search_result_summary(const scdiff_search_result* r,
                                                      scdiff_search_summary* out);
/* Versioned JSON document ("schema": "scdiff-search/1"). */
SCDIFF_API scdiff_status scdiff_search_result_json(const scdiff_search_result* r, char** out);
/* Structural check of a search document. */
SCDIFF_API scdiff_status scdiff_search_json_validate(const char* json_text);

/* ---- rendering and verification ---- */
SCDIFF_API scdiff_status scdiff_plot_search(const char* trace_json, char** svg_out);
/* Line chart of the discrete radial profile against the continuous
 * kernel fc * jinc(fc, r) with fc = cutoff / sqrt(h w). */
SCDIFF_API scdiff_status scdiff_plot_profiles(const scdiff_kernel* k, char** svg_out);
/* Writes the radial-profile, jinc-profile and kernel CSVs plus
 * leakage.json into dir (which must exist). */
SCDIFF_API scdiff_status scdiff_spectral_report(size_t height, size_t width, double cutoff,
                                                double alpha, uint64_t seed, const char* dir,
                                                char** leakage_json);
/* Runs the brute-force oracles against the library. */
SCDIFF_API scdiff_status scdiff_verify(uint64_t seed, char** report_json, int* all_passed);

#ifdef __cplusplus
}
#endif

#endif /* SCDIFF_H */
