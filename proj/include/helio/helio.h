/* SPDX-License-Identifier: Apache-2.0 */
/*
 * C interface to the helio sound-field upsampling library.
 *
 * Every function returns a helio_status. On failure the message of the most
 * recent error on the calling thread is available from helio_last_error().
 * Objects are opaque and owned by the caller once returned; release them
 * with the matching *_free function. Strings returned through char** out
 * parameters are released with helio_string_free().
 */
#ifndef HELIO_H
#define HELIO_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(HELIO_BUILDING_LIBRARY)
#    define HELIO_API __declspec(dllexport)
#  else
#    define HELIO_API __declspec(dllimport)
#  endif
#else
#  define HELIO_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum helio_status {
  HELIO_OK = 0,
  HELIO_ERR_ARGUMENT = 1,
  HELIO_ERR_CONFIG = 2,
  HELIO_ERR_IO = 3,
  HELIO_ERR_NUMERIC = 4,
  HELIO_ERR_INTERNAL = 5
} helio_status;

typedef enum helio_set {
  HELIO_SET_ALL = -1,
  HELIO_SET_KNOWN = 0,
  HELIO_SET_UNKNOWN = 1
} helio_set;

typedef struct helio_dataset helio_dataset;
typedef struct helio_sh_model helio_sh_model;
typedef struct helio_quadrant helio_quadrant;
typedef struct helio_report helio_report;

typedef struct helio_train_options {
  int depth;              /* hidden layers */
  int width;              /* neurons per layer; 0 selects the width rule */
  long epochs;
  double learning_rate;
  int pde_loss;           /* nonzero: physics-informed; zero: plain regression */
  uint64_t seed;          /* per-part seeds are derived from this */
  double speed_of_sound;  /* m/s */
  int jobs;               /* parallel part trainings */
} helio_train_options;

HELIO_API const char* helio_version(void);
HELIO_API const char* helio_last_error(void);
HELIO_API void helio_string_free(char* s);

/* Defaults used when fields are left at zero by the caller. */
HELIO_API helio_train_options helio_train_options_default(void);

/* ---- geometry and order rules ---------------------------------------- */

/* scenario: "interp" or "extrap". CSV columns theta_deg,phi_deg,set. */
HELIO_API helio_status helio_grid_csv(const char* scenario, char** out_csv);
HELIO_API helio_status helio_sh_order_for_freq(double freq_hz, int* out_order);
HELIO_API helio_status helio_width_for_freq(double freq_hz, int* out_width);
HELIO_API helio_status helio_count_params(int depth, int width, long* out_count);

/* ---- datasets ----------------------------------------------------------- */

/* Normalized synthetic field of the given SH order (negative: order rule). */
HELIO_API helio_status helio_dataset_synth(const char* scenario, int order, uint64_t seed,
                                           double decay, double freq_hz, helio_dataset** out);
HELIO_API helio_status helio_dataset_read_csv(const char* path, helio_dataset** out);
HELIO_API helio_status helio_dataset_write_csv(const helio_dataset* ds, const char* path);
HELIO_API size_t helio_dataset_count(const helio_dataset* ds, helio_set set);
HELIO_API double helio_dataset_freq(const helio_dataset* ds);
HELIO_API double helio_dataset_scale(const helio_dataset* ds);
HELIO_API void helio_dataset_free(helio_dataset* ds);

/* ---- spherical-harmonics baseline -------------------------------------- */

/* Fits the known entries. order < 0 selects the order rule. */
HELIO_API helio_status helio_sh_fit(const helio_dataset* ds, int order, double gamma,
                                    helio_sh_model** out);
HELIO_API helio_status helio_sh_model_json(const helio_sh_model* model, char** out_json);
/* Error in dB over the unknown entries of ds. */
HELIO_API helio_status helio_sh_error_db(const helio_sh_model* model, const helio_dataset* ds,
                                         double* out_db);
HELIO_API void helio_sh_model_free(helio_sh_model* model);

/* ---- networks -------------------------------------------------------- */

HELIO_API helio_status helio_train_quadrant(const helio_dataset* ds, const helio_train_options* opts,
                                            helio_quadrant** out);
HELIO_API helio_status helio_quadrant_json(const helio_quadrant* model, char** out_json);
HELIO_API helio_status helio_quadrant_from_json(const char* json, helio_quadrant** out);
HELIO_API helio_status helio_quadrant_error_db(const helio_quadrant* model, const helio_dataset* ds,
                                               double* out_db);
/* Complex estimates at n directions (degrees). */
HELIO_API helio_status helio_quadrant_predict(const helio_quadrant* model, size_t n,
                                              const double* theta_deg, const double* phi_deg,
                                              double* out_re, double* out_im);
HELIO_API void helio_quadrant_free(helio_quadrant* model);

/* ---- metric ------------------------------------------------------------ */

HELIO_API helio_status helio_upsample_error_db(size_t n, const double* truth_re, const double* truth_im,
                                               const double* est_re, const double* est_im,
                                               double* out_db);

/* ---- batch experiments ------------------------------------------------- */

HELIO_API helio_status helio_config_defaults(char** out_json);
/* Validates a config and returns its fully resolved form. */
HELIO_API helio_status helio_config_resolve(const char* config_json, char** out_json);
/* One line per planned training/fitting job. */
HELIO_API helio_status helio_plan(const char* config_json, char** out_text);
/* Writes one normalized dataset CSV per (seed, frequency) into out_dir and
   returns the written paths, newline separated. */
HELIO_API helio_status helio_synth_datasets(const char* config_json, const char* out_dir,
                                            char** out_paths);
/* Runs the experiment. Checkpoints go to checkpoint_dir unless it is NULL. */
HELIO_API helio_status helio_run(const char* config_json, int jobs, const char* checkpoint_dir,
                                 helio_report** out);

HELIO_API helio_status helio_report_read_csv(const char* path, helio_report** out);
HELIO_API helio_status helio_report_write_csv(const helio_report* report, const char* path);
HELIO_API helio_status helio_report_write_json(const helio_report* report, const char* path);
HELIO_API size_t helio_report_rows(const helio_report* report);
HELIO_API size_t helio_report_failed_rows(const helio_report* report);
/* Human-readable list of failed rows; empty string when none failed. */
HELIO_API helio_status helio_report_failures(const helio_report* report, char** out_text);
/* Delta table (a - b) on shared (freq, seed) keys. method_a/method_b may be NULL. */
HELIO_API helio_status helio_report_compare(const helio_report* a, const helio_report* b,
                                            const char* method_a, const char* method_b,
                                            char** out_text);
HELIO_API void helio_report_free(helio_report* report);

#ifdef __cplusplus
}
#endif

#endif /* HELIO_H */
