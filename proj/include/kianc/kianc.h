/* SPDX-License-Identifier: Apache-2.0 */

/* C interface to the kianc spatial noise control simulator. Every function
 * returning kianc_status leaves a thread-local message behind on failure,
 * readable with kianc_last_error(). Strings handed out through char** must be
 * released with kianc_string_free(). */

#ifndef KIANC_H
#define KIANC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define KIANC_API __declspec(dllexport)
#else
#define KIANC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum kianc_status {
  KIANC_OK = 0,
  KIANC_ERR_INVALID_ARGUMENT = 1,
  KIANC_ERR_VALIDATION = 2,
  KIANC_ERR_DOMAIN = 3,
  KIANC_ERR_NOT_POSITIVE_DEFINITE = 4,
  KIANC_ERR_SINGULAR = 5,
  KIANC_ERR_NUMERICAL = 6,
  KIANC_ERR_NO_FEASIBLE_LAMBDA = 7,
  KIANC_ERR_IO = 8,
  KIANC_ERR_INTERNAL = 9
} kianc_status;

typedef enum kianc_algorithm { KIANC_NLMS = 0, KIANC_PENAL = 1, KIANC_CONST = 2 } kianc_algorithm;

typedef struct kianc_config kianc_config;
typedef struct kianc_result kianc_result;

typedef struct kianc_run_summary {
  kianc_algorithm algorithm;
  double freq_hz;
  uint64_t seed;
  double lambda;
  double budget_w;
  double j_ext_hat_w;
  double final_p_red_db;
  double final_j_ext_w;
  double final_j_int;
  double final_w_frob;
  size_t records;
  int diverged;
} kianc_run_summary;

typedef struct kianc_calibration {
  double freq_hz;
  double j_ext_hat_w;
  double budget_w;
  double wiener_p_red_db;
  double cond_a_ext;
  int loaded;
  int has_lambda;
  double lambda;
} kianc_calibration;

typedef struct kianc_record {
  size_t iter;
  double p_red_db;
  double j_ext_w;
  double j_int;
  double w_frob;
} kianc_record;

KIANC_API const char* kianc_version(void);
KIANC_API const char* kianc_last_error(void);
KIANC_API const char* kianc_status_name(kianc_status status);
KIANC_API void kianc_string_free(char* s);

/* Configuration. A fresh config holds the desk-scale defaults. Keys are
 * "section.key" as in the INI file. */
KIANC_API kianc_status kianc_config_new(kianc_config** out);
KIANC_API void kianc_config_free(kianc_config* config);
KIANC_API kianc_status kianc_config_apply_preset(kianc_config* config, const char* name);
KIANC_API kianc_status kianc_config_load_file(kianc_config* config, const char* path);
KIANC_API kianc_status kianc_config_load_text(kianc_config* config, const char* text);
KIANC_API kianc_status kianc_config_set(kianc_config* config, const char* key, const char* value);
KIANC_API kianc_status kianc_config_get(const kianc_config* config, const char* key, char** value);
KIANC_API kianc_status kianc_config_paper_scale(kianc_config* config);
KIANC_API kianc_status kianc_config_validate(const kianc_config* config);
KIANC_API kianc_status kianc_config_to_ini(const kianc_config* config, char** text);
/* output.dir, else $KIANC_OUT_DIR, else "kianc-out". */
KIANC_API kianc_status kianc_config_output_dir(const kianc_config* config, char** path);

/* Experiments. scenario is one of "converge", "lambda-sweep", "freq-sweep",
 * "moving-source". */
KIANC_API kianc_status kianc_run(const kianc_config* config, const char* scenario, kianc_result** out);
KIANC_API void kianc_result_free(kianc_result* result);
KIANC_API size_t kianc_result_run_count(const kianc_result* result);
KIANC_API kianc_status kianc_result_run_summary(const kianc_result* result, size_t index, kianc_run_summary* out);
KIANC_API kianc_status kianc_result_run_records(const kianc_result* result, size_t index, kianc_record* records,
                                                size_t capacity, size_t* count);
KIANC_API size_t kianc_result_calibration_count(const kianc_result* result);
KIANC_API kianc_status kianc_result_calibration(const kianc_result* result, size_t index, kianc_calibration* out);
KIANC_API size_t kianc_result_failure_count(const kianc_result* result);
KIANC_API kianc_status kianc_result_failure(const kianc_result* result, size_t index, double* freq_hz, char** message);
/* Number of runs whose control filter became non-finite. */
KIANC_API size_t kianc_result_diverged_count(const kianc_result* result);
KIANC_API size_t kianc_result_operator_builds(const kianc_result* result);
KIANC_API kianc_status kianc_result_summary_json(const kianc_result* result, char** json);
/* Writes traces, summary.json, the SVG plots (as enabled in the config) and
 * resolved-config.ini into dir, creating it if needed. */
KIANC_API kianc_status kianc_result_write(const kianc_result* result, const kianc_config* config, const char* dir);

/* Oracle suite on the operators at plan.frequency. Writes validation.json,
 * operators.json and resolved-config.ini into dir when dir is not NULL.
 * *failed receives the number of failing checks, *report one line per check. */
KIANC_API kianc_status kianc_validate(const kianc_config* config, const char* dir, size_t* failed, char** report);
KIANC_API kianc_status kianc_export_operators(const kianc_config* config, double freq_hz, char** json);

KIANC_API kianc_status kianc_bessel_j0(double x, double* out);
KIANC_API kianc_status kianc_bessel_y0(double x, double* out);

#ifdef __cplusplus
}
#endif

#endif /* KIANC_H */
