/* Root cause discovery for linear structural equation models.
 *
 * C interface of librcd. Handles are opaque; every function that can fail
 * returns an rcd_status, and rcd_last_error() describes the most recent
 * failure on the calling thread. Handles returned through out-parameters
 * are owned by the caller and released with the matching _free call.
 *
 * Indices crossing this interface are 1-based, matching the CSV and JSON
 * file formats. Scores use IEEE +infinity for gap scores of exactly
 * 1-sparse whitened shifts.
 */

#ifndef RCD_H
#define RCD_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rcd_status {
    RCD_OK = 0,
    RCD_ERROR_INVALID_ARGUMENT = 1,
    RCD_ERROR_IO = 2,
    RCD_ERROR_PARSE = 3,
    RCD_ERROR_NUMERIC = 4,
    RCD_ERROR_INTERNAL = 5
} rcd_status;

typedef enum rcd_cov_mode {
    RCD_COV_AUTO = 0,   /* sample covariance when n > p, shrunk otherwise */
    RCD_COV_SAMPLE = 1,
    RCD_COV_SHRUNK = 2
} rcd_cov_mode;

typedef struct rcd_dataset rcd_dataset;
typedef struct rcd_model rcd_model;
typedef struct rcd_report rcd_report;

const char* rcd_version(void);

/* Message for the last failing call on this thread; never NULL. */
const char* rcd_last_error(void);

/* ---- datasets ---------------------------------------------------------- */

/* Observations CSV (header row, one label column) plus a one-row case CSV
 * with identical columns. */
rcd_status rcd_dataset_load_csv(const char* observations_path,
                                const char* case_path, rcd_dataset** out);

/* In-memory constructor. observations is row-major n x p; names may be NULL
 * for X1..Xp. */
rcd_status rcd_dataset_create(int64_t n, int64_t p, const double* observations,
                              const double* case_values,
                              const char* const* names, rcd_dataset** out);

void rcd_dataset_free(rcd_dataset* dataset);
int64_t rcd_dataset_samples(const rcd_dataset* dataset);
int64_t rcd_dataset_variables(const rcd_dataset* dataset);

/* ---- scoring ----------------------------------------------------------- */

typedef struct rcd_score_options {
    int32_t v;                  /* randomized orderings per candidate */
    const double* thresholds;   /* NULL: observed squared z-scores */
    int64_t n_thresholds;
    rcd_cov_mode cov_mode;
    double shrink_alpha;
    uint64_t seed;
} rcd_score_options;

void rcd_score_options_init(rcd_score_options* options);

typedef struct rcd_highdim_options {
    double response_threshold;  /* squared z-score cutoff for responses */
    int32_t v;
    const double* thresholds;
    int64_t n_thresholds;
    int32_t cv_folds;
    int32_t cv_grid;
    double cv_lambda_min_ratio;
    rcd_cov_mode cov_mode;
    double shrink_alpha;
    uint64_t seed;
} rcd_highdim_options;

void rcd_highdim_options_init(rcd_highdim_options* options);

rcd_status rcd_score(const rcd_dataset* dataset, const rcd_score_options* options,
                     rcd_report** out);

/* Exhaustive scoring over every ordering; rejected above 8 variables. */
rcd_status rcd_score_all_permutations(const rcd_dataset* dataset,
                                      rcd_cov_mode cov_mode, double shrink_alpha,
                                      rcd_report** out);

rcd_status rcd_score_highdim(const rcd_dataset* dataset,
                             const rcd_highdim_options* options, rcd_report** out);

/* ---- reports ----------------------------------------------------------- */

int64_t rcd_report_variables(const rcd_report* report);

/* Any output pointer may be NULL. rc_scores uses +infinity for infinite
 * gaps; in_candidate_set entries are 0 or 1. */
rcd_status rcd_report_values(const rcd_report* report, double* zscores_sq,
                             double* rc_scores, int32_t* in_candidate_set);

/* Name of 1-based variable `index`; valid until the report is freed. */
const char* rcd_report_variable_name(const rcd_report* report, int64_t index);

rcd_status rcd_report_write_csv(const rcd_report* report, const char* path);

/* Per-response diagnostics; available for reports from rcd_score_highdim. */
rcd_status rcd_report_write_meta_json(const rcd_report* report, const char* path);

void rcd_report_free(rcd_report* report);

/* ---- models ------------------------------------------------------------ */

rcd_status rcd_model_load_json(const char* path, rcd_model** out);
rcd_status rcd_model_save_json(const rcd_model* model, const char* path);
void rcd_model_free(rcd_model* model);
int64_t rcd_model_variables(const rcd_model* model);

/* permutation lists all p variables (1-based) in their tested order.
 * *out is set to 1 when parents of root precede it and all variables it
 * truly influences follow it. */
rcd_status rcd_model_is_sufficient(const rcd_model* model,
                                   const int64_t* permutation, int64_t length,
                                   int64_t root, int32_t* out);

/* ---- file-level commands (the CLI surface) ----------------------------- */

typedef struct rcd_simulate_args {
    const char* dag;       /* "random" or "hub" */
    int32_t p;
    double s;
    int32_t n;
    double delta;
    int32_t cases;
    uint64_t seed;
    const char* family;    /* "gaussian" (default when NULL) or "uniform" */
    int32_t hub_count;     /* hub layout; zeros select the defaults */
    int32_t hub_upper;
    int32_t hub_lower;
    int32_t hub_cross_in;
    int32_t hub_cross_out;
} rcd_simulate_args;

void rcd_simulate_args_init(rcd_simulate_args* args);

rcd_status rcd_cmd_simulate(const rcd_simulate_args* args, const char* out_dir);

rcd_status rcd_cmd_score(const char* observations_path, const char* case_path,
                         const rcd_score_options* options, const char* out_path);

/* Writes the report CSV and "<out>.meta.json". */
rcd_status rcd_cmd_score_highdim(const char* observations_path,
                                 const char* case_path,
                                 const rcd_highdim_options* options,
                                 const char* out_path);

rcd_status rcd_cmd_eval(const char* config_json_path, const char* out_dir);

typedef struct rcd_preprocess_args {
    double min_count;
    double max_zero_frac;
    double corr_cutoff;
    double pseudocount;
    int32_t scale_after_log;  /* nonzero: divide the logged value instead */
} rcd_preprocess_args;

void rcd_preprocess_args_init(rcd_preprocess_args* args);

rcd_status rcd_cmd_preprocess(const char* counts_path,
                              const rcd_preprocess_args* args,
                              const char* out_path);

#ifdef __cplusplus
}
#endif

#endif /* RCD_H */
