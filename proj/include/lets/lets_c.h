#ifndef LETS_C_H
#define LETS_C_H

/* C interface to the label-efficient two-sample testing library.
 *
 * Conventions:
 *   - Functions returning lets_status set a thread-local message readable via
 *     lets_last_error_message() on failure; output parameters are untouched.
 *   - char** outputs receive heap strings owned by the caller; release them
 *     with lets_string_free(). Handles are released with their *_free().
 *   - Configs are JSON text; lets_config_canonicalize() also accepts the TOML
 *     subset and normalizes either into canonical JSON.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define LETS_API __declspec(dllexport)
#else
#define LETS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lets_status {
    LETS_OK = 0,
    LETS_ERR_CONFIG = 1,
    LETS_ERR_INVALID = 2,
    LETS_ERR_IO = 3,
    LETS_ERR_RUNTIME = 4,
    LETS_ERR_INTERNAL = 5
} lets_status;

LETS_API const char* lets_version(void);

/* Message for the most recent failure on this thread; empty after success. */
LETS_API const char* lets_last_error_message(void);

LETS_API void lets_string_free(char* s);

/* Parses JSON or TOML config text and returns the fully-resolved canonical
 * JSON with defaults applied. */
LETS_API lets_status lets_config_canonicalize(const char* text, char** out_json);

/* Draws a labeled synthetic dataset and returns it as CSV text
 * (columns f1..fd,z). spec_json matches the "spec" config object. */
LETS_API lets_status lets_dataset_generate_csv(const char* spec_json, uint64_t seed,
                                               char** out_csv);

/* ----- experiments ------------------------------------------------------- */

typedef struct lets_report lets_report;

/* Runs the experiment described by config_json (canonical or not). */
LETS_API lets_status lets_experiment_run(const char* config_json, lets_report** out);
LETS_API void lets_report_free(lets_report* report);

LETS_API lets_status lets_report_json(const lets_report* report, char** out);
LETS_API lets_status lets_report_trials_csv(const lets_report* report, char** out);

/* Per-step trajectory of the first trial for sequential tests; empty CSV body
 * for batch tests. */
LETS_API lets_status lets_report_trajectory_csv(const lets_report* report, char** out);

LETS_API double lets_report_rejection_rate(const lets_report* report);

typedef struct lets_sweep lets_sweep;

/* Runs every experiment in a sweep config (array, or object with "base" and
 * "experiments"). */
LETS_API lets_status lets_sweep_run(const char* configs_json, lets_sweep** out);
LETS_API void lets_sweep_free(lets_sweep* sweep);
LETS_API size_t lets_sweep_count(const lets_sweep* sweep);
LETS_API lets_status lets_sweep_report_json(const lets_sweep* sweep, size_t index,
                                            char** out);
LETS_API lets_status lets_sweep_summary_csv(const lets_sweep* sweep, char** out);
LETS_API lets_status lets_sweep_trials_csv(const lets_sweep* sweep, char** out);

/* ----- one-shot edge-count test ------------------------------------------ */

/* Runs the spanning-tree edge-count test on a labeled CSV dataset
 * (columns f1..fd,z). use_normal_approx selects the limiting-normal p-value
 * instead of the permutation p-value. Returns a JSON summary. */
LETS_API lets_status lets_fr_run_csv(const char* dataset_path, double alpha,
                                     size_t permutations, int use_normal_approx,
                                     uint64_t seed, char** out_json);

/* ----- label-complexity power bounds -------------------------------------- */

typedef struct lets_power_inputs {
    uint64_t n_labels;
    double alpha;
    double mi;     /* feature-label information, nats */
    double delta;  /* extra per-label information from guided queries */
    double eps1;
    double eps2;
    double sigma;  /* information spectrum standard deviation */
} lets_power_inputs;

LETS_API lets_status lets_power_bounds(const lets_power_inputs* inputs,
                                       double* out_guided, double* out_uniform);

/* ----- pools -------------------------------------------------------------- */

typedef struct lets_pool lets_pool;

LETS_API lets_status lets_pool_generate(const char* spec_json, uint64_t seed,
                                        lets_pool** out);
LETS_API lets_status lets_pool_load_csv(const char* path, lets_pool** out);
LETS_API void lets_pool_free(lets_pool* pool);
LETS_API size_t lets_pool_size(const lets_pool* pool);
LETS_API size_t lets_pool_dim(const lets_pool* pool);
LETS_API size_t lets_pool_query_count(const lets_pool* pool);

/* Reveals one label, at most once per index. */
LETS_API lets_status lets_pool_query(lets_pool* pool, size_t index, int* out_label);

#ifdef __cplusplus
}
#endif

#endif /* LETS_C_H */
