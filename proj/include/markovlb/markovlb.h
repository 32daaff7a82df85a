/*
 * markovlb: high-confidence lower bounds on the probability of evidence in
 * discrete Bayesian networks (importance sampling + Markov inequality, with
 * SampleSearch for networks containing zero probabilities).
 *
 * All objects are opaque handles owned by the caller and released with the
 * matching *_free function. Functions return an mlb_status; on failure a
 * description is available from mlb_last_error() on the calling thread.
 * Strings returned through char** out-parameters are released with
 * mlb_string_free().
 */
#ifndef MARKOVLB_MARKOVLB_H
#define MARKOVLB_MARKOVLB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(MARKOVLB_BUILDING)
#    define MLB_API __declspec(dllexport)
#  else
#    define MLB_API __declspec(dllimport)
#  endif
#else
#  define MLB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. The CLI maps them to exit codes 0, 2, 3 and 4. */
typedef enum mlb_status {
  MLB_OK = 0,
  MLB_ERR_INVALID_ARGUMENT = 1,
  MLB_ERR_PARSE = 2,
  MLB_ERR_CAP_EXCEEDED = 3,
  MLB_ERR_UNSATISFIABLE = 4, /* P(e) = 0 proven */
  MLB_ERR_INTERNAL = 5
} mlb_status;

typedef struct mlb_network mlb_network;
typedef struct mlb_evidence mlb_evidence;
typedef struct mlb_experiment mlb_experiment;
typedef struct mlb_report mlb_report;

MLB_API const char* mlb_version(void);
MLB_API const char* mlb_last_error(void);
MLB_API void mlb_string_free(char* s);

/* Networks in UAI BAYES format. */
MLB_API mlb_status mlb_network_parse(const char* text, mlb_network** out);
MLB_API mlb_status mlb_network_load(const char* path, mlb_network** out);
MLB_API void mlb_network_free(mlb_network* net);
MLB_API size_t mlb_network_num_vars(const mlb_network* net);
MLB_API mlb_status mlb_network_serialize(const mlb_network* net, char** out);

/* Evidence in UAI evidence format: "<count> <var> <value> ...". */
MLB_API mlb_status mlb_evidence_parse(const mlb_network* net, const char* text, mlb_evidence** out);
MLB_API mlb_status mlb_evidence_load(const mlb_network* net, const char* path, mlb_evidence** out);
MLB_API mlb_evidence* mlb_evidence_empty(void);
MLB_API void mlb_evidence_free(mlb_evidence* ev);
MLB_API mlb_status mlb_evidence_serialize(const mlb_evidence* ev, char** out);

/* Exact natural-log P(e); method is "ve" or "brute". -INFINITY means P(e) = 0. */
MLB_API mlb_status mlb_exact_log_pe(const mlb_network* net, const mlb_evidence* ev,
                                    const char* method, double* out);

/* Constraint network from the CPT zeros plus evidence clamps, as one-hot DIMACS CNF. */
MLB_API mlb_status mlb_export_cnf(const mlb_network* net, const mlb_evidence* ev, char** out);

/* Random instance generators; both write UAI model and evidence text. */
MLB_API mlb_status mlb_generate_random(int n, int max_domain, double zero_fraction,
                                       int evidence_count, uint64_t seed, char** model_text,
                                       char** evidence_text);
MLB_API mlb_status mlb_generate_two_layer(int roots, int leaves, int parents_per_leaf,
                                          uint64_t seed, char** model_text, char** evidence_text);

/*
 * Experiments are configured by string key/value pairs:
 *   model, evidence           file paths
 *   engine                    importance | samplesearch
 *   proposal                  prior | bp
 *   heuristic                 min | avg | max | perm | ord | all (comma lists allowed)
 *   alpha, k, samples         bound parameters (defaults 2, 7, 100)
 *   order_form                per_term | single_division
 *   seed                      unsigned 64-bit master seed
 *   exact                     off | ve | brute
 *   time_limit                seconds (positive real)
 *   state_cap, factor_cap     exact-inference caps
 *   bp_iters, bp_damping, bp_floor
 *   workers                   threads per bound run
 *   record_timing, self_check true | false
 */
MLB_API mlb_experiment* mlb_experiment_create(void);
MLB_API void mlb_experiment_free(mlb_experiment* exp);
MLB_API mlb_status mlb_experiment_set(mlb_experiment* exp, const char* key, const char* value);

/*
 * Runs the experiment. A report is produced whenever the instance loads,
 * including when the run hits a cap (MLB_ERR_CAP_EXCEEDED) or proves
 * P(e) = 0 (MLB_ERR_UNSATISFIABLE); on parse or argument errors *out is NULL.
 */
MLB_API mlb_status mlb_experiment_run(const mlb_experiment* exp, mlb_report** out);

MLB_API void mlb_report_free(mlb_report* report);
/* format: "json" (single line, sorted keys) or "table". */
MLB_API mlb_status mlb_report_render(const mlb_report* report, const char* format, char** out);
MLB_API int mlb_report_exit_code(const mlb_report* report);
/* Natural-log bound for a heuristic tag; -INFINITY for a trivial bound. */
MLB_API mlb_status mlb_report_log_bound(const mlb_report* report, const char* heuristic, double* out);

#ifdef __cplusplus
}
#endif

#endif /* MARKOVLB_MARKOVLB_H */
