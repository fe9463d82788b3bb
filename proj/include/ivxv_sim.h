/* C interface to the IVXV ceremony simulator.
 *
 * Objects are opaque handles released with the matching *_free function.
 * Every fallible call returns an ivxv_status; on failure ivxv_last_error()
 * describes the most recent error on the calling thread. Strings returned
 * through char** are owned by the caller and released with ivxv_string_free. */
#ifndef IVXV_SIM_H
#define IVXV_SIM_H

#include <stddef.h>
#include <stdint.h>

#if defined(IVXV_BUILDING_LIBRARY)
#define IVXV_API __attribute__((visibility("default")))
#else
#define IVXV_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ivxv_status {
  IVXV_OK = 0,
  IVXV_E_INVALID_ARGUMENT = 1,
  IVXV_E_UNKNOWN_PRESET = 2,
  IVXV_E_INVALID_PARAMS = 3,
  IVXV_E_MESSAGE_OUT_OF_RANGE = 4,
  IVXV_E_NOT_A_CANDIDATE = 5,
  IVXV_E_RANDOMNESS_MISMATCH = 6,
  IVXV_E_THRESHOLD_EXCEEDS_SHARES = 7,
  IVXV_E_INSUFFICIENT_SHARES = 8,
  IVXV_E_DUPLICATE_SHARE = 9,
  IVXV_E_BAD_WITNESS = 10,
  IVXV_E_MALFORMED = 11,
  IVXV_E_INVALID_SESSION = 12,
  IVXV_E_ACCESS_DENIED = 13,
  IVXV_E_NOT_READY = 14,
  IVXV_E_THRESHOLD_NOT_MET = 15,
  IVXV_E_MISSING_SHUFFLE = 16,
  IVXV_E_UNKNOWN_SSID = 17,
  IVXV_E_UNAUTHORIZED = 18,
  IVXV_E_INVALID_DISTRIBUTION = 19,
  IVXV_E_INVALID_POLICY = 20,
  IVXV_E_HISTORY_TOO_LONG = 21,
  IVXV_E_MAX_LEN_EXCEEDED = 22,
  IVXV_E_CONFIG = 23,
  IVXV_E_IO = 24,
  IVXV_E_PROTOCOL = 25,
  IVXV_E_INTERNAL = 99
} ivxv_status;

typedef struct ivxv_distribution ivxv_distribution;
typedef struct ivxv_policy ivxv_policy;
typedef struct ivxv_config ivxv_config;
typedef struct ivxv_election ivxv_election;

typedef struct ivxv_outcomes {
  double success;
  double caught;
  double silent_fail;
} ivxv_outcomes;

typedef struct ivxv_attack_report {
  uint64_t k;
  double p;
  double analytic_undetected;
  double empirical_detected;
  double standard_error;
  uint64_t trials;
  uint64_t detections;
  uint64_t surviving_manipulations;
} ivxv_attack_report;

typedef struct ivxv_replay_report {
  int matches;
  int recomputed_valid;
  const char* recomputed_reason; /* static storage */
  int recorded_valid;
  const char* recorded_reason;
} ivxv_replay_report;

IVXV_API const char* ivxv_version(void);
IVXV_API const char* ivxv_last_error(void);
IVXV_API const char* ivxv_status_name(ivxv_status status);
IVXV_API void ivxv_string_free(char* s);

/* Behaviour distributions. "default" loads the built-in aggregate. */
IVXV_API ivxv_status ivxv_distribution_default(ivxv_distribution** out);
IVXV_API ivxv_status ivxv_distribution_parse(const char* csv, ivxv_distribution** out);
IVXV_API ivxv_status ivxv_distribution_load(const char* path_or_default, ivxv_distribution** out);
IVXV_API ivxv_status ivxv_distribution_csv(const ivxv_distribution* d, char** out);
IVXV_API void ivxv_distribution_free(ivxv_distribution* d);

/* Manipulation policies: "always", "never" or a CSV path. */
IVXV_API ivxv_status ivxv_policy_resolve(const char* name_or_path, ivxv_policy** out);
IVXV_API ivxv_status ivxv_policy_parse(const char* csv, ivxv_policy** out);
IVXV_API ivxv_status ivxv_policy_name(const ivxv_policy* p, char** out);
IVXV_API ivxv_status ivxv_policy_csv(const ivxv_policy* p, char** out);
IVXV_API void ivxv_policy_free(ivxv_policy* p);

/* Pattern-level analysis. */
IVXV_API ivxv_status ivxv_outcome_probabilities(const ivxv_policy* p, const ivxv_distribution* d, ivxv_outcomes* out);
IVXV_API ivxv_status ivxv_analytic_success(const ivxv_policy* p, const ivxv_distribution* d, double* out);
IVXV_API ivxv_status ivxv_optimal_policy(const ivxv_distribution* d, unsigned max_len, ivxv_policy** policy,
                                         double* success, uint64_t* examined);
IVXV_API ivxv_status ivxv_monte_carlo_success(const ivxv_policy* p, const ivxv_distribution* d, uint64_t trials,
                                              uint64_t seed, double* estimate, double* standard_error);
IVXV_API ivxv_status ivxv_undetected_probability(double p, uint64_t k, double* out);
IVXV_API ivxv_status ivxv_detection_probability(double p, uint64_t k, double* out);

/* Election configuration (JSON). base_dir resolves relative file names and
 * may be NULL. */
IVXV_API ivxv_status ivxv_config_load(const char* path, ivxv_config** out);
IVXV_API ivxv_status ivxv_config_parse(const char* json_text, const char* base_dir, ivxv_config** out);
IVXV_API ivxv_status ivxv_config_set_seed(ivxv_config* c, uint64_t seed);
IVXV_API ivxv_status ivxv_config_seed(const ivxv_config* c, uint64_t* out);
IVXV_API ivxv_status ivxv_config_json(const ivxv_config* c, char** out);
IVXV_API void ivxv_config_free(ivxv_config* c);

/* Full ceremony runs. */
IVXV_API ivxv_status ivxv_election_run(const ivxv_config* c, ivxv_election** out);
IVXV_API ivxv_status ivxv_election_verdict(const ivxv_election* e, int* valid, const char** reason);
IVXV_API ivxv_status ivxv_election_tally_json(const ivxv_election* e, char** out);
IVXV_API ivxv_status ivxv_election_summary_json(const ivxv_election* e, char** out);
IVXV_API ivxv_status ivxv_election_transcript(const ivxv_election* e, char** out);
IVXV_API ivxv_status ivxv_election_write_transcript(const ivxv_election* e, const char* path);
IVXV_API void ivxv_election_free(ivxv_election* e);

/* Re-runs the auditor over a stored transcript. */
IVXV_API ivxv_status ivxv_replay_file(const char* path, ivxv_replay_report* out);
IVXV_API ivxv_status ivxv_replay_text(const char* jsonl, ivxv_replay_report* out);

IVXV_API ivxv_status ivxv_attack(const ivxv_config* c, const ivxv_policy* p, uint64_t k, uint64_t trials,
                                 ivxv_attack_report* out);

#ifdef __cplusplus
}
#endif

#endif /* IVXV_SIM_H */
