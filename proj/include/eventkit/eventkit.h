/* eventkit C API: event-study analytics for daily asset panels.
 *
 * Conventions
 *   - Every function returns an evk_status; EVK_OK means success.
 *   - On failure, evk_last_error() returns a thread-local message describing
 *     what went wrong; the pointer stays valid until the next failing call
 *     on the same thread.
 *   - Objects are opaque handles created and destroyed by this library.
 *     Destroy functions accept NULL.
 *   - Strings passed in are NUL-terminated UTF-8; strings written out are
 *     NUL-terminated and truncated to the caller's buffer.
 */
#ifndef EVENTKIT_H
#define EVENTKIT_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum evk_status {
  EVK_OK = 0,
  EVK_ERR_IO = 1,
  EVK_ERR_PARSE = 2,
  EVK_ERR_VALIDATION = 3,
  EVK_ERR_CONFLICT = 4,
  EVK_ERR_INVALID_ARGUMENT = 5,
  EVK_ERR_INSUFFICIENT_DATA = 6,
  EVK_ERR_INSUFFICIENT_CLUSTERS = 7,
  EVK_ERR_DEGENERATE = 8,
  EVK_ERR_INFEASIBLE = 9,
  EVK_ERR_INTERNAL = 10,
} evk_status;

const char* evk_version(void);
const char* evk_last_error(void);

/* ------------------------------------------------------------------ */
/* Configuration                                                       */

typedef struct evk_config evk_config;

/* Creates a config holding the built-in defaults (the EVENTKIT_SEED
 * environment variable, when set, overrides the default seed). */
evk_status evk_config_create(evk_config** out);

/* Applies key=value lines from a file ('#' comments allowed). */
evk_status evk_config_load_file(evk_config* cfg, const char* path);

/* Sets one key; unknown keys or malformed values fail. */
evk_status evk_config_set(evk_config* cfg, const char* key, const char* value);

/* 64-bit hash of the canonical serialization; artifacts carry it. */
evk_status evk_config_hash(const evk_config* cfg, uint64_t* out);

void evk_config_free(evk_config* cfg);

/* ------------------------------------------------------------------ */
/* Data handles                                                        */

typedef struct evk_returns evk_returns;
typedef struct evk_events evk_events;
typedef struct evk_cars evk_cars;

/* Loads a long-format price CSV (header
 * asset,date,open,high,low,close,volume) and converts it to daily simple
 * returns. */
evk_status evk_returns_load(const char* prices_csv_path, evk_returns** out);
evk_status evk_returns_shape(const evk_returns* r, size_t* n_assets,
                             size_t* n_dates);
void evk_returns_free(evk_returns* r);

/* Loads an event registry CSV (header
 * id,date,name,category,selection,impact_usd,affected_users,tags) and marks
 * events whose dates fall within overlap_horizon days of each other. */
evk_status evk_events_load(const char* events_csv_path, int overlap_horizon,
                           evk_events** out);
evk_status evk_events_count(const evk_events* e, size_t* out);
void evk_events_free(evk_events* e);

/* ------------------------------------------------------------------ */
/* Abnormal returns                                                    */

typedef struct evk_car_row {
  char event_id[64];
  char asset[32];
  char category[16]; /* Infra_Neg, Infra_Pos, Reg_Neg, Reg_Pos, Placebo */
  char model[16];    /* constant-mean or market */
  int32_t tau1;
  int32_t tau2;
  double car;
  double sigma_car;
  int32_t significant; /* |car| > 2 * sigma_car */
  int32_t n_days;      /* realized event-window days */
} evk_car_row;

/* Runs the full CAR pipeline using the config's model, window, and cap.
 * Excluded-category events are dropped; under-covered (event, asset) pairs
 * are skipped, not errors. */
evk_status evk_cars_compute(const evk_returns* r, const evk_events* e,
                            const evk_config* cfg, evk_cars** out);
evk_status evk_cars_count(const evk_cars* c, size_t* out);
evk_status evk_cars_row(const evk_cars* c, size_t index, evk_car_row* out);
void evk_cars_free(evk_cars* c);

/* Event-level mean CARs for one category, written into caller storage.
 * Call with buf == NULL (or capacity 0) to learn the required length; a
 * non-NULL buffer smaller than that length fails rather than truncating. */
evk_status evk_event_means(const evk_cars* c, const char* category,
                           double* buf, size_t capacity, size_t* n_events);

/* ------------------------------------------------------------------ */
/* Inference                                                           */

typedef struct evk_interval {
  double estimate;
  double se;
  double ci_low;
  double ci_high;
  double p_value;
  int64_t replications;
} evk_interval;

/* Event-level block bootstrap of a category's mean CAR.  weighting is
 * "observation" or "event"; B >= 1000; results are identical for any
 * thread count at a fixed seed. */
evk_status evk_bootstrap_mean(const evk_cars* c, const char* category,
                              const char* weighting, int64_t B, uint64_t seed,
                              double ci_level, int threads, evk_interval* out);

/* Same for the difference of two categories' means. */
evk_status evk_bootstrap_diff(const evk_cars* c, const char* category_a,
                              const char* category_b, const char* weighting,
                              int64_t B, uint64_t seed, double ci_level,
                              int threads, evk_interval* out);

/* Two-sample permutation test on the difference of means; exact when the
 * assignment count is at most max_exact, otherwise Monte Carlo. */
evk_status evk_permutation_test(const double* group_a, size_t n_a,
                                const double* group_b, size_t n_b,
                                uint64_t max_exact, uint64_t seed,
                                double* observed_diff, double* p_value,
                                uint64_t* n_assignments, int32_t* exact);

typedef struct evk_t_result {
  double diff;
  double se;
  double t_stat;
  double df;
  double p_value;
  double ci_low;
  double ci_high;
} evk_t_result;

/* Welch two-sample t-test (unequal variances). */
evk_status evk_welch_t(const double* group_a, size_t n_a,
                       const double* group_b, size_t n_b, double ci_level,
                       evk_t_result* out);

/* Scales a t statistic for cross-sectional correlation: t / sqrt(1+(n-1)*rho). */
evk_status evk_adjust_t(double t, int64_t n, double rho_bar, double* out);

/* ------------------------------------------------------------------ */
/* Power                                                               */

evk_status evk_z_quantile(double p, double* out);
evk_status evk_required_events(double alpha, double power, double d,
                               int64_t* out);
evk_status evk_mde(double alpha, double power, double sigma, int64_t n1,
                   int64_t n2, double* out);

/* ------------------------------------------------------------------ */
/* Pipeline                                                            */

/* Executes one subcommand (cars, bootstrap, diff, permute, im, placebo,
 * loo, sweep-window, sweep-cap, subsample, decompose, power, calibrate,
 * report) against the config, writing artifacts under the config's out
 * directory.  The one-line outcome summary is copied into `summary`. */
evk_status evk_run(const evk_config* cfg, const char* subcommand,
                   char* summary, size_t summary_capacity);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* EVENTKIT_H */
