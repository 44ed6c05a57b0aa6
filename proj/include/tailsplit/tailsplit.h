/* C interface to the tailsplit library. Every function returns a ts_status;
 * on failure ts_last_error() holds a message for the calling thread.
 * Strings are written into caller buffers: *needed receives the length
 * including the terminating NUL, and buf may be NULL with cap 0 to query it. */
#ifndef TAILSPLIT_H
#define TAILSPLIT_H

#include <stddef.h>
#include <stdint.h>

#if defined(TAILSPLIT_BUILDING_LIBRARY)
#define TS_API __attribute__((visibility("default")))
#else
#define TS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ts_status {
  TS_OK = 0,
  TS_ERR_INVALID_ARGUMENT = 1, /* null pointer, malformed JSON, short buffer */
  TS_ERR_DOMAIN = 2,           /* parameter outside the operation's domain */
  TS_ERR_REGIME = 3,           /* tail index incompatible with the regime */
  TS_ERR_NUMERICAL = 4,        /* quadrature budget exhausted */
  TS_ERR_DIVERGENCE = 5,       /* transform argument below the mixing law's floor */
  TS_ERR_UNSUPPORTED = 6,
  TS_ERR_INTERNAL = 7
} ts_status;

typedef enum ts_variant { TS_VARIANT_CONSISTENT = 0, TS_VARIANT_LITERAL = 1 } ts_variant;
typedef enum ts_lepage_tail { TS_LEPAGE_DROP = 0, TS_LEPAGE_MEAN_CORRECT = 1 } ts_lepage_tail;

typedef struct ts_tail_model ts_tail_model;
typedef struct ts_mixing_law ts_mixing_law;
typedef struct ts_regime ts_regime;
typedef struct ts_sample_set ts_sample_set;
typedef struct ts_report ts_report;

TS_API const char* ts_version(void);
TS_API const char* ts_status_string(ts_status status);
TS_API const char* ts_last_error(void);
/* Best estimate and error bound carried by the last TS_ERR_NUMERICAL. */
TS_API void ts_last_numerical_estimate(double* estimate, double* error_bound);
/* Worker threads for simulations; 0 picks the hardware concurrency. */
TS_API void ts_set_threads(unsigned threads);

/* Tail models */
TS_API ts_status ts_tail_model_pareto(double alpha, double x_min, ts_tail_model** out);
TS_API ts_status ts_tail_model_log_power(double alpha, double rho, double x_min, ts_tail_model** out);
TS_API ts_status ts_tail_model_from_json(const char* json, ts_tail_model** out);
TS_API ts_status ts_tail_model_to_json(const ts_tail_model* m, char* buf, size_t cap, size_t* needed);
TS_API void ts_tail_model_free(ts_tail_model* m);
TS_API ts_status ts_tail_model_alpha(const ts_tail_model* m, double* alpha);
TS_API ts_status ts_survival(const ts_tail_model* m, double x, double* out);
TS_API ts_status ts_tail_quantile(const ts_tail_model* m, double y, double* out);
TS_API ts_status ts_quantile(const ts_tail_model* m, double p, double* out);
/* E{X; X <= x} and E{X; X > x}. */
TS_API ts_status ts_truncated_means(const ts_tail_model* m, double x, double* lower, double* upper);
TS_API ts_status ts_claim_moments(const ts_tail_model* m, double* mean, double* variance);

/* Mixing laws for the Poisson intensity */
TS_API ts_status ts_mixing_law_degenerate(double theta, ts_mixing_law** out);
TS_API ts_status ts_mixing_law_gamma(double shape, double rate, ts_mixing_law** out);
TS_API ts_status ts_mixing_law_discrete(const double* values, const double* probs, size_t n,
                                        ts_mixing_law** out);
/* JSON object or shorthand such as "gamma:2,2" or "discrete:1@0.5,3@0.5". */
TS_API ts_status ts_mixing_law_parse(const char* text, ts_mixing_law** out);
TS_API ts_status ts_mixing_law_to_json(const ts_mixing_law* mix, char* buf, size_t cap, size_t* needed);
TS_API void ts_mixing_law_free(ts_mixing_law* mix);
/* q_r(w) = E{e^{-w Theta} Theta^r} */
TS_API ts_status ts_q(const ts_mixing_law* mix, unsigned r, double w, double* out);
TS_API ts_status ts_theta_moment(const ts_mixing_law* mix, double c, double* out);

/* Finite horizon */
TS_API ts_status ts_pgf_derivative(const ts_mixing_law* mix, double t, unsigned r, double z, double* out);
TS_API ts_status ts_count_pmf(const ts_mixing_law* mix, double t, unsigned n, double* out);
TS_API ts_status ts_lt_exact(const ts_tail_model* m, const ts_mixing_law* mix, double t, unsigned s,
                             double u, double v, double w, double* value, double* abs_err);

typedef struct ts_component_means {
  double lambda; /* sum of the s largest claims */
  double xi;     /* (s+1)-th largest */
  double sigma;  /* sum of the rest */
  double total;
} ts_component_means;

TS_API ts_status ts_component_means_eval(const ts_tail_model* m, const ts_mixing_law* mix, double t,
                                         unsigned s, ts_component_means* out);

/* Regimes and limit transforms */
TS_API ts_status ts_regime_create(const char* name, unsigned s, double p, double p_exponent,
                                  ts_regime** out);
TS_API ts_status ts_regime_from_json(const char* json, ts_regime** out);
TS_API ts_status ts_regime_to_json(const ts_regime* r, char* buf, size_t cap, size_t* needed);
TS_API void ts_regime_free(ts_regime* r);
/* {"lambda": "U(t)", "xi": ..., "sigma": ..., "sigma_centered": bool} */
TS_API ts_status ts_normalization(const ts_regime* r, char* buf, size_t cap, size_t* needed);
/* Scales for (lambda, xi, sigma) at horizon t. */
TS_API ts_status ts_normalizer_values(const ts_regime* r, const ts_tail_model* m, double t,
                                      double out[3]);
TS_API ts_status ts_lt_limit(const ts_regime* r, const ts_tail_model* m, const ts_mixing_law* mix,
                             double u, double v, double w, ts_variant variant, double* out);
TS_API ts_status ts_inner_tail_integral(double c, double alpha, double* out);
TS_API ts_status ts_inner_head_integral(double c, double alpha, double* out);
TS_API ts_status ts_inner_centered_integral(double c, double alpha, double* out);

/* Moments of the limit variables */
TS_API ts_status ts_c_coeff(unsigned i, unsigned j, double gamma, double* out);
TS_API ts_status ts_ratio_moment(unsigned s, unsigned k, double gamma, double* out);
TS_API ts_status ts_ratio_moment_exact(unsigned s, unsigned k, int64_t gamma_num, int64_t gamma_den,
                                       int64_t* num, int64_t* den);
TS_API ts_status ts_ratio_variance(unsigned s, double gamma, double* out);

typedef struct ts_correlation {
  double rho;
  double rho_from_moments;
  double covariance;
  double mean_r2_t;
  double mean_r2;
  double var_r2;
  double mean_t;
  double var_t;
} ts_correlation;

TS_API ts_status ts_correlation_r0sq_tinf(double gamma, ts_correlation* out);
TS_API ts_status ts_t_infinity_moments(double alpha, double* mean, double* variance);
TS_API ts_status ts_sum_over_max_mean(unsigned s, const ts_tail_model* m, const ts_mixing_law* mix,
                                      ts_variant variant, double* out);
TS_API ts_status ts_max_over_sum_mean(const ts_tail_model* m, const ts_mixing_law* mix, unsigned s,
                                      double* out);
TS_API ts_status ts_mean_xi_plus_sigma(unsigned s, double gamma, const ts_mixing_law* mix, double* out);
TS_API ts_status ts_centered_ratio_mean(unsigned s, double gamma, double* out);

/* Simulation */
TS_API ts_status ts_simulate_paths(const ts_regime* r, const ts_tail_model* m, const ts_mixing_law* mix,
                                   double t, size_t n, uint64_t seed, int condition_on_min_count,
                                   ts_sample_set** out);
TS_API void ts_sample_set_free(ts_sample_set* set);
TS_API size_t ts_sample_set_size(const ts_sample_set* set);
/* (lambda, xi, sigma) of draw i, already normalized. */
TS_API ts_status ts_sample_set_get(const ts_sample_set* set, size_t i, double triple[3]);
TS_API ts_status ts_sample_set_redraw_rate(const ts_sample_set* set, double* out);
TS_API size_t ts_sample_set_warning_count(const ts_sample_set* set);
TS_API const char* ts_sample_set_warning(const ts_sample_set* set, size_t i);
TS_API ts_status ts_empirical_lt(const ts_sample_set* set, double u, double v, double w, double* value,
                                 double* std_error);

typedef struct ts_estimate {
  double value;
  double std_error;
} ts_estimate;

#define TS_MAX_RAW_MOMENTS 8

typedef struct ts_ratio_stats {
  unsigned s;
  size_t n;
  ts_estimate mean;
  ts_estimate variance;
  unsigned kmax;
  ts_estimate raw_moments[TS_MAX_RAW_MOMENTS]; /* E{R^k}, k = 1..kmax */
  double min_value;
} ts_ratio_stats;

typedef struct ts_t_infinity_stats {
  size_t n;
  ts_estimate mean;
  ts_estimate variance;
  ts_estimate correlation_with_r0_squared;
  double min_value;
  double max_value;
} ts_t_infinity_stats;

/* LePage series draws truncated at K terms. kmax above 4 needs allow_high_moments. */
TS_API ts_status ts_simulate_ratio(double alpha, unsigned s, size_t K, ts_lepage_tail tail, size_t n,
                                   uint64_t seed, unsigned kmax, int allow_high_moments,
                                   ts_ratio_stats* out);
TS_API ts_status ts_simulate_t_infinity(double alpha, size_t K, ts_lepage_tail tail, size_t n,
                                        uint64_t seed, ts_t_infinity_stats* out);

/* Convergence of simulated transforms to the limit over a grid of horizons.
 * queries holds nq (u, v, w) triples. */
TS_API ts_status ts_convergence_report(const ts_regime* r, const ts_tail_model* m, const ts_mixing_law* mix,
                                       const double* t_grid, size_t nt, const double* queries, size_t nq,
                                       size_t n_per_t, uint64_t seed, ts_variant variant, ts_report** out);
TS_API void ts_report_free(ts_report* rep);

typedef struct ts_report_row {
  double t, u, v, w, empirical, std_error, limit, gap;
} ts_report_row;

typedef struct ts_horizon {
  double t;
  double median_gap;
  double median_std_error;
  double redraw_rate;
} ts_horizon;

TS_API size_t ts_report_row_count(const ts_report* rep);
TS_API ts_status ts_report_row_get(const ts_report* rep, size_t i, ts_report_row* out);
TS_API size_t ts_report_horizon_count(const ts_report* rep);
TS_API ts_status ts_report_horizon_get(const ts_report* rep, size_t i, ts_horizon* out);
TS_API ts_status ts_report_flags(const ts_report* rep, int* flagged, int* strictly_nonincreasing);
TS_API size_t ts_report_warning_count(const ts_report* rep);
TS_API const char* ts_report_warning(const ts_report* rep, size_t i);

/* Runs the built-in identity checks. Writes a JSON array of
 * {"name", "passed", "detail"} objects and sets *all_passed. */
TS_API ts_status ts_run_identity_suite(char* buf, size_t cap, size_t* needed, int* all_passed);

#ifdef __cplusplus
}
#endif

#endif
