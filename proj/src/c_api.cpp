#include "tailsplit/tailsplit.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <limits>
#include <new>
#include <string>

#include "tailsplit/errors.hpp"
#include "tailsplit/finite_t.hpp"
#include "tailsplit/identity_suite.hpp"
#include "tailsplit/limit_lt.hpp"
#include "tailsplit/mixing_law.hpp"
#include "tailsplit/moments.hpp"
#include "tailsplit/montecarlo.hpp"
#include "tailsplit/spec_json.hpp"
#include "tailsplit/tail_model.hpp"

struct ts_tail_model {
  tailsplit::TailModel model;
};
struct ts_mixing_law {
  tailsplit::MixingLaw mix;
};
struct ts_regime {
  tailsplit::Regime regime;
};
struct ts_sample_set {
  tailsplit::SampleSet set;
};
struct ts_report {
  tailsplit::ConvergenceReport report;
};

namespace {

using namespace tailsplit;

thread_local std::string g_last_error;
thread_local double g_last_estimate = std::numeric_limits<double>::quiet_NaN();
thread_local double g_last_bound = std::numeric_limits<double>::quiet_NaN();
std::atomic<unsigned> g_threads{0};

struct InvalidArgument {
  const char* what;
};

ts_status fail(ts_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs body, translating the library's exceptions into status codes.
template <class F>
ts_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return TS_OK;
  } catch (const InvalidArgument& e) {
    return fail(TS_ERR_INVALID_ARGUMENT, e.what);
  } catch (const RegimeError& e) {
    return fail(TS_ERR_REGIME, e.what());
  } catch (const DomainError& e) {
    return fail(TS_ERR_DOMAIN, e.what());
  } catch (const NumericalError& e) {
    g_last_estimate = e.estimate();
    g_last_bound = e.error_bound();
    return fail(TS_ERR_NUMERICAL, e.what());
  } catch (const DivergenceError& e) {
    return fail(TS_ERR_DIVERGENCE, e.what());
  } catch (const UnsupportedError& e) {
    return fail(TS_ERR_UNSUPPORTED, e.what());
  } catch (const std::bad_alloc&) {
    return fail(TS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(TS_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(TS_ERR_INTERNAL, "unknown error");
  }
}

template <class T>
void require(const T* p, const char* name) {
  if (p == nullptr) throw InvalidArgument{name};
}

void write_string(const std::string& s, char* buf, std::size_t cap, std::size_t* needed) {
  if (needed != nullptr) *needed = s.size() + 1;
  if (buf == nullptr && cap == 0) return;
  if (buf == nullptr) throw InvalidArgument{"buffer is null"};
  if (cap < s.size() + 1) throw InvalidArgument{"buffer too small"};
  std::memcpy(buf, s.data(), s.size());
  buf[s.size()] = '\0';
}

FormulaVariant to_variant(ts_variant v) {
  switch (v) {
    case TS_VARIANT_CONSISTENT: return FormulaVariant::Consistent;
    case TS_VARIANT_LITERAL: return FormulaVariant::Literal;
  }
  throw InvalidArgument{"unknown formula variant"};
}

LePageConfig lepage_config(std::size_t K, ts_lepage_tail tail) {
  LePageConfig cfg;
  if (K < 1) throw InvalidArgument{"K must be positive"};
  cfg.K = K;
  switch (tail) {
    case TS_LEPAGE_DROP: cfg.tail_mode = LePageTail::Drop; break;
    case TS_LEPAGE_MEAN_CORRECT: cfg.tail_mode = LePageTail::MeanCorrect; break;
    default: throw InvalidArgument{"unknown LePage tail mode"};
  }
  return cfg;
}

ts_estimate to_c(const Estimate& e) { return {e.value, e.std_error}; }

}  // namespace

extern "C" {

const char* ts_version(void) { return "1.0.0"; }

const char* ts_status_string(ts_status status) {
  switch (status) {
    case TS_OK: return "ok";
    case TS_ERR_INVALID_ARGUMENT: return "invalid argument";
    case TS_ERR_DOMAIN: return "domain error";
    case TS_ERR_REGIME: return "regime mismatch";
    case TS_ERR_NUMERICAL: return "numerical failure";
    case TS_ERR_DIVERGENCE: return "divergent transform";
    case TS_ERR_UNSUPPORTED: return "unsupported";
    case TS_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* ts_last_error(void) { return g_last_error.c_str(); }

void ts_last_numerical_estimate(double* estimate, double* error_bound) {
  if (estimate != nullptr) *estimate = g_last_estimate;
  if (error_bound != nullptr) *error_bound = g_last_bound;
}

void ts_set_threads(unsigned threads) { g_threads = threads; }

// ---- tail models

ts_status ts_tail_model_pareto(double alpha, double x_min, ts_tail_model** out) {
  return guarded([&] {
    require(out, "out is null");
    *out = new ts_tail_model{TailModel::pareto(alpha, x_min)};
  });
}

ts_status ts_tail_model_log_power(double alpha, double rho, double x_min, ts_tail_model** out) {
  return guarded([&] {
    require(out, "out is null");
    *out = new ts_tail_model{TailModel::log_power(alpha, rho, x_min)};
  });
}

ts_status ts_tail_model_from_json(const char* json, ts_tail_model** out) {
  return guarded([&] {
    require(json, "json is null");
    require(out, "out is null");
    *out = new ts_tail_model{tail_model_from_json(parse_json(json))};
  });
}

ts_status ts_tail_model_to_json(const ts_tail_model* m, char* buf, size_t cap, size_t* needed) {
  return guarded([&] {
    require(m, "model is null");
    write_string(to_json(m->model).dump(), buf, cap, needed);
  });
}

void ts_tail_model_free(ts_tail_model* m) { delete m; }

ts_status ts_tail_model_alpha(const ts_tail_model* m, double* alpha) {
  return guarded([&] {
    require(m, "model is null");
    require(alpha, "out is null");
    *alpha = m->model.alpha();
  });
}

ts_status ts_survival(const ts_tail_model* m, double x, double* out) {
  return guarded([&] {
    require(m, "model is null");
    require(out, "out is null");
    *out = m->model.survival(x);
  });
}

ts_status ts_tail_quantile(const ts_tail_model* m, double y, double* out) {
  return guarded([&] {
    require(m, "model is null");
    require(out, "out is null");
    *out = m->model.tail_quantile(y);
  });
}

ts_status ts_quantile(const ts_tail_model* m, double p, double* out) {
  return guarded([&] {
    require(m, "model is null");
    require(out, "out is null");
    *out = m->model.quantile(p);
  });
}

ts_status ts_truncated_means(const ts_tail_model* m, double x, double* lower, double* upper) {
  return guarded([&] {
    require(m, "model is null");
    require(lower, "lower is null");
    require(upper, "upper is null");
    auto tm = m->model.truncated_means(x);
    *lower = tm.lower;
    *upper = tm.upper;
  });
}

ts_status ts_claim_moments(const ts_tail_model* m, double* mean, double* variance) {
  return guarded([&] {
    require(m, "model is null");
    if (mean != nullptr) *mean = m->model.mean();
    if (variance != nullptr) *variance = m->model.variance();
  });
}

// ---- mixing laws

ts_status ts_mixing_law_degenerate(double theta, ts_mixing_law** out) {
  return guarded([&] {
    require(out, "out is null");
    *out = new ts_mixing_law{MixingLaw::degenerate(theta)};
  });
}

ts_status ts_mixing_law_gamma(double shape, double rate, ts_mixing_law** out) {
  return guarded([&] {
    require(out, "out is null");
    *out = new ts_mixing_law{MixingLaw::gamma(shape, rate)};
  });
}

ts_status ts_mixing_law_discrete(const double* values, const double* probs, size_t n, ts_mixing_law** out) {
  return guarded([&] {
    require(out, "out is null");
    if (n > 0) {
      require(values, "values is null");
      require(probs, "probs is null");
    }
    std::vector<Atom> atoms;
    for (size_t i = 0; i < n; ++i) atoms.push_back({values[i], probs[i]});
    *out = new ts_mixing_law{MixingLaw::discrete(std::move(atoms))};
  });
}

ts_status ts_mixing_law_parse(const char* text, ts_mixing_law** out) {
  return guarded([&] {
    require(text, "text is null");
    require(out, "out is null");
    *out = new ts_mixing_law{parse_mixing_law(text)};
  });
}

ts_status ts_mixing_law_to_json(const ts_mixing_law* mix, char* buf, size_t cap, size_t* needed) {
  return guarded([&] {
    require(mix, "mixing law is null");
    write_string(to_json(mix->mix).dump(), buf, cap, needed);
  });
}

void ts_mixing_law_free(ts_mixing_law* mix) { delete mix; }

ts_status ts_q(const ts_mixing_law* mix, unsigned r, double w, double* out) {
  return guarded([&] {
    require(mix, "mixing law is null");
    require(out, "out is null");
    *out = mix->mix.q(r, w);
  });
}

ts_status ts_theta_moment(const ts_mixing_law* mix, double c, double* out) {
  return guarded([&] {
    require(mix, "mixing law is null");
    require(out, "out is null");
    *out = mix->mix.theta_moment(c);
  });
}

// ---- finite horizon

ts_status ts_pgf_derivative(const ts_mixing_law* mix, double t, unsigned r, double z, double* out) {
  return guarded([&] {
    require(mix, "mixing law is null");
    require(out, "out is null");
    *out = pgf_derivative(CountingSpec(mix->mix, t), r, z);
  });
}

ts_status ts_count_pmf(const ts_mixing_law* mix, double t, unsigned n, double* out) {
  return guarded([&] {
    require(mix, "mixing law is null");
    require(out, "out is null");
    *out = count_pmf(CountingSpec(mix->mix, t), n);
  });
}

ts_status ts_lt_exact(const ts_tail_model* m, const ts_mixing_law* mix, double t, unsigned s, double u,
                      double v, double w, double* value, double* abs_err) {
  return guarded([&] {
    require(m, "model is null");
    require(mix, "mixing law is null");
    require(value, "value is null");
    auto lt = exact_joint_lt(CountingSpec(mix->mix, t), m->model, {u, v, w, s});
    *value = lt.value;
    if (abs_err != nullptr) *abs_err = lt.abs_err_est;
  });
}

ts_status ts_component_means_eval(const ts_tail_model* m, const ts_mixing_law* mix, double t, unsigned s,
                                  ts_component_means* out) {
  return guarded([&] {
    require(m, "model is null");
    require(mix, "mixing law is null");
    require(out, "out is null");
    auto cm = component_means(CountingSpec(mix->mix, t), m->model, s);
    *out = {cm.lambda, cm.xi, cm.sigma, cm.total};
  });
}

// ---- regimes and limits

ts_status ts_regime_create(const char* name, unsigned s, double p, double p_exponent, ts_regime** out) {
  return guarded([&] {
    require(name, "name is null");
    require(out, "out is null");
    *out = new ts_regime{Regime::from_name(name, s, p, p_exponent)};
  });
}

ts_status ts_regime_from_json(const char* json, ts_regime** out) {
  return guarded([&] {
    require(json, "json is null");
    require(out, "out is null");
    *out = new ts_regime{regime_from_json(parse_json(json))};
  });
}

ts_status ts_regime_to_json(const ts_regime* r, char* buf, size_t cap, size_t* needed) {
  return guarded([&] {
    require(r, "regime is null");
    write_string(to_json(r->regime).dump(), buf, cap, needed);
  });
}

void ts_regime_free(ts_regime* r) { delete r; }

ts_status ts_normalization(const ts_regime* r, char* buf, size_t cap, size_t* needed) {
  return guarded([&] {
    require(r, "regime is null");
    auto d = normalization_descriptor(r->regime);
    Json j = {{"lambda", describe(d.lambda)},
              {"xi", describe(d.xi)},
              {"sigma", describe(d.sigma)},
              {"sigma_centered", d.sigma_centered}};
    write_string(j.dump(), buf, cap, needed);
  });
}

ts_status ts_normalizer_values(const ts_regime* r, const ts_tail_model* m, double t, double out[3]) {
  return guarded([&] {
    require(r, "regime is null");
    require(m, "model is null");
    require(out, "out is null");
    auto nv = normalizer_values(r->regime, m->model, t);
    out[0] = nv.lambda;
    out[1] = nv.xi;
    out[2] = nv.sigma;
  });
}

ts_status ts_lt_limit(const ts_regime* r, const ts_tail_model* m, const ts_mixing_law* mix, double u,
                      double v, double w, ts_variant variant, double* out) {
  return guarded([&] {
    require(r, "regime is null");
    require(m, "model is null");
    require(mix, "mixing law is null");
    require(out, "out is null");
    LimitOptions opts;
    opts.variant = to_variant(variant);
    *out = lt_eval(r->regime, m->model, mix->mix, u, v, w, opts);
  });
}

ts_status ts_inner_tail_integral(double c, double alpha, double* out) {
  return guarded([&] {
    require(out, "out is null");
    *out = inner_tail_integral(c, alpha);
  });
}

ts_status ts_inner_head_integral(double c, double alpha, double* out) {
  return guarded([&] {
    require(out, "out is null");
    *out = inner_head_integral(c, alpha);
  });
}

ts_status ts_inner_centered_integral(double c, double alpha, double* out) {
  return guarded([&] {
    require(out, "out is null");
    *out = inner_centered_integral(c, alpha);
  });
}

// ---- moments

ts_status ts_c_coeff(unsigned i, unsigned j, double gamma, double* out) {
  return guarded([&] {
    require(out, "out is null");
    *out = c_coeff(i, j, gamma);
  });
}

ts_status ts_ratio_moment(unsigned s, unsigned k, double gamma, double* out) {
  return guarded([&] {
    require(out, "out is null");
    *out = ratio_moment(s, k, gamma);
  });
}

ts_status ts_ratio_moment_exact(unsigned s, unsigned k, int64_t gamma_num, int64_t gamma_den, int64_t* num,
                                int64_t* den) {
  return guarded([&] {
    require(num, "num is null");
    require(den, "den is null");
    if (gamma_den == 0) throw InvalidArgument{"gamma denominator is zero"};
    Rational r = ratio_moment_exact(s, k, Rational(gamma_num, gamma_den));
    *num = r.numerator();
    *den = r.denominator();
  });
}

ts_status ts_ratio_variance(unsigned s, double gamma, double* out) {
  return guarded([&] {
    require(out, "out is null");
    *out = ratio_variance(s, gamma).gamma_form;
  });
}

ts_status ts_correlation_r0sq_tinf(double gamma, ts_correlation* out) {
  return guarded([&] {
    require(out, "out is null");
    auto c = correlation_r0sq_tinf(gamma);
    *out = {c.rho, c.rho_from_moments, c.covariance, c.mean_r2_t, c.mean_r2, c.var_r2, c.mean_t, c.var_t};
  });
}

ts_status ts_t_infinity_moments(double alpha, double* mean, double* variance) {
  return guarded([&] {
    if (mean != nullptr) *mean = t_infinity_mean(alpha);
    if (variance != nullptr) *variance = t_infinity_variance(alpha);
  });
}

ts_status ts_sum_over_max_mean(unsigned s, const ts_tail_model* m, const ts_mixing_law* mix, ts_variant variant,
                               double* out) {
  return guarded([&] {
    require(m, "model is null");
    require(mix, "mixing law is null");
    require(out, "out is null");
    *out = sum_over_max_mean(s, m->model, mix->mix, to_variant(variant));
  });
}

ts_status ts_max_over_sum_mean(const ts_tail_model* m, const ts_mixing_law* mix, unsigned s, double* out) {
  return guarded([&] {
    require(m, "model is null");
    require(mix, "mixing law is null");
    require(out, "out is null");
    *out = max_over_sum_mean(m->model, mix->mix, s);
  });
}

ts_status ts_mean_xi_plus_sigma(unsigned s, double gamma, const ts_mixing_law* mix, double* out) {
  return guarded([&] {
    require(mix, "mixing law is null");
    require(out, "out is null");
    *out = mean_xi_plus_sigma(s, gamma, mix->mix);
  });
}

ts_status ts_centered_ratio_mean(unsigned s, double gamma, double* out) {
  return guarded([&] {
    require(out, "out is null");
    *out = centered_ratio_mean(s, gamma);
  });
}

// ---- simulation

ts_status ts_simulate_paths(const ts_regime* r, const ts_tail_model* m, const ts_mixing_law* mix, double t,
                            size_t n, uint64_t seed, int condition_on_min_count, ts_sample_set** out) {
  return guarded([&] {
    require(r, "regime is null");
    require(m, "model is null");
    require(mix, "mixing law is null");
    require(out, "out is null");
    PathOptions opts;
    opts.condition_on_min_count = condition_on_min_count != 0;
    *out = new ts_sample_set{simulate_paths(m->model, mix->mix, r->regime, t, n, seed, opts, g_threads)};
  });
}

void ts_sample_set_free(ts_sample_set* set) { delete set; }

size_t ts_sample_set_size(const ts_sample_set* set) { return set == nullptr ? 0 : set->set.samples.size(); }

ts_status ts_sample_set_get(const ts_sample_set* set, size_t i, double triple[3]) {
  return guarded([&] {
    require(set, "sample set is null");
    require(triple, "out is null");
    if (i >= set->set.samples.size()) throw InvalidArgument{"index out of range"};
    const auto& s = set->set.samples[i];
    triple[0] = s.lambda_part;
    triple[1] = s.xi_part;
    triple[2] = s.sigma_part;
  });
}

ts_status ts_sample_set_redraw_rate(const ts_sample_set* set, double* out) {
  return guarded([&] {
    require(set, "sample set is null");
    require(out, "out is null");
    *out = set->set.redraw_rate;
  });
}

size_t ts_sample_set_warning_count(const ts_sample_set* set) {
  return set == nullptr ? 0 : set->set.warnings.size();
}

const char* ts_sample_set_warning(const ts_sample_set* set, size_t i) {
  if (set == nullptr || i >= set->set.warnings.size()) return nullptr;
  return set->set.warnings[i].c_str();
}

ts_status ts_empirical_lt(const ts_sample_set* set, double u, double v, double w, double* value,
                          double* std_error) {
  return guarded([&] {
    require(set, "sample set is null");
    require(value, "value is null");
    auto e = empirical_lt(set->set.samples, u, v, w);
    *value = e.value;
    if (std_error != nullptr) *std_error = e.std_error;
  });
}

ts_status ts_simulate_ratio(double alpha, unsigned s, size_t K, ts_lepage_tail tail, size_t n, uint64_t seed,
                            unsigned kmax, int allow_high_moments, ts_ratio_stats* out) {
  return guarded([&] {
    require(out, "out is null");
    auto study = lepage_study(alpha, {s}, lepage_config(K, tail), n, seed, kmax, allow_high_moments != 0,
                              g_threads);
    const auto& r = study.ratios.at(0);
    ts_ratio_stats c{};
    c.s = r.s;
    c.n = r.n;
    c.mean = to_c(r.mean);
    c.variance = to_c(r.variance);
    c.kmax = static_cast<unsigned>(std::min<std::size_t>(r.raw_moments.size(), TS_MAX_RAW_MOMENTS));
    for (unsigned k = 0; k < c.kmax; ++k) c.raw_moments[k] = to_c(r.raw_moments[k]);
    c.min_value = r.min_value;
    *out = c;
  });
}

ts_status ts_simulate_t_infinity(double alpha, size_t K, ts_lepage_tail tail, size_t n, uint64_t seed,
                                 ts_t_infinity_stats* out) {
  return guarded([&] {
    require(out, "out is null");
    auto study = lepage_study(alpha, {0}, lepage_config(K, tail), n, seed, 2, false, g_threads);
    const auto& t = study.t_infinity;
    *out = {t.n, to_c(t.mean), to_c(t.variance), to_c(t.correlation_with_r0_squared), t.min_value, t.max_value};
  });
}

// ---- convergence reports

ts_status ts_convergence_report(const ts_regime* r, const ts_tail_model* m, const ts_mixing_law* mix,
                                const double* t_grid, size_t nt, const double* queries, size_t nq,
                                size_t n_per_t, uint64_t seed, ts_variant variant, ts_report** out) {
  return guarded([&] {
    require(r, "regime is null");
    require(m, "model is null");
    require(mix, "mixing law is null");
    require(out, "out is null");
    if (nt == 0) throw InvalidArgument{"empty horizon grid"};
    if (nq == 0) throw InvalidArgument{"empty query grid"};
    require(t_grid, "t_grid is null");
    require(queries, "queries is null");
    std::vector<double> ts(t_grid, t_grid + nt);
    std::vector<Query> qs;
    for (size_t i = 0; i < nq; ++i) qs.push_back({queries[3 * i], queries[3 * i + 1], queries[3 * i + 2]});
    LimitOptions opts;
    opts.variant = to_variant(variant);
    *out = new ts_report{convergence_report(m->model, mix->mix, r->regime, ts, qs, n_per_t, seed, opts, g_threads)};
  });
}

void ts_report_free(ts_report* rep) { delete rep; }

size_t ts_report_row_count(const ts_report* rep) { return rep == nullptr ? 0 : rep->report.rows.size(); }

ts_status ts_report_row_get(const ts_report* rep, size_t i, ts_report_row* out) {
  return guarded([&] {
    require(rep, "report is null");
    require(out, "out is null");
    if (i >= rep->report.rows.size()) throw InvalidArgument{"index out of range"};
    const auto& row = rep->report.rows[i];
    *out = {row.t, row.u, row.v, row.w, row.empirical, row.std_error, row.limit, row.gap};
  });
}

size_t ts_report_horizon_count(const ts_report* rep) {
  return rep == nullptr ? 0 : rep->report.horizons.size();
}

ts_status ts_report_horizon_get(const ts_report* rep, size_t i, ts_horizon* out) {
  return guarded([&] {
    require(rep, "report is null");
    require(out, "out is null");
    if (i >= rep->report.horizons.size()) throw InvalidArgument{"index out of range"};
    const auto& h = rep->report.horizons[i];
    *out = {h.t, h.median_gap, h.median_std_error, h.redraw_rate};
  });
}

ts_status ts_report_flags(const ts_report* rep, int* flagged, int* strictly_nonincreasing) {
  return guarded([&] {
    require(rep, "report is null");
    if (flagged != nullptr) *flagged = rep->report.flagged ? 1 : 0;
    if (strictly_nonincreasing != nullptr) *strictly_nonincreasing = rep->report.strictly_nonincreasing ? 1 : 0;
  });
}

size_t ts_report_warning_count(const ts_report* rep) {
  return rep == nullptr ? 0 : rep->report.warnings.size();
}

const char* ts_report_warning(const ts_report* rep, size_t i) {
  if (rep == nullptr || i >= rep->report.warnings.size()) return nullptr;
  return rep->report.warnings[i].c_str();
}

ts_status ts_run_identity_suite(char* buf, size_t cap, size_t* needed, int* all_passed) {
  return guarded([&] {
    auto results = run_identity_suite();
    Json arr = Json::array();
    bool ok = true;
    for (const auto& r : results) {
      arr.push_back({{"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
      ok = ok && r.passed;
    }
    if (all_passed != nullptr) *all_passed = ok ? 1 : 0;
    write_string(arr.dump(), buf, cap, needed);
  });
}

}  // extern "C"
