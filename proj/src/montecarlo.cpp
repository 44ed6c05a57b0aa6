#include "tailsplit/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "tailsplit/errors.hpp"
#include "tailsplit/finite_t.hpp"

namespace tailsplit {
namespace {

// Runs fn(chunk, begin, end, rng) over [0, n) in fixed-size chunks. Chunk c
// always gets the rng seeded with derive_seed(seed, c).
template <class Fn>
void run_chunks(std::size_t n, std::size_t chunk_size, std::uint64_t seed, unsigned threads, Fn fn) {
  const std::size_t chunks = (n + chunk_size - 1) / chunk_size;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(chunks, 1)));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    try {
      for (;;) {
        const std::size_t c = next.fetch_add(1);
        if (c >= chunks) break;
        Rng rng(derive_seed(seed, c));
        fn(c, c * chunk_size, std::min(n, (c + 1) * chunk_size), rng);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next.store(chunks);
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
}

double sample_variance(const double* x, std::size_t n) {
  if (n < 2) return 0.0;
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += x[i];
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) ss += (x[i] - mean) * (x[i] - mean);
  return ss / static_cast<double>(n - 1);
}

double correlation(const double* x, const double* y, std::size_t n) {
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

// Batch boundaries: batch b covers [b n / B, (b+1) n / B).
template <class Stat>
Estimate batch_statistic(std::size_t n, std::size_t batches, double global, Stat stat) {
  batches = std::min(batches, n);
  if (batches < 2) return {global, 0.0};
  std::vector<double> values(batches);
  for (std::size_t b = 0; b < batches; ++b) {
    const std::size_t lo = b * n / batches;
    const std::size_t hi = (b + 1) * n / batches;
    values[b] = stat(lo, hi - lo);
  }
  return {global, std::sqrt(sample_variance(values.data(), batches) / static_cast<double>(batches))};
}

}  // namespace

unsigned split_count(const Regime& regime, double t, std::size_t n) {
  switch (regime.rule) {
    case SplitRule::FixedS: return regime.s;
    case SplitRule::VanishingP:
    case SplitRule::FixedP:
      return static_cast<unsigned>(std::floor(regime.p_of_t(t) * static_cast<double>(n)));
  }
  return 0;
}

PathSimulator::PathSimulator(TailModel model, MixingLaw mix, Regime regime, double t, PathOptions opts)
    : model_(std::move(model)), mix_(std::move(mix)), regime_(regime), t_(t), opts_(opts) {
  regime_.check_model(model_);
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("horizon t must be positive and finite");
  norm_ = normalizer_values(regime_, model_, t_);
  centered_ = regime_.centered();
}

RawPath PathSimulator::draw_raw(Rng& rng, std::vector<double>& buffer, std::size_t& redraws) const {
  RawPath path;
  std::size_t n = 0;
  unsigned s = 0;
  for (std::size_t attempt = 0;; ++attempt) {
    path.theta = mix_.sample(rng);
    std::poisson_distribution<long long> count(path.theta * t_);
    n = static_cast<std::size_t>(count(rng));
    s = split_count(regime_, t_, n);
    if (!opts_.condition_on_min_count || n >= s + 2) break;
    ++redraws;
    if (attempt >= opts_.max_redraws)
      throw DomainError("too many paths with N(t) < s + 2; increase t");
  }
  path.n = n;
  path.s = s;
  buffer.resize(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    buffer[i] = model_.sample(rng);
    total += buffer[i];
  }
  path.total = total;
  if (n == 0) return path;
  if (n <= s) {
    path.lambda = total;
    path.min_top = *std::min_element(buffer.begin(), buffer.end());
    return path;
  }
  const std::size_t k = n - s - 1;
  std::nth_element(buffer.begin(), buffer.begin() + static_cast<std::ptrdiff_t>(k), buffer.end());
  path.xi = buffer[k];
  for (std::size_t i = k + 1; i < n; ++i) {
    path.lambda += buffer[i];
    path.min_top = std::min(path.min_top, buffer[i]);
  }
  const double mu = model_.mean();
  for (std::size_t i = 0; i < k; ++i) {
    path.sigma += buffer[i];
    if (centered_) path.sigma_centered += buffer[i] - mu;
  }
  return path;
}

TripleSample PathSimulator::normalize(const RawPath& path) const {
  const double sigma = centered_ ? path.sigma_centered : path.sigma;
  return {path.lambda / norm_.lambda, path.xi / norm_.xi, sigma / norm_.sigma};
}

TripleSample simulate_path_triple(const TailModel& model, const MixingLaw& mix, double t,
                                  const Regime& regime, Rng& rng) {
  PathSimulator sim(model, mix, regime, t);
  std::vector<double> buffer;
  std::size_t redraws = 0;
  return sim.normalize(sim.draw_raw(rng, buffer, redraws));
}

std::vector<RawPath> simulate_raw_paths(const TailModel& model, const MixingLaw& mix,
                                        const Regime& regime, double t, std::size_t n,
                                        std::uint64_t seed, const PathOptions& opts,
                                        unsigned threads) {
  PathSimulator sim(model, mix, regime, t, opts);
  std::vector<RawPath> out(n);
  run_chunks(n, 64, seed, threads, [&](std::size_t, std::size_t lo, std::size_t hi, Rng& rng) {
    std::vector<double> buffer;
    std::size_t redraws = 0;
    for (std::size_t i = lo; i < hi; ++i) out[i] = sim.draw_raw(rng, buffer, redraws);
  });
  return out;
}

SampleSet simulate_paths(const TailModel& model, const MixingLaw& mix, const Regime& regime,
                         double t, std::size_t n, std::uint64_t seed, const PathOptions& opts,
                         unsigned threads) {
  if (n == 0) throw DomainError("simulate_paths needs n > 0");
  PathSimulator sim(model, mix, regime, t, opts);
  SampleSet set;
  set.samples.resize(n);
  const std::size_t chunk = 64;
  std::vector<std::size_t> redraws((n + chunk - 1) / chunk, 0);
  run_chunks(n, chunk, seed, threads, [&](std::size_t c, std::size_t lo, std::size_t hi, Rng& rng) {
    std::vector<double> buffer;
    std::size_t local = 0;
    for (std::size_t i = lo; i < hi; ++i) set.samples[i] = sim.normalize(sim.draw_raw(rng, buffer, local));
    redraws[c] = local;
  });
  for (auto r : redraws) set.redraws += r;
  set.redraw_rate = static_cast<double>(set.redraws) / static_cast<double>(set.redraws + n);
  if (opts.condition_on_min_count && set.redraw_rate > 0.01) {
    std::ostringstream msg;
    msg << "redraw rate " << set.redraw_rate << " exceeds 1% (paths with N(t) < s + 2)";
    set.warnings.push_back(msg.str());
  }
  if (regime.rule == SplitRule::FixedS) {
    CountingSpec spec(mix, t);
    double below = 0.0;
    for (unsigned k = 0; k <= regime.s + 1; ++k) below += count_pmf(spec, k);
    set.min_count_probability = 1.0 - below;
    if (set.min_count_probability < 0.999) {
      std::ostringstream msg;
      msg << "P(N(t) >= s + 2) = " << set.min_count_probability << " is below 0.999";
      set.warnings.push_back(msg.str());
    }
  }
  return set;
}

TripleSample simulate_lepage_triple(double alpha, unsigned s, const LePageConfig& cfg, Rng& rng) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("LePage series needs alpha in (0, 1)");
  if (cfg.K < s + 2) throw DomainError("LePage truncation K must be at least s + 2");
  const double gamma = 1.0 / alpha;
  TripleSample out{0.0, 0.0, 0.0};
  double arrival = 0.0;
  for (std::size_t k = 1; k <= cfg.K; ++k) {
    arrival += unit_exponential(rng);
    const double z = std::exp(-gamma * std::log(arrival));
    if (k <= s) out.lambda_part += z;
    else if (k == s + 1) out.xi_part = z;
    else out.sigma_part += z;
  }
  if (cfg.tail_mode == LePageTail::MeanCorrect)
    out.sigma_part += std::exp((1.0 - gamma) * std::log(arrival)) / (gamma - 1.0);
  return out;
}

Estimate batch_mean(const std::vector<double>& x, std::size_t batches) {
  if (x.empty()) throw DomainError("batch_mean of an empty sample");
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  return batch_statistic(x.size(), batches, mean, [&](std::size_t lo, std::size_t len) {
    double m = 0.0;
    for (std::size_t i = lo; i < lo + len; ++i) m += x[i];
    return m / static_cast<double>(len);
  });
}

LePageStudy lepage_study(double alpha, const std::vector<unsigned>& s_values, const LePageConfig& cfg,
                         std::size_t n, std::uint64_t seed, unsigned kmax, bool allow_high_moments,
                         unsigned threads) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("LePage series needs alpha in (0, 1)");
  if (n < 2) throw DomainError("lepage_study needs n >= 2");
  if (kmax == 0) kmax = 1;
  if (kmax > 4 && !allow_high_moments)
    throw DomainError("moments beyond k = 4 converge slowly; pass allow_high_moments to request them");
  if (kmax > 8) throw DomainError("moments are estimated up to k = 8");
  unsigned max_s = 0;
  for (unsigned s : s_values) max_s = std::max(max_s, s);
  if (cfg.K < max_s + 2) throw DomainError("LePage truncation K must be at least s + 2");

  const double gamma = 1.0 / alpha;
  const std::size_t ns = s_values.size();
  std::vector<std::vector<double>> ratio(ns, std::vector<double>(n));
  std::vector<double> t_values(n), r0_sq(n);

  run_chunks(n, 256, seed, threads, [&](std::size_t, std::size_t lo, std::size_t hi, Rng& rng) {
    std::vector<double> head(max_s + 1);
    for (std::size_t i = lo; i < hi; ++i) {
      double arrival = 0.0, sum = 0.0, sum_sq = 0.0;
      for (std::size_t k = 1; k <= cfg.K; ++k) {
        arrival += unit_exponential(rng);
        const double z = std::exp(-gamma * std::log(arrival));
        if (k <= max_s + 1) head[k - 1] = z;
        sum += z;
        sum_sq += z * z;
      }
      if (cfg.tail_mode == LePageTail::MeanCorrect) {
        const double log_g = std::log(arrival);
        sum += std::exp((1.0 - gamma) * log_g) / (gamma - 1.0);
        sum_sq += std::exp((1.0 - 2.0 * gamma) * log_g) / (2.0 * gamma - 1.0);
      }
      for (std::size_t j = 0; j < ns; ++j) {
        const unsigned s = s_values[j];
        double top = 0.0;
        for (unsigned k = 0; k < s; ++k) top += head[k];
        ratio[j][i] = (sum - top) / head[s];
      }
      const double r0 = sum / head[0];
      r0_sq[i] = r0 * r0;
      t_values[i] = sum_sq / (sum * sum);
    }
  });

  LePageStudy study;
  const std::size_t batches = 100;
  for (std::size_t j = 0; j < ns; ++j) {
    const auto& r = ratio[j];
    RatioStats st;
    st.s = s_values[j];
    st.n = n;
    st.min_value = *std::min_element(r.begin(), r.end());
    st.mean = batch_mean(r, batches);
    st.variance = batch_statistic(n, batches, sample_variance(r.data(), n),
                                  [&](std::size_t lo, std::size_t len) { return sample_variance(r.data() + lo, len); });
    std::vector<double> power(n);
    for (unsigned k = 1; k <= kmax; ++k) {
      for (std::size_t i = 0; i < n; ++i) power[i] = std::pow(r[i], static_cast<double>(k));
      st.raw_moments.push_back(batch_mean(power, batches));
    }
    study.ratios.push_back(std::move(st));
  }

  TInfinityStats& ts = study.t_infinity;
  ts.n = n;
  ts.min_value = *std::min_element(t_values.begin(), t_values.end());
  ts.max_value = *std::max_element(t_values.begin(), t_values.end());
  ts.mean = batch_mean(t_values, batches);
  ts.variance = batch_statistic(n, batches, sample_variance(t_values.data(), n),
                                [&](std::size_t lo, std::size_t len) { return sample_variance(t_values.data() + lo, len); });
  ts.correlation_with_r0_squared =
      batch_statistic(n, batches, correlation(r0_sq.data(), t_values.data(), n),
                      [&](std::size_t lo, std::size_t len) {
                        return correlation(r0_sq.data() + lo, t_values.data() + lo, len);
                      });
  return study;
}

RatioStats simulate_ratio_r(double alpha, unsigned s, const LePageConfig& cfg, std::size_t n,
                            std::uint64_t seed, unsigned kmax, bool allow_high_moments) {
  return lepage_study(alpha, {s}, cfg, n, seed, kmax, allow_high_moments).ratios.front();
}

TInfinityStats simulate_t_infinity(double alpha, const LePageConfig& cfg, std::size_t n,
                                   std::uint64_t seed) {
  return lepage_study(alpha, {0}, cfg, n, seed, 2).t_infinity;
}

Estimate empirical_lt(const std::vector<TripleSample>& samples, double u, double v, double w) {
  if (samples.empty()) throw DomainError("empirical_lt needs at least one sample");
  const std::size_t n = samples.size();
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = samples[i];
    x[i] = std::exp(-u * p.lambda_part - v * p.xi_part - w * p.sigma_part);
  }
  double mean = 0.0;
  for (double v_i : x) mean += v_i;
  mean /= static_cast<double>(n);
  const double se = n > 1 ? std::sqrt(sample_variance(x.data(), n) / static_cast<double>(n)) : 0.0;
  return {mean, se};
}

std::vector<Query> query_grid(const std::vector<double>& us, const std::vector<double>& vs,
                              const std::vector<double>& ws) {
  std::vector<Query> out;
  for (double u : us)
    for (double v : vs)
      for (double w : ws) out.push_back({u, v, w});
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) throw DomainError("median of an empty list");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

ConvergenceReport convergence_report(const TailModel& model, const MixingLaw& mix,
                                     const Regime& regime, const std::vector<double>& t_grid,
                                     const std::vector<Query>& queries, std::size_t n_per_t,
                                     std::uint64_t seed, const LimitOptions& limit_opts,
                                     unsigned threads) {
  if (t_grid.empty() || queries.empty()) throw DomainError("convergence_report needs nonempty grids");
  regime.check_model(model);
  ConvergenceReport report;
  report.regime = regime.name();

  std::vector<double> limits;
  limits.reserve(queries.size());
  for (const auto& q : queries) limits.push_back(lt_eval(regime, model, mix, q.u, q.v, q.w, limit_opts));

  for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
    const double t = t_grid[ti];
    SampleSet set = simulate_paths(model, mix, regime, t, n_per_t, derive_seed(seed, ti), {}, threads);
    for (const auto& w : set.warnings) {
      std::ostringstream msg;
      msg << "t=" << t << ": " << w;
      report.warnings.push_back(msg.str());
    }
    std::vector<double> gaps, ses;
    for (std::size_t qi = 0; qi < queries.size(); ++qi) {
      const Query& q = queries[qi];
      const Estimate e = empirical_lt(set.samples, q.u, q.v, q.w);
      const double gap = std::abs(e.value - limits[qi]);
      report.rows.push_back({t, q.u, q.v, q.w, e.value, e.std_error, limits[qi], gap});
      gaps.push_back(gap);
      ses.push_back(e.std_error);
    }
    report.horizons.push_back({t, median(gaps), median(ses), set.redraw_rate});
  }

  for (std::size_t i = 0; i + 1 < report.horizons.size(); ++i) {
    const auto& a = report.horizons[i];
    const auto& b = report.horizons[i + 1];
    if (b.median_gap > a.median_gap) report.strictly_nonincreasing = false;
    const double band = 3.0 * std::sqrt(a.median_std_error * a.median_std_error +
                                        b.median_std_error * b.median_std_error);
    if (b.median_gap > a.median_gap + band) report.flagged = true;
  }
  if (report.flagged) report.warnings.push_back("median gap increases with t beyond the noise band");
  return report;
}

}  // namespace tailsplit
