#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "tailsplit/limit_lt.hpp"
#include "tailsplit/mixing_law.hpp"
#include "tailsplit/rng.hpp"
#include "tailsplit/tail_model.hpp"

namespace tailsplit {

// One normalized draw of (top-s sum, (s+1)-th largest, rest).
struct TripleSample {
  double lambda_part;
  double xi_part;
  double sigma_part;
};

// Un-normalized path summary; sigma_centered is sum over the small claims of (X - mu).
struct RawPath {
  double theta = 0.0;
  std::size_t n = 0;
  unsigned s = 0;
  double lambda = 0.0;
  double xi = 0.0;
  double sigma = 0.0;
  double sigma_centered = 0.0;
  double total = 0.0;     // sum of claims in generation order
  double min_top = kInf;  // smallest of the s top claims
};

struct PathOptions {
  // Redraw paths with N(t) < s + 2. When false, paths with N(t) <= s put
  // everything in the top sum and N(t) = s + 1 leaves the rest empty.
  bool condition_on_min_count = true;
  std::size_t max_redraws = 100000;
};

// Number of top claims split off for a path with n claims.
unsigned split_count(const Regime& regime, double t, std::size_t n);

class PathSimulator {
 public:
  PathSimulator(TailModel model, MixingLaw mix, Regime regime, double t, PathOptions opts = {});

  RawPath draw_raw(Rng& rng, std::vector<double>& buffer, std::size_t& redraws) const;
  TripleSample normalize(const RawPath& path) const;

  const NormalizerValues& normalizers() const { return norm_; }
  const Regime& regime() const { return regime_; }
  double t() const { return t_; }

 private:
  TailModel model_;
  MixingLaw mix_;
  Regime regime_;
  double t_;
  PathOptions opts_;
  NormalizerValues norm_;
  bool centered_;
};

TripleSample simulate_path_triple(const TailModel& model, const MixingLaw& mix, double t,
                                  const Regime& regime, Rng& rng);

struct SampleSet {
  std::vector<TripleSample> samples;
  std::size_t redraws = 0;
  double redraw_rate = 0.0;
  double min_count_probability = 1.0;  // P(N(t) >= s + 2), fixed s only
  std::vector<std::string> warnings;
};

// n normalized paths; chunk c draws from an rng seeded by derive_seed(seed, c),
// so the output does not depend on the thread count (0 = hardware concurrency).
SampleSet simulate_paths(const TailModel& model, const MixingLaw& mix, const Regime& regime,
                         double t, std::size_t n, std::uint64_t seed, const PathOptions& opts = {},
                         unsigned threads = 0);

// Same, returning un-normalized paths.
std::vector<RawPath> simulate_raw_paths(const TailModel& model, const MixingLaw& mix,
                                        const Regime& regime, double t, std::size_t n,
                                        std::uint64_t seed, const PathOptions& opts = {},
                                        unsigned threads = 0);

enum class LePageTail { Drop, MeanCorrect };

struct LePageConfig {
  std::size_t K = 10000;
  LePageTail tail_mode = LePageTail::MeanCorrect;
};

// (sum_{k<=s} Z_k, Z_{s+1}, sum_{k>=s+2} Z_k) with Z_k = Gamma_k^{-1/alpha};
// terms past K are dropped or replaced by Gamma_K^{1-1/alpha} / (1/alpha - 1).
TripleSample simulate_lepage_triple(double alpha, unsigned s, const LePageConfig& cfg, Rng& rng);

struct Estimate {
  double value;
  double std_error;
};

// Mean and batch-means standard error (100 batches of consecutive values).
Estimate batch_mean(const std::vector<double>& x, std::size_t batches = 100);

struct RatioStats {
  unsigned s = 0;
  std::size_t n = 0;
  Estimate mean{};
  Estimate variance{};
  std::vector<Estimate> raw_moments;  // E{R^k}, k = 1..kmax
  double min_value = kInf;
};

struct TInfinityStats {
  std::size_t n = 0;
  Estimate mean{};
  Estimate variance{};
  Estimate correlation_with_r0_squared{};
  double min_value = kInf;
  double max_value = 0.0;
};

struct LePageStudy {
  std::vector<RatioStats> ratios;  // one per requested s
  TInfinityStats t_infinity;
};

// Moments of R_(s) for several s and of T from one set of LePage draws.
// kmax above 4 requires allow_high_moments.
LePageStudy lepage_study(double alpha, const std::vector<unsigned>& s_values,
                         const LePageConfig& cfg, std::size_t n, std::uint64_t seed,
                         unsigned kmax = 4, bool allow_high_moments = false, unsigned threads = 0);

RatioStats simulate_ratio_r(double alpha, unsigned s, const LePageConfig& cfg, std::size_t n,
                            std::uint64_t seed, unsigned kmax = 4, bool allow_high_moments = false);
TInfinityStats simulate_t_infinity(double alpha, const LePageConfig& cfg, std::size_t n,
                                   std::uint64_t seed);

// Mean and iid standard error of exp(-u lambda - v xi - w sigma).
Estimate empirical_lt(const std::vector<TripleSample>& samples, double u, double v, double w);

struct Query {
  double u;
  double v;
  double w;
};

std::vector<Query> query_grid(const std::vector<double>& us, const std::vector<double>& vs,
                              const std::vector<double>& ws);

struct ReportRow {
  double t, u, v, w, empirical, std_error, limit, gap;
};

struct HorizonSummary {
  double t;
  double median_gap;
  double median_std_error;
  double redraw_rate;
};

struct ConvergenceReport {
  std::string regime;
  std::vector<ReportRow> rows;
  std::vector<HorizonSummary> horizons;
  // Median gap rose between consecutive horizons by more than
  // 3 sqrt(se_i^2 + se_{i+1}^2) (median standard errors).
  bool flagged = false;
  bool strictly_nonincreasing = true;
  std::vector<std::string> warnings;
};

ConvergenceReport convergence_report(const TailModel& model, const MixingLaw& mix,
                                     const Regime& regime, const std::vector<double>& t_grid,
                                     const std::vector<Query>& queries, std::size_t n_per_t,
                                     std::uint64_t seed, const LimitOptions& limit_opts = {},
                                     unsigned threads = 0);

double median(std::vector<double> values);

}  // namespace tailsplit
