#pragma once

#include "tailsplit/quadrature.hpp"
#include "tailsplit/rng.hpp"

namespace tailsplit {

enum class SlowlyVaryingKind { Constant, LogPower };

// l(x) = c for Constant, l(x) = c (1 + ln(x / x_min))^rho for LogPower.
// With survival(x_min) = 1 this forces c = x_min^alpha.
struct SlowlyVarying {
  SlowlyVaryingKind kind = SlowlyVaryingKind::Constant;
  double c = 1.0;
  double rho = 0.0;
};

struct TruncatedMeans {
  double lower;  // E{X | X <= x}
  double upper;  // E{X | X > x}, +inf when alpha <= 1
};

// Claim-size law with survival (x/x_min)^{-alpha} (1 + ln(x/x_min))^rho
// on [x_min, inf). rho = 0 is the Pareto law.
class TailModel {
 public:
  TailModel(double alpha, double x_min, SlowlyVarying sv);
  static TailModel pareto(double alpha, double x_min = 1.0);
  static TailModel log_power(double alpha, double rho, double x_min = 1.0);

  double alpha() const { return alpha_; }
  double gamma() const { return 1.0 / alpha_; }
  double x_min() const { return x_min_; }
  const SlowlyVarying& slowly_varying() const { return sv_; }
  bool is_pareto() const { return sv_.kind == SlowlyVaryingKind::Constant; }

  double slowly_varying_factor(double x) const;
  double survival(double x) const;
  double cdf(double x) const { return 1.0 - survival(x); }
  double density(double x) const;

  // U(y) = F^{<-}(1 - 1/y), y >= 1.
  double tail_quantile(double y) const;
  // x_p with F(x_p) = p, p in [0, 1).
  double quantile(double p) const;
  // Claim size with survival probability v in (0, 1]; U(1/v) without
  // forming 1/v, so it stays accurate for tiny v.
  double quantile_from_survival(double v) const;

  TruncatedMeans truncated_means(double x) const;
  // E{X; X <= x} and E{X; X > x} (the latter +inf for alpha <= 1).
  double partial_mean_below(double x) const;
  double partial_mean_above(double x) const;

  double mean() const { return mean_; }                    // +inf for alpha <= 1
  double second_moment() const { return second_moment_; }  // +inf for alpha <= 2
  double variance() const;

  double sample(Rng& rng) const { return quantile_from_survival(1.0 - uniform01(rng)); }

 private:
  double log_survival_ratio(double log_r) const;  // ln survival at x = x_min e^{log_r}
  double integral_survival(double lo_l, double hi_l) const;

  double alpha_;
  double x_min_;
  SlowlyVarying sv_;
  double mean_;
  double second_moment_;
};

}  // namespace tailsplit
