#include "tailsplit/tail_model.hpp"

#include <cmath>
#include <sstream>

#include "tailsplit/errors.hpp"

namespace tailsplit {
namespace {

// Solves alpha L - rho ln(1 + L) = target for L >= 0 (target >= 0).
// The left side is increasing because rho <= alpha.
double solve_log_power(double alpha, double rho, double target) {
  if (target <= 0.0) return 0.0;
  auto g = [&](double l) { return alpha * l - rho * std::log1p(l) - target; };
  double lo = 0.0;
  double hi = std::max(1.0, target / alpha);
  while (g(hi) < 0.0) {
    lo = hi;
    hi *= 2.0;
  }
  double l = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double gl = g(l);
    if (gl == 0.0) return l;
    if (gl < 0.0) lo = l; else hi = l;
    const double slope = alpha - rho / (1.0 + l);
    double next = slope > 0.0 ? l - gl / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - l);
    l = next;
    if (step <= 1e-15 * std::max(1.0, l) || hi - lo <= 1e-15 * std::max(1.0, lo)) return l;
  }
  return l;
}

}  // namespace

TailModel::TailModel(double alpha, double x_min, SlowlyVarying sv)
    : alpha_(alpha), x_min_(x_min), sv_(sv) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("alpha must be positive and finite");
  if (!(x_min > 0.0) || !std::isfinite(x_min)) throw DomainError("x_min must be positive and finite");
  if (!(sv.c > 0.0)) throw DomainError("slowly varying constant c must be positive");
  const double expected_c = std::pow(x_min, alpha);
  if (std::abs(sv.c - expected_c) > 1e-12 * expected_c) {
    std::ostringstream msg;
    msg << "slowly varying constant c must equal x_min^alpha = " << expected_c
        << " so that survival(x_min) = 1";
    throw DomainError(msg.str());
  }
  if (sv.kind == SlowlyVaryingKind::Constant) {
    sv_.rho = 0.0;
  } else {
    if (!std::isfinite(sv.rho)) throw DomainError("rho must be finite");
    if (sv.rho > alpha) throw DomainError("log_power requires rho <= alpha for a monotone survival");
  }

  if (alpha_ <= 1.0) {
    mean_ = kInf;
  } else if (is_pareto()) {
    mean_ = x_min_ * alpha_ / (alpha_ - 1.0);
  } else {
    mean_ = x_min_ + integral_survival(0.0, kInf);
  }

  if (alpha_ <= 2.0) {
    second_moment_ = kInf;
  } else if (is_pareto()) {
    second_moment_ = x_min_ * x_min_ * alpha_ / (alpha_ - 2.0);
  } else {
    // E X^2 = x_min^2 + 2 int_{x_min}^inf x survival(x) dx
    const double a = alpha_;
    const double rho = sv_.rho;
    QuadOptions opts{1e-300, 1e-13, 400000};
    auto f = [a, rho](double l) { return std::exp((2.0 - a) * l) * std::pow(1.0 + l, rho); };
    second_moment_ = x_min_ * x_min_ * (1.0 + 2.0 * integrate(f, 0.0, kInf, opts).value);
  }
}

TailModel TailModel::pareto(double alpha, double x_min) {
  return TailModel(alpha, x_min, {SlowlyVaryingKind::Constant, std::pow(x_min, alpha), 0.0});
}

TailModel TailModel::log_power(double alpha, double rho, double x_min) {
  return TailModel(alpha, x_min, {SlowlyVaryingKind::LogPower, std::pow(x_min, alpha), rho});
}

double TailModel::log_survival_ratio(double log_r) const {
  double out = -alpha_ * log_r;
  if (!is_pareto()) out += sv_.rho * std::log1p(log_r);
  return out;
}

double TailModel::integral_survival(double lo_l, double hi_l) const {
  if (hi_l <= lo_l) return 0.0;
  const double a = alpha_;
  if (is_pareto()) {
    // x_min int e^{(1-a) l} dl
    const double k = 1.0 - a;
    if (k == 0.0) return x_min_ * (hi_l - lo_l);
    if (std::isinf(hi_l)) return -x_min_ * std::exp(k * lo_l) / k;
    return x_min_ * std::exp(k * lo_l) * std::expm1(k * (hi_l - lo_l)) / k;
  }
  const double rho = sv_.rho;
  auto f = [a, rho](double l) { return std::exp((1.0 - a) * l) * std::pow(1.0 + l, rho); };
  QuadOptions opts{1e-300, 1e-13, 400000};
  return x_min_ * integrate(f, lo_l, hi_l, opts).value;
}

double TailModel::slowly_varying_factor(double x) const {
  if (is_pareto()) return sv_.c;
  const double l = x > x_min_ ? std::log(x / x_min_) : 0.0;
  return sv_.c * std::pow(1.0 + l, sv_.rho);
}

double TailModel::survival(double x) const {
  if (!(x > x_min_)) return 1.0;
  if (std::isinf(x)) return 0.0;
  return std::exp(log_survival_ratio(std::log(x / x_min_)));
}

double TailModel::density(double x) const {
  if (x < x_min_ || std::isinf(x)) return 0.0;
  const double l = std::log(x / x_min_);
  const double hazard = is_pareto() ? alpha_ : alpha_ - sv_.rho / (1.0 + l);
  return std::exp(log_survival_ratio(l)) * hazard / x;
}

double TailModel::tail_quantile(double y) const {
  if (!(y >= 1.0)) throw DomainError("tail_quantile requires y >= 1");
  if (std::isinf(y)) return kInf;
  if (is_pareto()) return x_min_ * std::pow(y, 1.0 / alpha_);
  return x_min_ * std::exp(solve_log_power(alpha_, sv_.rho, std::log(y)));
}

double TailModel::quantile(double p) const {
  if (!(p >= 0.0 && p < 1.0)) throw DomainError("quantile requires 0 <= p < 1");
  return tail_quantile(1.0 / (1.0 - p));
}

double TailModel::quantile_from_survival(double v) const {
  if (!(v > 0.0 && v <= 1.0)) throw DomainError("quantile_from_survival requires 0 < v <= 1");
  if (is_pareto()) return x_min_ * std::pow(v, -1.0 / alpha_);
  return x_min_ * std::exp(solve_log_power(alpha_, sv_.rho, -std::log(v)));
}

double TailModel::partial_mean_below(double x) const {
  if (x < x_min_) throw DomainError("partial_mean_below requires x >= x_min");
  if (std::isinf(x)) return mean_;
  // E{X; X <= x} = x_min - x survival(x) + int_{x_min}^x survival
  const double l = std::log(x / x_min_);
  if (is_pareto()) {
    const double k = 1.0 - alpha_;
    const double integral = k == 0.0 ? l : std::expm1(k * l) / k;
    return x_min_ * alpha_ * integral;
  }
  return x_min_ - x * survival(x) + integral_survival(0.0, l);
}

double TailModel::partial_mean_above(double x) const {
  if (x < x_min_) throw DomainError("partial_mean_above requires x >= x_min");
  if (alpha_ <= 1.0) return kInf;
  if (std::isinf(x)) return 0.0;
  const double l = std::log(x / x_min_);
  if (is_pareto()) return x_min_ * alpha_ * std::exp((1.0 - alpha_) * l) / (alpha_ - 1.0);
  return x * survival(x) + integral_survival(l, kInf);
}

TruncatedMeans TailModel::truncated_means(double x) const {
  if (std::isnan(x) || x < x_min_) throw DomainError("truncated_means requires x >= x_min");
  if (std::isinf(x)) return {mean_, kInf};
  const double sf = survival(x);
  const double cdf_x = -std::expm1(log_survival_ratio(std::log(x / x_min_)));
  const double lower = cdf_x > 0.0 ? partial_mean_below(x) / cdf_x : x_min_;
  const double upper = alpha_ <= 1.0 ? kInf : partial_mean_above(x) / sf;
  return {lower, upper};
}

double TailModel::variance() const {
  if (alpha_ <= 2.0) return kInf;
  return second_moment_ - mean_ * mean_;
}

}  // namespace tailsplit
