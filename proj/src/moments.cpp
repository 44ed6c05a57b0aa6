#include "tailsplit/moments.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <utility>

#include "tailsplit/errors.hpp"

namespace tailsplit {
namespace {

constexpr unsigned kMaxOrder = 20;

void enumerate(unsigned remaining_sum, unsigned remaining_parts, unsigned max_part,
               std::vector<unsigned>& m, std::vector<std::vector<unsigned>>& out) {
  if (remaining_parts == 0) {
    if (remaining_sum == 0) out.push_back(m);
    return;
  }
  // Parts are chosen in nonincreasing order, so each partition appears once.
  for (unsigned part = std::min(max_part, remaining_sum); part >= 1; --part) {
    if (part * remaining_parts < remaining_sum) break;
    ++m[part - 1];
    enumerate(remaining_sum - part, remaining_parts - 1, part, m, out);
    --m[part - 1];
  }
}

void check_indices(unsigned i, unsigned j) {
  if (i == 0 || j == 0 || j > i) throw DomainError("c_coeff needs 1 <= j <= i");
  if (i > kMaxOrder) throw DomainError("partition enumeration is capped at i = 20");
}

template <class T>
T pow_int(T base, unsigned e) {
  T out(1);
  for (unsigned k = 0; k < e; ++k) out *= base;
  return out;
}

template <class T>
T c_coeff_impl(unsigned i, unsigned j, T gamma) {
  T total(0);
  for (const auto& m : partition_multiplicities(i, j)) {
    // i! / prod m_l!  is an integer; build it in T.
    T term(1);
    for (unsigned k = 2; k <= i; ++k) term *= T(static_cast<std::int64_t>(k));
    for (unsigned l = 1; l <= m.size(); ++l) {
      if (m[l - 1] == 0) continue;
      for (unsigned k = 2; k <= m[l - 1]; ++k) term /= T(static_cast<std::int64_t>(k));
      T l_fact(1);
      for (unsigned k = 2; k <= l; ++k) l_fact *= T(static_cast<std::int64_t>(k));
      const T factor = T(1) / (l_fact * (T(static_cast<std::int64_t>(l)) * gamma - T(1)));
      term *= pow_int(factor, m[l - 1]);
    }
    total += term;
  }
  return total;
}

template <class T>
T ratio_moment_impl(unsigned s, unsigned k, T gamma) {
  T total(1);
  T binom(1);
  for (unsigned i = 1; i <= k; ++i) {
    binom = binom * T(static_cast<std::int64_t>(k - i + 1)) / T(static_cast<std::int64_t>(i));
    T inner(0);
    T rising(1);  // (s+j)!/s!
    for (unsigned j = 1; j <= i; ++j) {
      rising *= T(static_cast<std::int64_t>(s + j));
      inner += rising * c_coeff_impl(i, j, gamma);
    }
    total += binom * inner;
  }
  return total;
}

}  // namespace

const std::vector<std::vector<unsigned>>& partition_multiplicities(unsigned i, unsigned j) {
  check_indices(i, j);
  static std::mutex mutex;
  static std::map<std::pair<unsigned, unsigned>, std::vector<std::vector<unsigned>>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto key = std::make_pair(i, j);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::vector<std::vector<unsigned>> out;
  std::vector<unsigned> m(i - j + 1, 0);
  enumerate(i, j, i - j + 1, m, out);
  return cache.emplace(key, std::move(out)).first->second;
}

double c_coeff(unsigned i, unsigned j, double gamma) {
  check_indices(i, j);
  if (!(gamma > 1.0)) throw DomainError("c_coeff needs gamma > 1");
  return c_coeff_impl<double>(i, j, gamma);
}

Rational c_coeff_exact(unsigned i, unsigned j, Rational gamma) {
  check_indices(i, j);
  if (!(gamma > Rational(1))) throw DomainError("c_coeff needs gamma > 1");
  return c_coeff_impl<Rational>(i, j, gamma);
}

double ratio_moment(unsigned s, unsigned k, double gamma) {
  if (k == 0) return 1.0;
  if (k > kMaxOrder) throw DomainError("ratio_moment supports k <= 20");
  if (!(gamma > 1.0)) throw DomainError("ratio_moment needs gamma > 1");
  if (s + k <= 170) return ratio_moment_impl<double>(s, k, gamma);
  // Rising factorials in log space.
  double total = 1.0;
  double log_binom = 0.0;
  for (unsigned i = 1; i <= k; ++i) {
    log_binom += std::log(static_cast<double>(k - i + 1)) - std::log(static_cast<double>(i));
    double inner = 0.0;
    for (unsigned j = 1; j <= i; ++j) {
      const double log_rising = log_gamma(s + j + 1.0) - log_gamma(s + 1.0);
      inner += std::exp(log_binom + log_rising) * c_coeff(i, j, gamma);
    }
    total += inner;
  }
  return total;
}

Rational ratio_moment_exact(unsigned s, unsigned k, Rational gamma) {
  if (k == 0) return Rational(1);
  if (k > kMaxOrder) throw DomainError("ratio_moment supports k <= 20");
  if (!(gamma > Rational(1))) throw DomainError("ratio_moment needs gamma > 1");
  return ratio_moment_impl<Rational>(s, k, gamma);
}

RatioVariance ratio_variance(unsigned s, double gamma) {
  if (!(gamma > 1.0)) throw DomainError("ratio_variance needs gamma > 1");
  const double n = s + 1.0;
  const double alpha = 1.0 / gamma;
  RatioVariance out{n * gamma * gamma / ((gamma - 1.0) * (gamma - 1.0) * (2.0 * gamma - 1.0)),
                    n * alpha / ((2.0 - alpha) * (1.0 - alpha) * (1.0 - alpha))};
  if (std::abs(out.gamma_form - out.alpha_form) > 1e-12 * std::abs(out.gamma_form))
    throw NumericalError("ratio_variance forms disagree", out.gamma_form,
                         std::abs(out.gamma_form - out.alpha_form));
  return out;
}

double t_infinity_mean(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("T limit needs alpha in (0, 1)");
  return 1.0 - alpha;
}

double t_infinity_variance(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("T limit needs alpha in (0, 1)");
  return alpha * (1.0 - alpha) / 3.0;
}

R0TCorrelation correlation_r0sq_tinf(double gamma) {
  if (!(gamma > 1.0)) throw DomainError("correlation needs gamma > 1");
  const double alpha = 1.0 / gamma;
  R0TCorrelation out{};
  const double g = gamma;
  out.rho = -std::sqrt(3.0 * (g - 1.0) * (3.0 * g - 1.0) * (4.0 * g - 1.0) /
                       (g * (43.0 * g * g - 7.0 * g - 6.0)));
  out.covariance = -2.0 * g / (1.0 - 3.0 * g + 2.0 * g * g);
  out.mean_r2_t = 2.0 / (2.0 - alpha);
  out.mean_r2 = ratio_moment(0, 2, g);
  out.var_r2 = ratio_moment(0, 4, g) - out.mean_r2 * out.mean_r2;
  out.mean_t = t_infinity_mean(alpha);
  out.var_t = t_infinity_variance(alpha);
  out.rho_from_moments = out.covariance / std::sqrt(out.var_r2 * out.var_t);
  return out;
}

double sum_over_max_mean(unsigned s, const TailModel& model, const MixingLaw& mix,
                         FormulaVariant variant) {
  if (!(model.alpha() > 1.0)) throw DomainError("sum_over_max_mean needs alpha > 1");
  const double gamma = model.gamma();
  const double c = variant == FormulaVariant::Consistent ? 1.0 - gamma : 1.0 + gamma;
  const double moment = mix.theta_moment(c);
  if (std::isinf(moment)) throw DivergenceError("sum_over_max_mean: infinite Theta moment");
  const double shift = variant == FormulaVariant::Consistent ? gamma : -gamma;
  return model.mean() * std::exp(log_gamma(s + shift + 1.0) - log_gamma(s + 1.0)) * moment;
}

double max_over_sum_inner(double z, const TailModel& model, const MixingLaw& mix) {
  const double zg = std::pow(z, -model.gamma());
  const double mu = model.mean();
  auto f = [&](double u) { return std::exp(-u * zg) * mix.q(2, z + u * mu); };
  return integrate(f, 0.0, kInf, QuadOptions{1e-300, 1e-12, 400000}).value;
}

double max_over_sum_mean(const TailModel& model, const MixingLaw& mix, unsigned s) {
  if (s > 0)
    throw UnsupportedError("max_over_sum_mean is derived for s = 0 only");
  if (!(model.alpha() > 1.0)) throw DomainError("max_over_sum_mean needs alpha > 1");
  auto outer = [&](double z) { return max_over_sum_inner(z, model, mix); };
  const double integral = integrate_positive_axis(outer, QuadOptions{1e-12, 1e-9, 400000}).value;
  return 1.0 - model.mean() * integral;
}

double mean_xi_plus_sigma(unsigned s, double gamma, const MixingLaw& mix) {
  if (s == 0) throw DomainError("mean_xi_plus_sigma needs s >= 1");
  if (!(gamma > 1.0)) throw DomainError("mean_xi_plus_sigma needs gamma > 1");
  if (gamma >= s + 1.0) return kInf;
  const double moment = mix.theta_moment(gamma);
  if (std::isinf(moment)) return kInf;
  return std::exp(log_gamma(s - gamma + 1.0) - log_gamma(static_cast<double>(s))) /
         (gamma - 1.0) * moment;
}

double centered_ratio_mean(unsigned s, double gamma) {
  if (gamma == 1.0 || std::isnan(gamma)) throw DomainError("centered_ratio_mean needs gamma != 1");
  return 1.0 + (s + 1.0) / (gamma - 1.0);
}

}  // namespace tailsplit
