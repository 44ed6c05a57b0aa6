#pragma once

#include <boost/rational.hpp>
#include <cstdint>
#include <vector>

#include "tailsplit/limit_lt.hpp"
#include "tailsplit/mixing_law.hpp"
#include "tailsplit/tail_model.hpp"

namespace tailsplit {

using Rational = boost::rational<std::int64_t>;

// All (m_1, ..., m_{i-j+1}) with sum m_l = j and sum l m_l = i, i.e. the
// partitions of i into exactly j parts. Cached; i <= 20.
const std::vector<std::vector<unsigned>>& partition_multiplicities(unsigned i, unsigned j);

// C_{i,j}(gamma) = sum i! / prod m_l! * prod (1 / (l! (l gamma - 1)))^{m_l}.
double c_coeff(unsigned i, unsigned j, double gamma);
Rational c_coeff_exact(unsigned i, unsigned j, Rational gamma);

// E{R_(s)^k} where R_(s) is the ratio of the LePage tail sum from index
// s+1 on to its first term.
double ratio_moment(unsigned s, unsigned k, double gamma);
Rational ratio_moment_exact(unsigned s, unsigned k, Rational gamma);

struct RatioVariance {
  double gamma_form;  // (s+1) gamma^2 / ((gamma-1)^2 (2 gamma - 1))
  double alpha_form;  // (s+1) alpha / ((2 - alpha)(1 - alpha)^2)
};
RatioVariance ratio_variance(unsigned s, double gamma);

// Limit of sum X^2 / (sum X)^2 for alpha = 1/gamma < 1.
double t_infinity_mean(double alpha);
double t_infinity_variance(double alpha);

struct R0TCorrelation {
  double rho;         // closed form in gamma
  double rho_from_moments;
  double covariance;  // -2 gamma / (1 - 3 gamma + 2 gamma^2)
  double mean_r2_t;   // E{R_(0)^2 T} = 2 / (2 - alpha)
  double mean_r2;
  double var_r2;
  double mean_t;
  double var_t;
};
R0TCorrelation correlation_r0sq_tinf(double gamma);

// E{Sigma_s / Xi_s} in the alpha > 1 fixed-s limit. Consistent:
// mu Gamma(s+gamma+1)/s! E{Theta^{1-gamma}}. Literal: mu Gamma(s-gamma+1)/s!
// E{Theta^{1+gamma}} (which is E{Sigma_s Xi_s}).
double sum_over_max_mean(unsigned s, const TailModel& model, const MixingLaw& mix,
                         FormulaVariant variant = FormulaVariant::Consistent);

// E{Xi_0 / (Xi_0 + Sigma_0)} for alpha > 1; only s = 0 is supported.
double max_over_sum_mean(const TailModel& model, const MixingLaw& mix, unsigned s = 0);
// Inner integral int_0^inf e^{-u z^{-gamma}} q_2(z + u mu) du of the above.
double max_over_sum_inner(double z, const TailModel& model, const MixingLaw& mix);

// E{Xi_s + Sigma_s} for alpha < 1 (gamma > 1), s >= 1; +inf for gamma >= s+1.
double mean_xi_plus_sigma(unsigned s, double gamma, const MixingLaw& mix);

// 1 + (s+1)/(gamma-1), defined for gamma != 1.
double centered_ratio_mean(unsigned s, double gamma);

}  // namespace tailsplit
