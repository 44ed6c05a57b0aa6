#pragma once

#include "tailsplit/mixing_law.hpp"
#include "tailsplit/quadrature.hpp"
#include "tailsplit/tail_model.hpp"

namespace tailsplit {

// Mixed Poisson claim count on [0, t]: N(t) | Theta ~ Poisson(Theta t).
struct CountingSpec {
  CountingSpec(MixingLaw mix_, double t_);

  MixingLaw mix;
  double t;
};

// Transform arguments for the split of S(t) into the sum of the smallest
// claims, the (s+1)-th largest claim and the sum of the s largest claims.
struct LTQuery {
  double u = 0.0;  // weight on the s largest claims
  double v = 0.0;  // weight on the (s+1)-th largest claim
  double w = 0.0;  // weight on the remaining smaller claims
  unsigned s = 0;
};

struct LtValue {
  double value;
  double abs_err_est;
};

struct ComponentMeans {
  double lambda;  // sum of the s largest
  double xi;      // (s+1)-th largest, 0 when N <= s
  double sigma;   // sum of the rest
  double total;   // S(t)
};

// Q_t(z) = E{z^N(t)} and its r-th derivative t^r q_r(t(1 - z)).
double pgf(const CountingSpec& spec, double z);
double pgf_derivative(const CountingSpec& spec, unsigned r, double z);
double count_pmf(const CountingSpec& spec, unsigned n);

// E{e^{-uX}} and 1 - E{e^{-uX}} for one claim.
double claim_lt(const TailModel& model, double u);
double claim_lt_complement(const TailModel& model, double u);

// E{e^{-u S(t)}} = Q_t(E{e^{-uX}}), formed without cancellation.
double aggregate_lt(const CountingSpec& spec, const TailModel& model, double u);

// Omega_s(u, v, w; t) for the mixed Poisson count. The outer integral is
// taken over z = t * survival(y), where y is the (s+1)-th largest claim.
LtValue exact_joint_lt(const CountingSpec& spec, const TailModel& model, const LTQuery& q,
                       const QuadOptions& opts = {});

// Means of the three parts and of S(t); +inf where the mean diverges
// (xi: gamma >= s + 1, sigma: gamma >= s + 2, lambda and S: alpha <= 1).
ComponentMeans component_means(const CountingSpec& spec, const TailModel& model, unsigned s,
                               const QuadOptions& opts = {});

}  // namespace tailsplit
