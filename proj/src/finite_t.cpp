#include "tailsplit/finite_t.hpp"

#include <cmath>
#include <vector>

#include "tailsplit/errors.hpp"

namespace tailsplit {
namespace {

// Inner integrals are kept much tighter than the outer one so the outer
// integrand is smooth at the outer tolerance.
QuadOptions inner_options(double scale) {
  return QuadOptions{1e-15 * std::max(scale, 1e-300), 1e-12, 200000};
}

// Breakpoints for an outer integral over (0, t]: log map on (0, min(1, t)],
// then doubling intervals.
std::vector<double> outer_breaks(double t) {
  std::vector<double> breaks;
  double x = 1.0;
  while (x < t) {
    breaks.push_back(x);
    x *= 2.0;
  }
  breaks.push_back(t);
  return breaks;
}

QuadResult integrate_outer(const Integrand& f, double t, const QuadOptions& opts) {
  QuadOptions part = opts;
  const double head_limit = std::min(1.0, t);
  std::vector<double> breaks = outer_breaks(t);
  part.abs_tol = opts.abs_tol / static_cast<double>(breaks.size() + 1);
  QuadResult head = integrate_to_zero(f, head_limit, part);
  if (t <= 1.0) return head;
  part.max_evaluations = opts.max_evaluations > head.evaluations ? opts.max_evaluations - head.evaluations : 1;
  part.abs_tol = opts.abs_tol - part.abs_tol;
  try {
    QuadResult rest = integrate_pieces(f, breaks, part);
    return {head.value + rest.value, head.abs_err_est + rest.abs_err_est,
            head.evaluations + rest.evaluations};
  } catch (const NumericalError& e) {
    throw NumericalError(e.what(), head.value + e.estimate(), head.abs_err_est + e.error_bound());
  }
}

// t * int_0^{z/t} e^{-u U(1/nu)} d nu
double head_transform(const TailModel& model, double t, double z, double u) {
  if (u == 0.0) return z;
  const double v0 = z / t;
  auto g = [&model, u](double nu) { return std::exp(-u * model.quantile_from_survival(nu)); };
  return t * integrate_to_zero(g, v0, inner_options(v0)).value;
}

// t * (1 - int_{z/t}^1 e^{-w U(1/nu)} d nu) = z + t int_{z/t}^1 (1 - e^{-w U(1/nu)}) d nu
double tail_complement(const TailModel& model, double t, double z, double w) {
  if (w == 0.0 || z >= t) return z;
  const double log_v0 = std::log(z / t);
  auto h = [&model, w](double ell) {
    const double nu = std::exp(ell);
    return -std::expm1(-w * model.quantile_from_survival(nu)) * nu;
  };
  const double part = integrate(h, log_v0, 0.0, inner_options(1.0)).value;
  return z + t * part;
}

}  // namespace

CountingSpec::CountingSpec(MixingLaw mix_, double t_) : mix(std::move(mix_)), t(t_) {
  if (!(t_ > 0.0) || !std::isfinite(t_)) throw DomainError("horizon t must be positive and finite");
}

double pgf(const CountingSpec& spec, double z) { return pgf_derivative(spec, 0, z); }

double pgf_derivative(const CountingSpec& spec, unsigned r, double z) {
  if (!(z >= 0.0 && z <= 1.0)) throw DomainError("pgf argument must lie in [0, 1]");
  return std::pow(spec.t, static_cast<double>(r)) * spec.mix.q(r, spec.t * (1.0 - z));
}

double count_pmf(const CountingSpec& spec, unsigned n) {
  const double t = spec.t;
  const double log_fact = log_gamma(n + 1.0);
  const MixingLaw& mix = spec.mix;
  auto poisson = [&](double mean) {
    return std::exp(n * std::log(mean) - mean - log_fact);
  };
  switch (mix.kind()) {
    case MixingKind::Degenerate:
      return poisson(mix.theta() * t);
    case MixingKind::Gamma: {
      const double a = mix.shape();
      const double b = mix.rate();
      return std::exp(log_gamma(a + n) - log_gamma(a) - log_fact + a * std::log(b / (b + t)) +
                      n * std::log(t / (b + t)));
    }
    case MixingKind::Discrete: {
      double sum = 0.0;
      for (const auto& atom : mix.atoms()) sum += atom.prob * poisson(atom.value * t);
      return sum;
    }
  }
  return 0.0;
}

double claim_lt_complement(const TailModel& model, double u) {
  if (!(u >= 0.0)) throw DomainError("claim transform argument must be nonnegative");
  if (u == 0.0) return 0.0;
  auto h = [&model, u](double nu) { return -std::expm1(-u * model.quantile_from_survival(nu)); };
  return integrate_to_zero(h, 1.0, QuadOptions{1e-16, 1e-13, 400000}).value;
}

double claim_lt(const TailModel& model, double u) { return 1.0 - claim_lt_complement(model, u); }

double aggregate_lt(const CountingSpec& spec, const TailModel& model, double u) {
  return spec.mix.q(0, spec.t * claim_lt_complement(model, u));
}

LtValue exact_joint_lt(const CountingSpec& spec, const TailModel& model, const LTQuery& q,
                       const QuadOptions& opts) {
  if (!(q.u >= 0.0 && q.v >= 0.0 && q.w >= 0.0))
    throw DomainError("transform arguments u, v, w must be nonnegative");
  const double t = spec.t;
  const unsigned s = q.s;

  // Paths with N(t) <= s: everything belongs to the top-s sum.
  const double phi_u = claim_lt(model, q.u);
  double lead = 0.0;
  for (unsigned n = 0; n <= s; ++n) lead += count_pmf(spec, n) * std::pow(phi_u, n);

  const double log_s_fact = log_gamma(s + 1.0);
  auto integrand = [&](double z) {
    const double y = model.quantile_from_survival(z / t);
    const double xi_factor = q.v == 0.0 ? 1.0 : std::exp(-q.v * y);
    if (xi_factor == 0.0) return 0.0;
    double top = 0.0;
    if (s > 0) {
      const double a = head_transform(model, t, z, q.u);
      if (a == 0.0) return 0.0;
      top = s * std::log(a);
    }
    const double qval = spec.mix.q(s + 1, tail_complement(model, t, z, q.w));
    if (qval == 0.0) return 0.0;
    return std::exp(top - log_s_fact) * xi_factor * qval;
  };
  QuadResult r = integrate_outer(integrand, t, opts);
  return {lead + r.value, r.abs_err_est + 1e-15 * std::abs(lead)};
}

ComponentMeans component_means(const CountingSpec& spec, const TailModel& model, unsigned s,
                               const QuadOptions& opts) {
  const double t = spec.t;
  const double gamma = model.gamma();
  const MixingLaw& mix = spec.mix;
  ComponentMeans out{};
  const double mu = model.mean();
  out.total = model.alpha() <= 1.0 ? kInf : t * mix.mean() * mu;

  QuadOptions o = opts;
  o.rel_tol = std::min(opts.rel_tol, 1e-10);
  o.abs_tol = 1e-300;
  // Claim size at z = t * survival(y). It overflows only for z within ~1e-300
  // of 0, where every integrand below is integrable, so those points are dropped.
  auto claim_at = [&](double z) {
    const double v = z / t;
    return v > 0.0 ? model.quantile_from_survival(std::min(v, 1.0)) : kInf;
  };

  // Sum of the s largest.
  if (s == 0) {
    out.lambda = 0.0;
  } else if (model.alpha() <= 1.0) {
    out.lambda = kInf;
  } else {
    double lead = 0.0;
    for (unsigned n = 1; n <= s; ++n) lead += n * count_pmf(spec, n) * mu;
    const double log_fact = log_gamma(static_cast<double>(s));
    auto f = [&](double z) {
      const double y = claim_at(z);
      if (std::isinf(y)) return 0.0;
      const double m_up = model.partial_mean_above(y);
      return std::exp((s - 1.0) * std::log(z) - log_fact) * t * m_up * mix.q(s + 1, z);
    };
    out.lambda = lead + integrate_outer(f, t, o).value;
  }

  const double log_s_fact = log_gamma(s + 1.0);
  if (gamma >= s + 1.0) {
    out.xi = kInf;
  } else {
    auto f = [&](double z) {
      const double y = claim_at(z);
      if (std::isinf(y)) return 0.0;
      return y * std::exp(s * std::log(z) - log_s_fact) *
             mix.q(s + 1, z);
    };
    out.xi = integrate_outer(f, t, o).value;
  }

  if (gamma >= s + 2.0) {
    out.sigma = kInf;
  } else {
    auto f = [&](double z) {
      const double y = claim_at(z);
      if (std::isinf(y)) return 0.0;
      const double m_low = model.partial_mean_below(y);
      return std::exp(s * std::log(z) - log_s_fact) * t * m_low * mix.q(s + 2, z);
    };
    out.sigma = integrate_outer(f, t, o).value;
  }
  return out;
}

}  // namespace tailsplit
