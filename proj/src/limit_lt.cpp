#include "tailsplit/limit_lt.hpp"

#include <cmath>
#include <sstream>

#include "tailsplit/errors.hpp"

namespace tailsplit {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

const char* range_prefix(AlphaRange r) {
  switch (r) {
    case AlphaRange::Lt1: return "lt1";
    case AlphaRange::Gt1: return "gt1";
    case AlphaRange::Centered12: return "ctr12";
    case AlphaRange::Centered2: return "ctr2";
  }
  return "?";
}

// (1/s!) int_0^inf T(z)^s e^{-v z^{-gamma}} K(z) dz where T is the top-claim
// factor z alpha I_tail(u z^{-gamma}) and K carries the q (or exp) part.
template <class Kernel>
double fixed_s_integral(unsigned s, double alpha, double u, double v, Kernel kernel,
                        const QuadOptions& quad) {
  const double gamma = 1.0 / alpha;
  const double log_s_fact = log_gamma(s + 1.0);
  auto f = [&](double z) {
    const double zg = std::pow(z, -gamma);
    // z^{-gamma} overflows only on a set of width ~1e-300 next to 0.
    if (std::isinf(zg)) return 0.0;
    const double xi_term = v * zg;
    double log_top = 0.0;
    if (s > 0) {
      const double top = u == 0.0 ? z : z * alpha * inner_tail_integral(u * zg, alpha);
      if (top == 0.0) return 0.0;
      log_top = s * std::log(top);
    }
    const double k = kernel(z, zg);
    if (k == 0.0) return 0.0;
    return std::exp(log_top - log_s_fact - xi_term) * k;
  };
  return integrate_positive_axis(f, quad).value;
}

double theta_lt1(double z, double zg, double w, double alpha) {
  if (w == 0.0) return z;
  return z * (1.0 + alpha * inner_head_integral(w * zg, alpha));
}

double theta_ctr12(double z, double zg, double w, double alpha) {
  if (w == 0.0) return z;
  const double c = w * zg;
  const double gamma = 1.0 / alpha;
  return z * (1.0 - alpha * inner_centered_integral(c, alpha) - c / (1.0 - gamma));
}

void require_q_argument(const MixingLaw& mix, double lowest, const char* regime) {
  if (!(lowest > mix.q_argument_floor())) {
    std::ostringstream msg;
    msg << regime << ": the limit needs q at " << lowest
        << ", below the mixing law's admissible range (" << mix.q_argument_floor() << ")";
    throw DivergenceError(msg.str());
  }
}

}  // namespace

Regime Regime::fixed_s(AlphaRange range, unsigned s) {
  Regime r;
  r.range = range;
  r.rule = SplitRule::FixedS;
  r.s = s;
  return r;
}

Regime Regime::vanishing_p(AlphaRange range, double p_exponent) {
  Regime r;
  r.range = range;
  r.rule = SplitRule::VanishingP;
  r.p_exponent = p_exponent;
  r.validate();
  return r;
}

Regime Regime::fixed_p(AlphaRange range, double p) {
  Regime r;
  r.range = range;
  r.rule = SplitRule::FixedP;
  r.p = p;
  r.validate();
  return r;
}

Regime Regime::from_name(const std::string& name, unsigned s, double p, double p_exponent) {
  Regime r;
  r.s = s;
  r.p = p;
  r.p_exponent = p_exponent;
  const auto dash = name.find('-');
  if (dash == std::string::npos) throw DomainError("unknown regime '" + name + "'");
  const std::string head = name.substr(0, dash);
  const std::string tail = name.substr(dash + 1);
  if (head == "lt1") r.range = AlphaRange::Lt1;
  else if (head == "gt1") r.range = AlphaRange::Gt1;
  else if (head == "ctr12") r.range = AlphaRange::Centered12;
  else if (head == "ctr2") r.range = AlphaRange::Centered2;
  else throw DomainError("unknown regime '" + name + "'");
  if (tail == "fixed-s") r.rule = SplitRule::FixedS;
  else if (tail == "vanishing") r.rule = SplitRule::VanishingP;
  else if (tail == "fixed-p") r.rule = SplitRule::FixedP;
  else throw DomainError("unknown regime '" + name + "'");
  r.validate();
  return r;
}

std::string Regime::name() const {
  std::string out = range_prefix(range);
  switch (rule) {
    case SplitRule::FixedS: return out + "-fixed-s";
    case SplitRule::VanishingP: return out + "-vanishing";
    case SplitRule::FixedP: return out + "-fixed-p";
  }
  return out;
}

void Regime::validate() const {
  if (centered() && rule != SplitRule::FixedS)
    throw DomainError("centered regimes support a fixed s only");
  if (rule == SplitRule::FixedP && !(p > 0.0 && p < 1.0))
    throw DomainError("fixed proportion p must lie in (0, 1)");
  if (rule == SplitRule::VanishingP && !(p_exponent > 0.0 && p_exponent < 1.0))
    throw DomainError("p(t) = t^{-e} needs e in (0, 1) so that p(t) -> 0 and t p(t) -> inf");
}

void Regime::check_model(const TailModel& model) const {
  validate();
  const double a = model.alpha();
  bool ok = false;
  const char* need = "";
  switch (range) {
    case AlphaRange::Lt1: ok = a < 1.0; need = "alpha in (0, 1)"; break;
    case AlphaRange::Gt1: ok = a > 1.0; need = "alpha > 1"; break;
    case AlphaRange::Centered12: ok = a > 1.0 && a < 2.0; need = "alpha in (1, 2)"; break;
    case AlphaRange::Centered2: ok = a > 2.0; need = "alpha > 2"; break;
  }
  if (!ok) {
    std::ostringstream msg;
    msg << "regime " << name() << " requires " << need << ", model has alpha = " << a;
    throw RegimeError(msg.str());
  }
}

double Regime::p_of_t(double t) const {
  switch (rule) {
    case SplitRule::FixedS: return 0.0;
    case SplitRule::VanishingP: return std::pow(t, -p_exponent);
    case SplitRule::FixedP: return p;
  }
  return 0.0;
}

LimitTriple normalization_descriptor(const Regime& regime) {
  regime.validate();
  using N = Normalizer;
  switch (regime.range) {
    case AlphaRange::Lt1:
      switch (regime.rule) {
        case SplitRule::FixedS: return {N::Ut, N::Ut, N::Ut, false};
        case SplitRule::VanishingP: return {N::Ut, N::UInvP, N::TpUInvP, false};
        case SplitRule::FixedP: return {N::Ut, N::One, N::T, false};
      }
      break;
    case AlphaRange::Gt1:
      switch (regime.rule) {
        case SplitRule::FixedS: return {N::Ut, N::Ut, N::T, false};
        case SplitRule::VanishingP: return {N::TpUInvP, N::UInvP, N::T, false};
        case SplitRule::FixedP: return {N::T, N::One, N::T, false};
      }
      break;
    case AlphaRange::Centered12: return {N::Ut, N::Ut, N::Ut, true};
    case AlphaRange::Centered2: return {N::Ut, N::Ut, N::SqrtT, true};
  }
  throw DomainError("invalid regime");
}

std::string describe(Normalizer n) {
  switch (n) {
    case Normalizer::One: return "1";
    case Normalizer::Ut: return "U(t)";
    case Normalizer::UInvP: return "U(1/p(t))";
    case Normalizer::TpUInvP: return "t*p(t)*U(1/p(t))";
    case Normalizer::T: return "t";
    case Normalizer::SqrtT: return "t^(1/2)";
  }
  return "?";
}

NormalizerValues normalizer_values(const Regime& regime, const TailModel& model, double t) {
  if (!(t > 0.0)) throw DomainError("t must be positive");
  const LimitTriple d = normalization_descriptor(regime);
  auto value = [&](Normalizer n) {
    switch (n) {
      case Normalizer::One: return 1.0;
      case Normalizer::Ut: return model.tail_quantile(std::max(t, 1.0));
      case Normalizer::UInvP: return model.tail_quantile(1.0 / regime.p_of_t(t));
      case Normalizer::TpUInvP: {
        const double p = regime.p_of_t(t);
        return t * p * model.tail_quantile(1.0 / p);
      }
      case Normalizer::T: return t;
      case Normalizer::SqrtT: return std::sqrt(t);
    }
    return 1.0;
  };
  return {value(d.lambda), value(d.xi), value(d.sigma)};
}

double inner_tail_integral(double c, double alpha) {
  if (!(c >= 0.0)) throw DomainError("inner_tail_integral: c must be nonnegative");
  if (!(alpha > 0.0)) throw DomainError("inner_tail_integral: alpha must be positive");
  if (c == 0.0) return 1.0 / alpha;
  if (std::isinf(c)) return 0.0;
  if (c > 700.0) {
    // e^{-c} underflows soon; work in logs via the continued fraction value.
    const double g = upper_incomplete_gamma(-alpha, c);
    return g == 0.0 ? 0.0 : std::exp(alpha * std::log(c) + std::log(g));
  }
  return std::pow(c, alpha) * upper_incomplete_gamma(-alpha, c);
}

double inner_head_integral(double c, double alpha) {
  if (!(c >= 0.0)) throw DomainError("inner_head_integral: c must be nonnegative");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("inner_head_integral needs alpha in (0, 1)");
  if (c == 0.0) return 0.0;
  if (c <= 1.0) {
    // sum_{k>=1} (-1)^{k+1} c^k / (k! (k - alpha))
    double term = 1.0;
    double sum = 0.0;
    for (int k = 1; k < 60; ++k) {
      term *= c / k;
      const double add = (k % 2 == 1 ? term : -term) / (k - alpha);
      sum += add;
      if (std::abs(add) < kEps * std::abs(sum)) break;
    }
    return sum;
  }
  return std::pow(c, alpha) * gamma_fn(1.0 - alpha) / alpha - 1.0 / alpha +
         inner_tail_integral(c, alpha);
}

double inner_centered_integral(double c, double alpha) {
  if (!(c >= 0.0)) throw DomainError("inner_centered_integral: c must be nonnegative");
  if (!(alpha > 1.0 && alpha < 2.0))
    throw DomainError("inner_centered_integral needs alpha in (1, 2)");
  if (c == 0.0) return 0.0;
  if (c <= 1.0) {
    // sum_{k>=2} (-1)^k c^k / (k! (k - alpha))
    double term = c;
    double sum = 0.0;
    for (int k = 2; k < 60; ++k) {
      term *= c / k;
      const double add = (k % 2 == 0 ? term : -term) / (k - alpha);
      sum += add;
      if (std::abs(add) < kEps * std::abs(sum)) break;
    }
    return sum;
  }
  return std::pow(c, alpha) * gamma_fn(-alpha) - inner_tail_integral(c, alpha) + 1.0 / alpha -
         c / (alpha - 1.0);
}

double lt_eval(const Regime& regime, const TailModel& model, const MixingLaw& mix, double u,
               double v, double w, const LimitOptions& opts) {
  if (!(u >= 0.0 && v >= 0.0 && w >= 0.0))
    throw DomainError("transform arguments u, v, w must be nonnegative");
  regime.check_model(model);
  const double alpha = model.alpha();
  const double gamma = 1.0 / alpha;
  const bool literal = opts.variant == FormulaVariant::Literal;
  const unsigned s = regime.s;

  if (regime.rule == SplitRule::VanishingP) {
    if (regime.range == AlphaRange::Lt1) {
      double top = std::pow(u, alpha) * gamma_fn(1.0 - alpha);
      if (literal) top /= alpha;
      return std::exp(-v) * mix.q(0, top + w / (gamma - 1.0));
    }
    return std::exp(-v) * mix.q(0, u / (1.0 - gamma) + w * model.mean());
  }

  if (regime.rule == SplitRule::FixedP) {
    const double p = regime.p;
    if (literal) {
      const double xp = model.quantile(p);
      const TruncatedMeans tm = model.truncated_means(xp);
      const double top = regime.range == AlphaRange::Lt1
                             ? std::pow(u, alpha) * gamma_fn(1.0 - alpha) / (1.0 - p)
                             : (u == 0.0 ? 0.0 : u * tm.upper);
      return std::exp(-v * xp) * mix.q(0, top + (w == 0.0 ? 0.0 : w * tm.lower));
    }
    // The (s+1)-th largest sits at the (1 - p)-quantile; the small-claim
    // sum per unit time is E{X; X <= x_{1-p}}.
    const double x = model.quantile(1.0 - p);
    const double top = regime.range == AlphaRange::Lt1
                           ? std::pow(u, alpha) * gamma_fn(1.0 - alpha)
                           : (u == 0.0 ? 0.0 : u * model.partial_mean_above(x));
    const double small = w == 0.0 ? 0.0 : w * model.partial_mean_below(x);
    return std::exp(-v * x) * mix.q(0, top + small);
  }

  switch (regime.range) {
    case AlphaRange::Lt1: {
      auto kernel = [&](double z, double zg) { return mix.q(s + 1, theta_lt1(z, zg, w, alpha)); };
      return fixed_s_integral(s, alpha, u, v, kernel, opts.quad);
    }
    case AlphaRange::Gt1: {
      const double shift = w * model.mean();
      auto kernel = [&](double z, double) { return mix.q(s + 1, z + shift); };
      return fixed_s_integral(s, alpha, u, v, kernel, opts.quad);
    }
    case AlphaRange::Centered12: {
      if (w > 0.0) require_q_argument(mix, gamma_fn(1.0 - alpha) * std::pow(w, alpha), "ctr12-fixed-s");
      auto kernel = [&](double z, double zg) { return mix.q(s + 1, theta_ctr12(z, zg, w, alpha)); };
      return fixed_s_integral(s, alpha, u, v, kernel, opts.quad);
    }
    case AlphaRange::Centered2: {
      const double shift = 0.5 * w * w * model.variance();
      if (w > 0.0) require_q_argument(mix, -shift, "ctr2-fixed-s");
      auto kernel = [&](double z, double) { return mix.q(s + 1, z - shift); };
      return fixed_s_integral(s, alpha, u, v, kernel, opts.quad);
    }
  }
  throw DomainError("invalid regime");
}

double lt_eval_unit_intensity(const Regime& regime, const TailModel& model, double u, double v,
                              double w, const LimitOptions& opts) {
  if (!(u >= 0.0 && v >= 0.0 && w >= 0.0))
    throw DomainError("transform arguments u, v, w must be nonnegative");
  regime.check_model(model);
  const double alpha = model.alpha();
  const double gamma = 1.0 / alpha;
  const unsigned s = regime.s;

  if (regime.rule != SplitRule::FixedS) {
    return lt_eval(regime, model, MixingLaw::degenerate(1.0), u, v, w, opts);
  }

  const QuadOptions inner{1e-15, 1e-13, 400000};
  // int_0^1 g(eta) eta^{-1-alpha} d eta through eta = e^{-x}
  auto head_quad = [&](auto g) {
    auto f = [&](double x) {
      const double eta = std::exp(-x);
      const double g_val = g(eta);
      if (g_val == 0.0) return 0.0;
      return std::copysign(std::exp(std::log(std::abs(g_val)) + alpha * x), g_val);
    };
    return integrate(f, 0.0, kInf, inner).value;
  };
  auto top_quad = [&](double c) {
    auto f = [&](double eta) { return std::exp(-c * eta) * std::pow(eta, -1.0 - alpha); };
    return integrate(f, 1.0, kInf, inner).value;
  };
  auto base = [&](auto exponent) {
    const double log_s_fact = log_gamma(s + 1.0);
    auto f = [&](double z) {
      const double zg = std::pow(z, -gamma);
      if (std::isinf(zg)) return 0.0;
      const double top = (s == 0 || u == 0.0) ? z : z * alpha * top_quad(u * zg);
      if (top == 0.0) return 0.0;
      return std::exp(s * std::log(top) - log_s_fact - v * zg - exponent(z, zg));
    };
    return integrate_positive_axis(f, opts.quad).value;
  };

  switch (regime.range) {
    case AlphaRange::Lt1:
      return base([&](double z, double zg) {
        if (w == 0.0) return z;
        const double c = w * zg;
        return z * (1.0 + alpha * head_quad([c](double eta) { return -std::expm1(-c * eta); }));
      });
    case AlphaRange::Centered12:
      return base([&](double z, double zg) {
        if (w == 0.0) return z;
        const double c = w * zg;
        const double inner_value = head_quad([c](double eta) {
          const double x = c * eta;
          // 1 - x - e^{-x}, kept accurate for small x
          return x < 1e-3 ? -x * x / 2.0 + x * x * x / 6.0 - x * x * x * x / 24.0
                          : 1.0 - x - std::exp(-x);
        });
        return z * (1.0 + alpha * inner_value - c / (1.0 - gamma));
      });
    case AlphaRange::Gt1:
      return std::exp(-w * model.mean()) * base([](double z, double) { return z; });
    case AlphaRange::Centered2:
      return std::exp(0.5 * w * w * model.variance()) * base([](double z, double) { return z; });
  }
  throw DomainError("invalid regime");
}

double inverse_gamma_half_lt(double u, double scale) {
  if (!(u >= 0.0) || !(scale > 0.0)) throw DomainError("inverse_gamma_half_lt: bad argument");
  return std::exp(-2.0 * std::sqrt(scale * u));
}

}  // namespace tailsplit
