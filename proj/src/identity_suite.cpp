#include "tailsplit/identity_suite.hpp"

#include <cmath>
#include <exception>
#include <functional>
#include <sstream>

#include "tailsplit/finite_t.hpp"
#include "tailsplit/limit_lt.hpp"
#include "tailsplit/mixing_law.hpp"
#include "tailsplit/moments.hpp"
#include "tailsplit/quadrature.hpp"
#include "tailsplit/tail_model.hpp"

namespace tailsplit {
namespace {

bool close(double a, double b, double rel, double abs = 0.0) {
  if (std::isinf(a) || std::isinf(b)) return a == b;
  return std::abs(a - b) <= abs + rel * std::max(std::abs(a), std::abs(b));
}

std::string fmt(double a, double b) {
  std::ostringstream os;
  os.precision(15);
  os << "lhs=" << a << " rhs=" << b;
  return os.str();
}

void run(std::vector<CheckResult>& out, const std::string& name,
         const std::function<CheckResult()>& body) {
  try {
    CheckResult r = body();
    r.name = name;
    out.push_back(std::move(r));
  } catch (const std::exception& e) {
    out.push_back({name, false, std::string("threw: ") + e.what()});
  }
}

struct RegimeCase {
  const char* name;
  double alpha;
};

}  // namespace

std::vector<CheckResult> run_identity_suite() {
  std::vector<CheckResult> out;
  const auto unit = MixingLaw::degenerate(1.0);

  const RegimeCase cases[] = {{"lt1-fixed-s", 0.5},   {"lt1-vanishing", 0.5},  {"lt1-fixed-p", 0.5},
                              {"gt1-fixed-s", 2.0},   {"gt1-vanishing", 2.0},  {"gt1-fixed-p", 2.0},
                              {"ctr12-fixed-s", 1.5}, {"ctr2-fixed-s", 3.0}};
  for (const auto& c : cases) {
    run(out, std::string("limit transform at 0 is 1: ") + c.name, [&] {
      auto regime = Regime::from_name(c.name, 1, 0.5, 0.5);
      double value = lt_eval(regime, TailModel::pareto(c.alpha), unit, 0.0, 0.0, 0.0);
      return CheckResult{"", close(value, 1.0, 1e-9), fmt(value, 1.0)};
    });
  }

  run(out, "exact transform at 0 is 1", [&] {
    CountingSpec spec(MixingLaw::gamma(2.0, 2.0), 10.0);
    auto lt = exact_joint_lt(spec, TailModel::pareto(1.5), {0.0, 0.0, 0.0, 2});
    return CheckResult{"", close(lt.value, 1.0, 1e-8), fmt(lt.value, 1.0)};
  });

  run(out, "ratio variance identity", [&] {
    double worst = 0.0;
    for (double g : {1.25, 1.5, 2.0, 3.0, 5.0}) {
      for (unsigned s : {0u, 1u, 4u}) {
        double m1 = ratio_moment(s, 1, g);
        double m2 = ratio_moment(s, 2, g);
        double var = ratio_variance(s, g).gamma_form;
        worst = std::max(worst, std::abs((m2 - m1 * m1) - var) / var);
      }
    }
    std::ostringstream os;
    os << "max relative gap " << worst;
    return CheckResult{"", worst < 1e-12, os.str()};
  });

  run(out, "ratio variance identity, exact at gamma = 2", [&] {
    Rational g(2);
    bool ok = true;
    for (unsigned s = 0; s <= 6; ++s) {
      Rational m1 = ratio_moment_exact(s, 1, g);
      Rational m2 = ratio_moment_exact(s, 2, g);
      Rational var = Rational(static_cast<std::int64_t>(s + 1)) * g * g /
                     ((g - 1) * (g - 1) * (2 * g - 1));
      ok = ok && (m2 - m1 * m1 == var);
    }
    return CheckResult{"", ok, "s = 0..6"};
  });

  run(out, "correlation closed form matches moment route", [&] {
    double worst = 0.0;
    for (double g : {1.5, 2.0, 4.0}) {
      auto c = correlation_r0sq_tinf(g);
      worst = std::max(worst, std::abs(c.rho - c.rho_from_moments));
      double cov = c.mean_r2_t - c.mean_r2 * c.mean_t;
      worst = std::max(worst, std::abs(cov - c.covariance));
    }
    std::ostringstream os;
    os << "max abs gap " << worst;
    return CheckResult{"", worst < 1e-12, os.str()};
  });

  run(out, "q integral identity", [&] {
    double worst = 0.0;
    for (const auto& mix : {MixingLaw::gamma(2.0, 2.0), MixingLaw::discrete({{1.0, 0.5}, {3.0, 0.5}})}) {
      for (unsigned r : {0u, 1u, 2u}) {
        for (double beta : {0.5, 1.5}) {
          auto id = verify_q_integral_identity(mix, r, beta);
          worst = std::max(worst, std::abs(id.lhs - id.rhs) / std::abs(id.rhs));
        }
      }
    }
    std::ostringstream os;
    os << "max relative gap " << worst;
    return CheckResult{"", worst < 1e-8, os.str()};
  });

  run(out, "incomplete gamma recurrence", [&] {
    // Gamma(a+1, x) = a Gamma(a, x) + x^a e^{-x}
    double worst = 0.0;
    for (double a : {-2.5, -1.5, -0.5, 0.5, 1.5}) {
      for (double x : {0.01, 0.5, 1.0, 3.0, 20.0}) {
        double lhs = upper_incomplete_gamma(a + 1.0, x);
        double rhs = a * upper_incomplete_gamma(a, x) + std::pow(x, a) * std::exp(-x);
        worst = std::max(worst, std::abs(lhs - rhs) / std::abs(lhs));
      }
    }
    std::ostringstream os;
    os << "max relative gap " << worst;
    return CheckResult{"", worst < 1e-11, os.str()};
  });

  run(out, "unit intensity limit agrees with q form", [&] {
    double worst = 0.0;
    for (const auto& c : cases) {
      auto regime = Regime::from_name(c.name, 1, 0.5, 0.5);
      auto model = TailModel::pareto(c.alpha);
      double a = lt_eval(regime, model, unit, 0.7, 1.1, 0.4);
      double b = lt_eval_unit_intensity(regime, model, 0.7, 1.1, 0.4);
      worst = std::max(worst, std::abs(a - b));
    }
    std::ostringstream os;
    os << "max abs gap " << worst;
    return CheckResult{"", worst < 1e-7, os.str()};
  });

  run(out, "fixed-p top-claim limit is inverse gamma with shape 1/2", [&] {
    auto regime = Regime::fixed_p(AlphaRange::Lt1, 0.5);
    auto model = TailModel::pareto(0.5);
    double worst = 0.0;
    for (double u : {0.1, 1.0, 4.0}) {
      double lt = lt_eval(regime, model, unit, u, 0.0, 0.0);
      double ig = inverse_gamma_half_lt(u, M_PI / 4.0);
      worst = std::max(worst, std::abs(lt - ig));
    }
    std::ostringstream os;
    os << "max abs gap " << worst << " (scale pi/4)";
    return CheckResult{"", worst < 1e-9, os.str()};
  });

  run(out, "T mean and variance", [&] {
    double a = 0.5;
    bool ok = close(t_infinity_mean(a), 0.5, 1e-15) && close(t_infinity_variance(a), 1.0 / 12.0, 1e-15);
    return CheckResult{"", ok, fmt(t_infinity_variance(a), 1.0 / 12.0)};
  });

  return out;
}

}  // namespace tailsplit
