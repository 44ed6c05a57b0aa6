#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "tailsplit/errors.hpp"
#include "tailsplit/limit_lt.hpp"
#include "tailsplit/quadrature.hpp"

using namespace tailsplit;
using Catch::Approx;

namespace {

const QuadOptions kTight{1e-300, 1e-13, 800000};

double tail_oracle(double c, double alpha) {
  return integrate([&](double e) { return std::exp(-c * e) * std::pow(e, -1.0 - alpha); }, 1.0, kInf, kTight).value;
}

double head_oracle(double c, double alpha) {
  // grouped so that neither factor overflows as e -> 0
  return integrate_to_zero([&](double e) { return (-std::expm1(-c * e) / e) * std::pow(e, -alpha); }, 1.0, kTight)
      .value;
}

double centered_oracle(double c, double alpha) {
  return integrate_to_zero(
             [&](double e) {
               const double x = c * e;
               const double g = x < 1e-2 ? x * x * (0.5 - x / 6 + x * x / 24 - x * x * x / 120 + x * x * x * x / 720)
                                         : std::expm1(-x) + x;
               return (g / e / e) * std::pow(e, 1.0 - alpha);
             },
             1.0, kTight)
      .value;
}

struct Case {
  const char* name;
  double alpha;
};

const Case kRegimes[] = {{"lt1-fixed-s", 0.5},   {"lt1-vanishing", 0.6}, {"lt1-fixed-p", 0.4},
                         {"gt1-fixed-s", 2.0},   {"gt1-vanishing", 1.5}, {"gt1-fixed-p", 2.5},
                         {"ctr12-fixed-s", 1.5}, {"ctr2-fixed-s", 3.0}};

}  // namespace

TEST_CASE("tail inner integral", "[limit_lt]") {
  CHECK(inner_tail_integral(0.0, 0.5) == 2.0);
  // frozen from the quadrature oracle below
  CHECK(inner_tail_integral(1.0, 0.5) == Approx(0.178147711782).epsilon(1e-11));
  for (double alpha : {0.3, 0.5, 1.5, 2.7}) {
    for (double c : {1e-6, 0.01, 0.9, 4.0, 40.0}) {
      CHECK(inner_tail_integral(c, alpha) == Approx(tail_oracle(c, alpha)).epsilon(1e-10));
    }
  }
  // past c ~ 700 the value goes through logs; it stays positive until e^{-c} leaves the denormal range
  CHECK(inner_tail_integral(720.0, 0.5) > 0.0);
  CHECK(inner_tail_integral(800.0, 0.5) == 0.0);
  CHECK_THROWS_AS(inner_tail_integral(-1.0, 0.5), DomainError);
}

TEST_CASE("head inner integral", "[limit_lt]") {
  CHECK(inner_head_integral(0.0, 0.5) == 0.0);
  // with the tail part it rebuilds int_0^inf (1 - e^{-c eta}) eta^{-1-alpha} = Gamma(1-alpha) c^alpha / alpha
  const double full = inner_head_integral(1.0, 0.5) + 2.0 - inner_tail_integral(1.0, 0.5);
  CHECK(full == Approx(2.0 * std::sqrt(M_PI)).epsilon(1e-12));
  for (double alpha : {0.2, 0.5, 0.9}) {
    for (double c : {1e-5, 0.3, 1.0, 2.5, 60.0}) {
      CHECK(inner_head_integral(c, alpha) == Approx(head_oracle(c, alpha)).epsilon(1e-10));
    }
    // I_head(c) / c -> 1 / (1 - alpha)
    CHECK(inner_head_integral(1e-9, alpha) / 1e-9 == Approx(1.0 / (1.0 - alpha)).epsilon(1e-6));
  }
  CHECK_THROWS_AS(inner_head_integral(1.0, 1.5), DomainError);
}

TEST_CASE("centered inner integral", "[limit_lt]") {
  CHECK(inner_centered_integral(0.0, 1.5) == 0.0);
  for (double alpha : {1.1, 1.5, 1.9}) {
    for (double c : {1e-3, 0.5, 1.0, 3.0, 30.0}) {
      CHECK(inner_centered_integral(c, alpha) == Approx(centered_oracle(c, alpha)).epsilon(1e-9));
    }
    const double c = 1e-6;
    CHECK(inner_centered_integral(c, alpha) / (c * c) == Approx(1.0 / (2.0 * (2.0 - alpha))).epsilon(1e-5));
  }
}

TEST_CASE("normalization at zero", "[limit_lt]") {
  auto unit = MixingLaw::degenerate(1.0);
  auto g = MixingLaw::gamma(3.0, 2.0);
  for (const auto& c : kRegimes) {
    for (unsigned s : {0u, 2u}) {
      auto r = Regime::from_name(c.name, s, 0.3, 0.5);
      INFO(c.name << " s=" << s);
      CHECK(lt_eval(r, TailModel::pareto(c.alpha), unit, 0, 0, 0) == Approx(1.0).margin(1e-8));
      CHECK(lt_eval(r, TailModel::pareto(c.alpha), g, 0, 0, 0) == Approx(1.0).margin(1e-8));
    }
  }
}

TEST_CASE("regime examples", "[limit_lt]") {
  auto unit = MixingLaw::degenerate(1.0);
  auto two = TailModel::pareto(2.0);
  // the small-claim sum over t tends to mu Theta for every fixed s
  double base = lt_eval(Regime::fixed_s(AlphaRange::Gt1, 0), two, unit, 0, 0, 1.0);
  CHECK(base == Approx(std::exp(-2.0)).epsilon(1e-8));
  for (unsigned s : {1u, 5u}) {
    CHECK(std::abs(lt_eval(Regime::fixed_s(AlphaRange::Gt1, s), two, unit, 0, 0, 1.0) - base) < 1e-10);
  }
  // vanishing-p top sum tends to Theta / (1 - gamma)
  CHECK(lt_eval(Regime::vanishing_p(AlphaRange::Gt1), two, unit, 1.0, 0, 0) ==
        Approx(std::exp(-2.0)).epsilon(1e-14));

  // fixed p = 0.5, alpha = 1/2: top sum limit is exp(-c sqrt(u))
  auto half = TailModel::pareto(0.5);
  auto fp = Regime::fixed_p(AlphaRange::Lt1, 0.5);
  LimitOptions lit;
  lit.variant = FormulaVariant::Literal;
  CHECK(lt_eval(fp, half, unit, 1.0, 0, 0, lit) == Approx(std::exp(-2.0 * std::sqrt(M_PI))).epsilon(1e-12));
  CHECK(lt_eval(fp, half, unit, 1.0, 0, 0) == Approx(std::exp(-std::sqrt(M_PI))).epsilon(1e-12));
}

TEST_CASE("unit intensity path agrees with the q form", "[limit_lt]") {
  auto unit = MixingLaw::degenerate(1.0);
  for (const auto& c : kRegimes) {
    auto r = Regime::from_name(c.name, 2, 0.5, 0.5);
    auto m = TailModel::pareto(c.alpha);
    for (double u : {0.0, 0.4, 2.0}) {
      for (double w : {0.0, 0.3, 1.1}) {
        INFO(c.name << " u=" << u << " w=" << w);
        CHECK(std::abs(lt_eval(r, m, unit, u, 0.7, w) - lt_eval_unit_intensity(r, m, u, 0.7, w)) < 1e-10);
      }
    }
  }
}

TEST_CASE("head argument has a tail-integral closed form", "[limit_lt]") {
  // z (1 + alpha I_head(w z^-gamma)) = z alpha I_tail(w z^-gamma) + Gamma(1-alpha) w^alpha, and the
  // centered argument has the same form for alpha in (1, 2). Rebuild the s = 0 transform from it.
  auto g = MixingLaw::gamma(2.0, 1.0);
  for (double alpha : {0.5, 1.5}) {
    const double gamma = 1.0 / alpha;
    const double w = 0.3;
    auto theta = [&](double z) {
      return z * alpha * tail_oracle(w * std::pow(z, -gamma), alpha) + std::tgamma(1.0 - alpha) * std::pow(w, alpha);
    };
    auto oracle = integrate_positive_axis([&](double z) { return g.q(1, theta(z)); }, {1e-12, 1e-10, 400000});
    auto range = alpha < 1.0 ? AlphaRange::Lt1 : AlphaRange::Centered12;
    CHECK(lt_eval(Regime::fixed_s(range, 0), TailModel::pareto(alpha), g, 0, 0, w) ==
          Approx(oracle.value).epsilon(1e-8));
  }
}

TEST_CASE("monotone in each argument", "[limit_lt]") {
  auto g = MixingLaw::gamma(2.0, 2.0);
  for (const auto& c : kRegimes) {
    auto r = Regime::from_name(c.name, 1, 0.5, 0.5);
    auto m = TailModel::pareto(c.alpha);
    const double grid[] = {0.0, 0.25, 1.0, 3.0};
    double pu = 2.0, pv = 2.0, pw = 2.0;
    for (double x : grid) {
      double a = lt_eval(r, m, g, x, 0.5, 0.2);
      double b = lt_eval(r, m, g, 0.5, x, 0.2);
      INFO(c.name << " x=" << x);
      CHECK(a <= pu + 1e-12);
      CHECK(b <= pv + 1e-12);
      pu = a;
      pv = b;
      // centered sums are not positive, so w can raise the transform above 1
      if (!r.centered()) {
        double cw = lt_eval(r, m, g, 0.5, 0.5, x);
        CHECK(cw <= pw + 1e-12);
        pw = cw;
      }
    }
  }
}

TEST_CASE("structural identities", "[limit_lt]") {
  auto unit = MixingLaw::degenerate(1.0);
  auto g = MixingLaw::gamma(2.0, 2.0);
  // independence of the Gaussian part with unit intensity
  auto ctr2 = Regime::fixed_s(AlphaRange::Centered2, 1);
  auto three = TailModel::pareto(3.0);
  for (double u : {0.0, 0.5}) {
    for (double v : {0.2, 1.0}) {
      for (double w : {0.3, 0.8}) {
        double joint = lt_eval(ctr2, three, unit, u, v, w);
        double split = lt_eval(ctr2, three, unit, u, v, 0) * lt_eval(ctr2, three, unit, 0, 0, w);
        CHECK(std::abs(joint - split) < 1e-10);
      }
    }
  }
  // Gaussian marginal: q_0(-w^2 sigma^2 / 2)
  CHECK(lt_eval(ctr2, three, unit, 0, 0, 0.6) == Approx(std::exp(0.18 * 0.75)).epsilon(1e-9));

  // fixed p: v only enters through e^{-v x}
  for (const char* name : {"lt1-fixed-p", "gt1-fixed-p"}) {
    auto r = Regime::from_name(name, 0, 0.3, 0.5);
    auto m = TailModel::pareto(name[0] == 'l' ? 0.5 : 2.0);
    for (auto variant : {FormulaVariant::Consistent, FormulaVariant::Literal}) {
      LimitOptions o;
      o.variant = variant;
      double x = variant == FormulaVariant::Consistent ? m.quantile(0.7) : m.quantile(0.3);
      CHECK(lt_eval(r, m, g, 0.4, 1.3, 0.2, o) ==
            Approx(std::exp(-1.3 * x) * lt_eval(r, m, g, 0.4, 0, 0.2, o)).epsilon(1e-14));
    }
  }
  // vanishing p with alpha < 1: small-claim sum tends to Theta / (gamma - 1)
  auto lv = Regime::vanishing_p(AlphaRange::Lt1);
  auto m = TailModel::pareto(0.4);
  CHECK(lt_eval(lv, m, g, 0, 0, 0.9) == Approx(g.q(0, 0.9 / (2.5 - 1.0))).epsilon(1e-14));
}

TEST_CASE("dispatch errors", "[limit_lt]") {
  auto unit = MixingLaw::degenerate(1.0);
  CHECK_THROWS_AS(lt_eval(Regime::fixed_s(AlphaRange::Lt1, 0), TailModel::pareto(1.5), unit, 0, 0, 0), RegimeError);
  CHECK_THROWS_AS(lt_eval(Regime::fixed_s(AlphaRange::Centered2, 0), TailModel::pareto(1.5), unit, 0, 0, 0),
                  RegimeError);
  CHECK_THROWS_AS(Regime::from_name("ctr12-fixed-p"), DomainError);
  CHECK_THROWS_AS(Regime::from_name("nope"), DomainError);
  CHECK_THROWS_AS(Regime::fixed_p(AlphaRange::Gt1, 1.0), DomainError);
  CHECK_THROWS_AS(lt_eval(Regime::fixed_s(AlphaRange::Gt1, 0), TailModel::pareto(2.0), unit, -1, 0, 0),
                  DomainError);
  // Gaussian part needs q at a negative argument beyond the Gamma law's floor
  CHECK_THROWS_AS(lt_eval(Regime::fixed_s(AlphaRange::Centered2, 0), TailModel::pareto(3.0),
                          MixingLaw::gamma(1.0, 0.1), 0, 0, 1.0),
                  DivergenceError);
  CHECK_THROWS_AS(lt_eval(Regime::fixed_s(AlphaRange::Centered12, 0), TailModel::pareto(1.5),
                          MixingLaw::gamma(1.0, 0.5), 0, 0, 1.0),
                  DivergenceError);
}

TEST_CASE("normalizations", "[limit_lt]") {
  using N = Normalizer;
  auto d = normalization_descriptor(Regime::fixed_s(AlphaRange::Lt1, 2));
  CHECK((d.lambda == N::Ut && d.xi == N::Ut && d.sigma == N::Ut && !d.sigma_centered));
  d = normalization_descriptor(Regime::fixed_p(AlphaRange::Gt1, 0.5));
  CHECK((d.lambda == N::T && d.xi == N::One && d.sigma == N::T));
  d = normalization_descriptor(Regime::fixed_s(AlphaRange::Centered2, 0));
  CHECK((d.lambda == N::Ut && d.xi == N::Ut && d.sigma == N::SqrtT && d.sigma_centered));
  d = normalization_descriptor(Regime::vanishing_p(AlphaRange::Lt1));
  CHECK((d.lambda == N::Ut && d.xi == N::UInvP && d.sigma == N::TpUInvP));
  CHECK(describe(N::TpUInvP) == "t*p(t)*U(1/p(t))");

  auto nv = normalizer_values(Regime::vanishing_p(AlphaRange::Lt1, 0.5), TailModel::pareto(0.5), 100.0);
  CHECK(nv.lambda == Approx(1e4).epsilon(1e-14));
  CHECK(nv.xi == Approx(100.0).epsilon(1e-14));
  CHECK(nv.sigma == Approx(100.0 * 0.1 * 100.0).epsilon(1e-14));
}

TEST_CASE("inverse gamma shape one half", "[limit_lt]") {
  // Levy law with scale b: density sqrt(b/pi) x^{-3/2} e^{-b/x}
  const double b = M_PI / 4.0, u = 0.8;
  auto direct = integrate_positive_axis(
      [&](double x) { return std::sqrt(b / M_PI) * std::pow(x, -1.5) * std::exp(-b / x - u * x); },
      {1e-14, 1e-12, 400000});
  CHECK(inverse_gamma_half_lt(u, b) == Approx(direct.value).epsilon(1e-9));
}
