#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>

#include "tailsplit/errors.hpp"
#include "tailsplit/moments.hpp"
#include "tailsplit/finite_t.hpp"
#include "tailsplit/montecarlo.hpp"

using namespace tailsplit;
using Catch::Approx;

TEST_CASE("seed derivation", "[montecarlo]") {
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(derive_seed(5, 9) == derive_seed(5, 9));
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    double u = uniform01(rng);
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("split count per rule", "[montecarlo]") {
  CHECK(split_count(Regime::fixed_s(AlphaRange::Lt1, 3), 100.0, 50) == 3);
  CHECK(split_count(Regime::fixed_p(AlphaRange::Lt1, 0.5), 100.0, 51) == 25);
  CHECK(split_count(Regime::vanishing_p(AlphaRange::Lt1, 0.5), 100.0, 95) == 9);
}

TEST_CASE("empirical transform", "[montecarlo]") {
  std::vector<TripleSample> one{{1.0, 1.0, 1.0}};
  auto e = empirical_lt(one, 1, 1, 1);
  CHECK(e.value == Approx(std::exp(-3.0)).epsilon(1e-15));
  std::vector<TripleSample> many{{1, 2, 3}, {0.5, 0.1, 7}};
  auto z = empirical_lt(many, 0, 0, 0);
  CHECK(z.value == 1.0);
  CHECK(z.std_error == 0.0);
  CHECK_THROWS_AS(empirical_lt({}, 0, 0, 0), DomainError);
}

TEST_CASE("batch means", "[montecarlo]") {
  std::vector<double> x(1000);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(i % 10);
  auto e = batch_mean(x);
  CHECK(e.value == Approx(4.5).epsilon(1e-15));
  // every batch of 10 has the same mean
  CHECK(e.std_error == Approx(0.0).margin(1e-12));
}

TEST_CASE("raw path ordering", "[montecarlo]") {
  auto paths = simulate_raw_paths(TailModel::pareto(0.8), MixingLaw::gamma(2.0, 2.0),
                                  Regime::fixed_s(AlphaRange::Lt1, 3), 30.0, 2000, 11);
  for (const auto& p : paths) {
    REQUIRE(p.n >= 5);
    CHECK(p.xi <= p.min_top);
    CHECK(p.lambda >= 3.0 * p.xi);
    CHECK(p.lambda + p.xi + p.sigma == Approx(p.total).epsilon(1e-12));
  }
}

TEST_CASE("finite mean small-claim sum over t", "[montecarlo]") {
  auto set = simulate_paths(TailModel::pareto(2.0), MixingLaw::degenerate(1.0),
                            Regime::fixed_s(AlphaRange::Gt1, 0), 1e4, 10000, 5);
  std::vector<double> sigma;
  for (const auto& s : set.samples) sigma.push_back(s.sigma_part);
  auto e = batch_mean(sigma);
  // 2 less the largest claim's share, about U(t) Gamma(1/2) / t at this t
  const double exact = component_means(CountingSpec(MixingLaw::degenerate(1.0), 1e4), TailModel::pareto(2.0), 0).sigma / 1e4;
  CHECK(exact == Approx(2.0 - 100.0 * std::sqrt(M_PI) / 1e4).epsilon(1e-3));
  CHECK(std::abs(e.value - exact) <= 3.0 * e.std_error);
  CHECK(set.redraw_rate == 0.0);
}

TEST_CASE("determinism does not depend on threads", "[montecarlo]") {
  auto model = TailModel::pareto(1.5);
  auto mix = MixingLaw::discrete({{1.0, 0.5}, {3.0, 0.5}});
  auto regime = Regime::fixed_s(AlphaRange::Centered12, 1);
  auto a = simulate_paths(model, mix, regime, 200.0, 700, 77, {}, 1);
  auto b = simulate_paths(model, mix, regime, 200.0, 700, 77, {}, 4);
  REQUIRE(a.samples.size() == b.samples.size());
  CHECK(std::memcmp(a.samples.data(), b.samples.data(), a.samples.size() * sizeof(TripleSample)) == 0);
  auto c = simulate_paths(model, mix, regime, 200.0, 700, 78, {}, 1);
  CHECK(std::memcmp(a.samples.data(), c.samples.data(), a.samples.size() * sizeof(TripleSample)) != 0);
}

TEST_CASE("redraw warning for short horizons", "[montecarlo]") {
  auto set = simulate_paths(TailModel::pareto(0.5), MixingLaw::degenerate(1.0),
                            Regime::fixed_s(AlphaRange::Lt1, 2), 3.0, 2000, 1);
  CHECK(set.redraw_rate > 0.01);
  CHECK_FALSE(set.warnings.empty());
  CHECK(set.min_count_probability < 0.999);
}

TEST_CASE("LePage ratio moments", "[montecarlo]") {
  // E{R_(s)} = 1 + (s+1)/(gamma - 1) for several (alpha, s)
  LePageConfig cfg;
  cfg.K = 2000;
  for (double alpha : {0.3, 0.5, 0.7}) {
    auto study = lepage_study(alpha, {0, 1, 3}, cfg, 20000, 314);
    for (const auto& r : study.ratios) {
      const double exact = ratio_moment(r.s, 1, 1.0 / alpha);
      INFO("alpha=" << alpha << " s=" << r.s << " est=" << r.mean.value << " se=" << r.mean.std_error);
      CHECK(std::abs(r.mean.value - exact) <= 3.0 * r.mean.std_error);
      CHECK(r.min_value >= 1.0);
    }
  }
}

TEST_CASE("LePage triple and T", "[montecarlo]") {
  Rng rng(9);
  LePageConfig cfg;
  cfg.K = 500;
  for (int i = 0; i < 100; ++i) {
    auto t = simulate_lepage_triple(0.5, 2, cfg, rng);
    CHECK(t.lambda_part >= 2.0 * t.xi_part);
    CHECK(t.sigma_part >= 0.0);
  }
  auto ts = simulate_t_infinity(0.5, cfg, 5000, 1);
  CHECK(ts.min_value > 0.0);
  CHECK(ts.max_value <= 1.0);
  CHECK_THROWS_AS(simulate_ratio_r(0.5, 0, cfg, 100, 1, 6), DomainError);
  CHECK_NOTHROW(simulate_ratio_r(0.5, 0, cfg, 100, 1, 6, true));
  CHECK_THROWS_AS(simulate_lepage_triple(1.5, 0, cfg, rng), DomainError);
}

TEST_CASE("convergence report", "[montecarlo]") {
  auto q = query_grid({0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0});
  CHECK(q.size() == 8);
  auto rep = convergence_report(TailModel::pareto(2.0), MixingLaw::degenerate(1.0),
                                Regime::fixed_s(AlphaRange::Gt1, 0), {100.0, 1000.0}, q, 2000, 3);
  CHECK(rep.regime == "gt1-fixed-s");
  CHECK(rep.rows.size() == 16);
  CHECK(rep.horizons.size() == 2);
  for (const auto& r : rep.rows) {
    if (r.u == 0.0 && r.v == 0.0 && r.w == 0.0) {
      CHECK(r.empirical == 1.0);
      CHECK(r.gap == Approx(0.0).margin(1e-8));
    }
    CHECK(r.gap == Approx(std::abs(r.empirical - r.limit)).epsilon(1e-15));
  }
  auto again = convergence_report(TailModel::pareto(2.0), MixingLaw::degenerate(1.0),
                                  Regime::fixed_s(AlphaRange::Gt1, 0), {100.0, 1000.0}, q, 2000, 3);
  for (std::size_t i = 0; i < rep.rows.size(); ++i) CHECK(rep.rows[i].empirical == again.rows[i].empirical);
  CHECK_THROWS_AS(convergence_report(TailModel::pareto(2.0), MixingLaw::degenerate(1.0),
                                     Regime::fixed_s(AlphaRange::Gt1, 0), {}, q, 10, 3),
                  DomainError);
}

TEST_CASE("median", "[montecarlo]") {
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
}
