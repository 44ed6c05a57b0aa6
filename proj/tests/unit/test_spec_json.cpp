#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "tailsplit/errors.hpp"
#include "tailsplit/spec_json.hpp"

using namespace tailsplit;
using Catch::Approx;

TEST_CASE("tail model round trip", "[spec_json]") {
  auto m = tail_model_from_json(parse_json(R"({"alpha": 1.5, "x_min": 2})"));
  CHECK(m.alpha() == 1.5);
  CHECK(m.x_min() == 2.0);
  CHECK(m.slowly_varying().c == Approx(std::pow(2.0, 1.5)).epsilon(1e-15));
  auto back = tail_model_from_json(to_json(m));
  CHECK(back.survival(7.0) == m.survival(7.0));

  auto lp = tail_model_from_json(parse_json(R"({"alpha": 0.8, "sv": {"kind": "log_power", "rho": 0.3}})"));
  CHECK_FALSE(lp.is_pareto());
  CHECK(tail_model_from_json(to_json(lp)).survival(50.0) == lp.survival(50.0));

  CHECK_THROWS_AS(tail_model_from_json(parse_json(R"({"x_min": 2})")), DomainError);
  CHECK_THROWS_AS(tail_model_from_json(parse_json(R"({"alpha": "two"})")), DomainError);
  CHECK_THROWS_AS(tail_model_from_json(parse_json(R"({"alpha": 2, "sv": {"kind": "weird"}})")), DomainError);
  CHECK_THROWS_AS(parse_json("{not json"), DomainError);
}

TEST_CASE("mixing law shorthand and JSON", "[spec_json]") {
  CHECK(parse_mixing_law("degenerate:1").kind() == MixingKind::Degenerate);
  auto g = parse_mixing_law("gamma:2,3");
  CHECK(g.shape() == 2.0);
  CHECK(g.rate() == 3.0);
  auto d = parse_mixing_law("discrete:1@0.5,3@0.5");
  CHECK(d.atoms().size() == 2);
  CHECK(d.mean() == Approx(2.0).epsilon(1e-15));
  auto j = parse_mixing_law(R"({"kind": "gamma", "shape": 1.5, "rate": 0.5})");
  CHECK(j.mean() == Approx(3.0).epsilon(1e-15));
  for (const auto& mix : {g, d, j}) {
    auto back = mixing_law_from_json(to_json(mix));
    CHECK(back.q(1, 0.7) == mix.q(1, 0.7));
  }
  CHECK_THROWS_AS(parse_mixing_law("gamma:2"), DomainError);
  CHECK_THROWS_AS(parse_mixing_law("poisson:1"), DomainError);
  CHECK_THROWS_AS(parse_mixing_law("degenerate:x"), DomainError);
  CHECK_THROWS_AS(parse_mixing_law("discrete:1@0.4"), DomainError);
}

TEST_CASE("regime JSON", "[spec_json]") {
  auto r = regime_from_json(parse_json(R"({"name": "lt1-fixed-p", "p": 0.25})"));
  CHECK(r.rule == SplitRule::FixedP);
  CHECK(r.p == 0.25);
  auto back = regime_from_json(to_json(r));
  CHECK(back.name() == "lt1-fixed-p");
  CHECK(back.p == 0.25);
  auto s = regime_from_json(parse_json(R"({"name": "ctr2-fixed-s", "s": 3})"));
  CHECK(s.s == 3);
  CHECK_THROWS_AS(regime_from_json(parse_json(R"({"name": "gt1-fixed-s", "s": -1})")), DomainError);
  CHECK_THROWS_AS(regime_from_json(parse_json(R"({"s": 1})")), DomainError);
}
