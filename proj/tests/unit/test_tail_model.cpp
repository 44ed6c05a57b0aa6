#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "tailsplit/errors.hpp"
#include "tailsplit/quadrature.hpp"
#include "tailsplit/rng.hpp"
#include "tailsplit/tail_model.hpp"

using namespace tailsplit;
using Catch::Approx;

TEST_CASE("pareto survival and quantiles", "[tail_model]") {
  auto half = TailModel::pareto(0.5);
  auto two = TailModel::pareto(2.0);
  CHECK(half.survival(4.0) == Approx(0.5).epsilon(1e-15));
  CHECK(two.survival(10.0) == Approx(0.01).epsilon(1e-15));
  CHECK(half.survival(1.0) == 1.0);
  CHECK(half.survival(0.3) == 1.0);
  CHECK(half.tail_quantile(9.0) == Approx(81.0).epsilon(1e-14));
  CHECK(two.tail_quantile(100.0) == Approx(10.0).epsilon(1e-14));
  CHECK(half.tail_quantile(1.0) == 1.0);
  CHECK(TailModel::pareto(1.0).quantile(0.5) == Approx(2.0).epsilon(1e-14));
  CHECK(half.quantile(0.75) == Approx(16.0).epsilon(1e-14));
  CHECK(half.quantile(0.0) == 1.0);
  CHECK_THROWS_AS(half.tail_quantile(0.5), DomainError);
  CHECK_THROWS_AS(half.quantile(1.0), DomainError);
}

TEST_CASE("x_min scaling", "[tail_model]") {
  auto m = TailModel::pareto(1.5, 3.0);
  CHECK(m.survival(3.0) == 1.0);
  CHECK(m.survival(6.0) == Approx(std::pow(2.0, -1.5)).epsilon(1e-14));
  CHECK(m.tail_quantile(8.0) == Approx(3.0 * 4.0).epsilon(1e-14));
  CHECK(m.mean() == Approx(3.0 * 1.5 / 0.5).epsilon(1e-14));
}

TEST_CASE("construction is validated", "[tail_model]") {
  CHECK_THROWS_AS(TailModel::pareto(0.0), DomainError);
  CHECK_THROWS_AS(TailModel::pareto(-1.0), DomainError);
  CHECK_THROWS_AS(TailModel::pareto(1.0, 0.0), DomainError);
  // c must make survival(x_min) = 1
  CHECK_THROWS_AS(TailModel(2.0, 1.0, {SlowlyVaryingKind::Constant, 2.0, 0.0}), DomainError);
  // rho above alpha makes the survival increase near x_min
  CHECK_THROWS_AS(TailModel::log_power(0.5, 0.8), DomainError);
}

TEST_CASE("truncated means", "[tail_model]") {
  auto two = TailModel::pareto(2.0);
  auto tm = two.truncated_means(2.0);
  // E{X | X <= 2} = (int_1^2 x 2 x^-3 dx) / F(2) = 1 / (3/4), E{X | X > 2} = 2 * 2
  CHECK(tm.lower == Approx(4.0 / 3.0).epsilon(1e-14));
  CHECK(tm.upper == Approx(4.0).epsilon(1e-14));
  CHECK(two.partial_mean_below(2.0) + two.partial_mean_above(2.0) == Approx(2.0).epsilon(1e-14));
  CHECK(two.truncated_means(1e12).lower == Approx(2.0).epsilon(1e-10));
  CHECK(std::isinf(TailModel::pareto(0.5).truncated_means(10.0).upper));
  CHECK(std::isinf(TailModel::pareto(0.5).mean()));
  CHECK(std::isinf(TailModel::pareto(2.0).variance()));
  CHECK(TailModel::pareto(3.0).variance() == Approx(3.0 / 4.0).epsilon(1e-14));
  CHECK_THROWS_AS(two.truncated_means(0.5), DomainError);
}

TEST_CASE("log-power family", "[tail_model]") {
  auto m = TailModel::log_power(1.5, 0.7, 2.0);
  CHECK(m.survival(2.0) == Approx(1.0).epsilon(1e-15));
  double prev = 1.0;
  for (double x = 2.0; x < 1e8; x *= 1.9) {
    double s = m.survival(x);
    CHECK(s <= prev);
    prev = s;
    // quantile inverts survival
    if (s > 1e-300 && s < 1.0) CHECK(m.quantile_from_survival(s) == Approx(x).epsilon(1e-9));
  }
  // density integrates to one and the mean matches the quadrature oracle
  auto dens = integrate([&](double x) { return m.density(x); }, 2.0, kInf, {1e-13, 1e-11, 800000});
  CHECK(dens.value == Approx(1.0).epsilon(1e-8));
  auto mean = integrate([&](double x) { return m.survival(x); }, 2.0, kInf, {1e-13, 1e-11, 800000});
  CHECK(m.mean() == Approx(2.0 + mean.value).epsilon(1e-7));
  auto tm = m.truncated_means(10.0);
  auto lower = integrate([&](double x) { return x * m.density(x); }, 2.0, 10.0);
  CHECK(m.partial_mean_below(10.0) == Approx(lower.value).epsilon(1e-8));
  CHECK(tm.lower == Approx(lower.value / m.cdf(10.0)).epsilon(1e-8));
}

TEST_CASE("regular variation on a log grid", "[tail_model]") {
  auto m = TailModel::pareto(0.8);
  for (double x = 1.0; x < 1e12; x *= 10.0) {
    CHECK(m.survival(x) * std::pow(x, 0.8) == Approx(1.0).epsilon(1e-6));
  }
  auto lp = TailModel::log_power(0.8, 0.5);
  for (double x = 1e3; x < 1e12; x *= 10.0) {
    // survival(2x)/survival(x) -> 2^{-alpha}
    double ratio = lp.survival(2.0 * x) / lp.survival(x);
    CHECK(ratio == Approx(std::pow(2.0, -0.8)).epsilon(0.05));
  }
}

TEST_CASE("sampling", "[tail_model]") {
  auto one = TailModel::pareto(1.0);
  CHECK(one.quantile_from_survival(1.0) == 1.0);
  CHECK(one.quantile_from_survival(0.5) == Approx(2.0).epsilon(1e-14));
  Rng rng(42);
  auto three = TailModel::pareto(3.0);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    double x = three.sample(rng);
    REQUIRE(x >= 1.0);
    sum += x;
  }
  // mean 1.5, variance 0.75
  CHECK(std::abs(sum / n - 1.5) < 4.0 * std::sqrt(0.75 / n));
}
