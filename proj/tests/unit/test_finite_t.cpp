#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "tailsplit/errors.hpp"
#include "tailsplit/finite_t.hpp"
#include "tailsplit/quadrature.hpp"
#include "tailsplit/rng.hpp"

using namespace tailsplit;
using Catch::Approx;

namespace {

// Plain path simulation kept separate from the library's simulator:
// Theta = 1, N ~ Poisson(t), Pareto claims by inversion, full sort.
struct Triple {
  double lambda, xi, sigma;
};

std::vector<Triple> simulate(double alpha, double t, unsigned s, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::poisson_distribution<int> count(t);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Triple> out;
  std::vector<double> x;
  for (std::size_t i = 0; i < n; ++i) {
    x.resize(count(rng));
    for (auto& v : x) v = std::pow(1.0 - unif(rng), -1.0 / alpha);
    std::sort(x.begin(), x.end(), std::greater<>());
    Triple tr{0, 0, 0};
    for (std::size_t k = 0; k < x.size(); ++k) {
      if (k < s) tr.lambda += x[k];
      else if (k == s) tr.xi = x[k];
      else tr.sigma += x[k];
    }
    out.push_back(tr);
  }
  return out;
}

double claim_lt_oracle(double alpha, double u) {
  return integrate([&](double x) { return alpha * std::pow(x, -alpha - 1.0) * std::exp(-u * x); }, 1.0, kInf,
                   {1e-15, 1e-13, 400000})
      .value;
}

}  // namespace

TEST_CASE("pgf derivatives", "[finite_t]") {
  CountingSpec p(MixingLaw::degenerate(1.0), 10.0);
  CHECK(pgf_derivative(p, 0, 1.0) == Approx(1.0).epsilon(1e-15));
  CHECK(pgf_derivative(p, 2, 1.0) == Approx(100.0).epsilon(1e-14));
  CHECK(pgf(p, 0.3) == Approx(std::exp(-7.0)).epsilon(1e-14));
  CountingSpec g(MixingLaw::gamma(2.0, 2.0), 4.0);
  CHECK(pgf_derivative(g, 1, 0.5) == Approx(0.5).epsilon(1e-14));
  // negative binomial pgf (b / (b + t (1 - z)))^a
  CHECK(pgf(g, 0.2) == Approx(std::pow(2.0 / (2.0 + 4.0 * 0.8), 2.0)).epsilon(1e-14));
  CHECK_THROWS_AS(CountingSpec(MixingLaw::degenerate(1.0), 0.0), DomainError);
}

TEST_CASE("count pmf", "[finite_t]") {
  CHECK(count_pmf(CountingSpec(MixingLaw::degenerate(1.0), 2.0), 0) == Approx(std::exp(-2.0)).epsilon(1e-15));
  CountingSpec geo(MixingLaw::gamma(1.0, 1.0), 1.0);
  for (unsigned k = 0; k < 30; ++k) CHECK(count_pmf(geo, k) == Approx(std::pow(2.0, -(k + 1.0))).epsilon(1e-12));
  for (const auto& mix : {MixingLaw::degenerate(1.3), MixingLaw::gamma(2.5, 0.5),
                          MixingLaw::discrete({{1.0, 0.5}, {3.0, 0.5}})}) {
    CountingSpec spec(mix, 7.0);
    double total = 0.0, mean = 0.0;
    for (unsigned n = 0; n < 2000; ++n) {
      double p = count_pmf(spec, n);
      total += p;
      mean += n * p;
    }
    CHECK(total == Approx(1.0).epsilon(1e-12));
    CHECK(mean == Approx(7.0 * mix.mean()).epsilon(1e-10));
  }
}

TEST_CASE("claim transform", "[finite_t]") {
  for (double alpha : {0.5, 1.0, 2.5}) {
    auto m = TailModel::pareto(alpha);
    for (double u : {0.01, 0.5, 3.0}) {
      CHECK(claim_lt(m, u) == Approx(claim_lt_oracle(alpha, u)).epsilon(1e-10));
      CHECK(claim_lt_complement(m, u) == Approx(1.0 - claim_lt_oracle(alpha, u)).epsilon(1e-8));
    }
  }
}

TEST_CASE("joint transform at zero is one", "[finite_t]") {
  for (double t : {10.0, 100.0, 1000.0}) {
    for (unsigned s : {0u, 1u, 3u}) {
      auto lt = exact_joint_lt(CountingSpec(MixingLaw::gamma(2.0, 2.0), t), TailModel::pareto(0.7),
                               {0.0, 0.0, 0.0, s});
      CHECK(std::abs(lt.value - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("equal arguments give the aggregate transform", "[finite_t]") {
  // u = v = w collapses the split back to E{e^{-x S(t)}} = Q_t(phi(x)).
  for (const auto& mix : {MixingLaw::degenerate(1.0), MixingLaw::gamma(2.0, 3.0)}) {
    for (double alpha : {0.6, 1.7}) {
      auto m = TailModel::pareto(alpha);
      for (double t : {3.0, 40.0}) {
        CountingSpec spec(mix, t);
        for (unsigned s : {0u, 2u}) {
          for (double x : {0.002, 0.05}) {
            double agg = mix.q(0, t * (1.0 - claim_lt_oracle(alpha, x)));
            auto lt = exact_joint_lt(spec, m, {x, x, x, s});
            CHECK(lt.value == Approx(agg).epsilon(1e-8));
          }
        }
      }
    }
  }
}

TEST_CASE("joint transform matches simulation", "[finite_t]") {
  const double alpha = 0.7, t = 50.0;
  const unsigned s = 2;
  auto paths = simulate(alpha, t, s, 40000, 2024);
  auto m = TailModel::pareto(alpha);
  CountingSpec spec(MixingLaw::degenerate(1.0), t);
  for (double u : {0.0, 0.01}) {
    for (double v : {0.0, 0.05}) {
      for (double w : {0.0, 0.02}) {
        double sum = 0.0, sq = 0.0;
        for (const auto& p : paths) {
          double e = std::exp(-u * p.lambda - v * p.xi - w * p.sigma);
          sum += e;
          sq += e * e;
        }
        const double n = static_cast<double>(paths.size());
        const double mean = sum / n;
        const double se = std::sqrt(std::max(sq / n - mean * mean, 0.0) / n);
        auto lt = exact_joint_lt(spec, m, {u, v, w, s});
        INFO("u=" << u << " v=" << v << " w=" << w);
        CHECK(std::abs(lt.value - mean) <= 3.0 * se + 1e-12);
      }
    }
  }
}

TEST_CASE("transform is monotone in each argument", "[finite_t]") {
  CountingSpec spec(MixingLaw::discrete({{0.5, 0.5}, {2.0, 0.5}}), 20.0);
  auto m = TailModel::log_power(1.2, 0.5);
  double prev_u = 2.0, prev_v = 2.0, prev_w = 2.0;
  for (double x : {0.0, 0.01, 0.1, 1.0}) {
    double a = exact_joint_lt(spec, m, {x, 0.05, 0.05, 1}).value;
    double b = exact_joint_lt(spec, m, {0.05, x, 0.05, 1}).value;
    double c = exact_joint_lt(spec, m, {0.05, 0.05, x, 1}).value;
    CHECK(a <= prev_u + 1e-12);
    CHECK(b <= prev_v + 1e-12);
    CHECK(c <= prev_w + 1e-12);
    prev_u = a;
    prev_v = b;
    prev_w = c;
  }
}

TEST_CASE("component means", "[finite_t]") {
  auto two = TailModel::pareto(2.0);
  auto cm = component_means(CountingSpec(MixingLaw::degenerate(1.0), 10.0), two, 1);
  CHECK(cm.total == 20.0);
  CHECK(cm.lambda + cm.xi + cm.sigma == Approx(cm.total).epsilon(1e-8));

  auto g = component_means(CountingSpec(MixingLaw::gamma(2.0, 4.0), 30.0), TailModel::pareto(3.0), 2);
  CHECK(g.total == Approx(30.0 * 0.5 * 1.5).epsilon(1e-14));
  CHECK(g.lambda + g.xi + g.sigma == Approx(g.total).epsilon(1e-8));

  // infinite claim mean: Lambda and S diverge for s >= 1; xi finite for gamma < s + 1
  auto heavy = component_means(CountingSpec(MixingLaw::degenerate(1.0), 50.0), TailModel::pareto(0.7), 2);
  CHECK(std::isinf(heavy.lambda));
  CHECK(std::isinf(heavy.total));
  CHECK(std::isfinite(heavy.xi));
  CHECK(std::isfinite(heavy.sigma));
  auto s0 = component_means(CountingSpec(MixingLaw::degenerate(1.0), 50.0), TailModel::pareto(0.7), 0);
  CHECK(s0.lambda == 0.0);
  CHECK(std::isinf(s0.xi));
}

TEST_CASE("component means match simulation", "[finite_t]") {
  const double alpha = 0.7, t = 50.0;
  const unsigned s = 2;
  auto paths = simulate(alpha, t, s, 40000, 99);
  auto cm = component_means(CountingSpec(MixingLaw::degenerate(1.0), t), TailModel::pareto(alpha), s);
  auto check = [&](double exact, auto get) {
    double sum = 0.0, sq = 0.0;
    for (const auto& p : paths) {
      double x = get(p);
      sum += x;
      sq += x * x;
    }
    const double n = static_cast<double>(paths.size());
    const double mean = sum / n;
    const double se = std::sqrt((sq / n - mean * mean) / n);
    CHECK(std::abs(exact - mean) <= 3.0 * se);
  };
  // xi has finite variance only for gamma < (s+1)/2; sigma always here
  check(cm.sigma, [](const Triple& p) { return p.sigma; });
  check(cm.xi, [](const Triple& p) { return p.xi; });
}
