#include <cmath>
#include <limits>

#include "tailsplit/errors.hpp"
#include "tailsplit/quadrature.hpp"

namespace tailsplit {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;
constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

// Legendre continued fraction for Gamma(a, x), modified Lentz. Converges
// for any real a when x > 0, quickly once x >= max(1, a + 1).
double gamma_cf(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return std::exp(-x + a * std::log(x)) * h;
}

// Lower incomplete gamma gamma(a, x) for a > 0 by its power series.
double lower_gamma_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < 10000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x));
}

}  // namespace

double log_gamma(double x) {
  int sign = 0;
  return ::lgamma_r(x, &sign);
}

double gamma_fn(double x) {
  if (x <= 0.0 && x == std::floor(x)) throw DomainError("gamma_fn: pole at nonpositive integer");
  return std::tgamma(x);
}

double expint_e1(double x) {
  if (!(x > 0.0)) throw DomainError("expint_e1: x must be positive");
  if (x >= 1.0) return gamma_cf(0.0, x);
  double sum = 0.0;
  double term = 1.0;
  for (int k = 1; k < 200; ++k) {
    term *= -x / k;
    const double add = -term / k;
    sum += add;
    if (std::abs(add) < kEps * std::abs(sum)) break;
  }
  return -kEulerGamma - std::log(x) + sum;
}

double upper_incomplete_gamma(double a, double x) {
  if (std::isnan(a) || std::isnan(x)) throw DomainError("upper_incomplete_gamma: NaN argument");
  if (x <= 0.0) {
    if (a > 0.0 && x == 0.0) return std::tgamma(a);
    throw DomainError("upper_incomplete_gamma: x must be positive (or zero with a > 0)");
  }
  if (std::isinf(x)) return 0.0;
  if (x >= std::max(1.0, a + 1.0)) return gamma_cf(a, x);
  if (a > 0.0) return std::tgamma(a) - lower_gamma_series(a, x);

  // a <= 0 and x < 1: start from a base shape and recur downwards with
  // Gamma(b - 1, x) = (Gamma(b, x) - x^{b-1} e^{-x}) / (b - 1).
  const double steps = std::ceil(-a);
  double b = a + steps;  // in [0, 1)
  double value;
  if (b == 0.0)
    value = expint_e1(x);
  else
    value = std::tgamma(b) - lower_gamma_series(b, x);
  const double log_x = std::log(x);
  for (int i = 0; i < static_cast<int>(steps); ++i) {
    const double next = b - 1.0;
    value = (value - std::exp((b - 1.0) * log_x - x)) / next;
    b = next;
  }
  return value;
}

}  // namespace tailsplit
