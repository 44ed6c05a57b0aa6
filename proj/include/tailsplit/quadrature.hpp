#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

namespace tailsplit {

struct QuadResult {
  double value = 0.0;
  double abs_err_est = 0.0;
  std::size_t evaluations = 0;
};

struct QuadOptions {
  double abs_tol = 1e-9;
  double rel_tol = 1e-8;
  std::size_t max_evaluations = 400000;
};

using Integrand = std::function<double(double)>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Adaptive Gauss-Kronrod (7/15) integration on [a, b]. b may be +inf, in
// which case the map map x = a + e^{u/(1-u)} - 1 is applied. Throws NumericalError
// (carrying the best estimate) when the evaluation budget runs out.
// The integrand must be reentrant if integrate is called from several threads.
QuadResult integrate(const Integrand& f, double a, double b, const QuadOptions& opts = {});

// Sum of integrals over consecutive breakpoints; the last breakpoint may be +inf.
QuadResult integrate_pieces(const Integrand& f, const std::vector<double>& breaks,
                            const QuadOptions& opts = {});

// Integral over (0, inf) for integrands with an algebraic singularity or
// slow variation at 0: (0, 1] is handled through x = e^{-s}.
QuadResult integrate_positive_axis(const Integrand& f, const QuadOptions& opts = {});

// Integral over (0, x0] through x = x0 e^{-s}, s in [0, inf).
QuadResult integrate_to_zero(const Integrand& f, double x0, const QuadOptions& opts = {});

// Special functions -------------------------------------------------------

// log|Gamma(x)| without touching the global signgam.
double log_gamma(double x);

// Gamma(x) for any real x that is not a nonpositive integer.
double gamma_fn(double x);

// Upper incomplete gamma Gamma(a, x) for any real a and x > 0; for a > 0
// also x = 0. Throws DomainError for x <= 0 with a <= 0.
double upper_incomplete_gamma(double a, double x);

// Exponential integral E1(x) for x > 0.
double expint_e1(double x);

}  // namespace tailsplit
