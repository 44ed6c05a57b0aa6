#include "tailsplit/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <sstream>

#include "tailsplit/errors.hpp"

namespace tailsplit {
namespace {

// Kronrod abscissae; odd entries (1, 3, 5) and the centre are Gauss nodes.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr double kEps = std::numeric_limits<double>::epsilon();
// Infinite ranges stop at x ~ 1e100; an x^{-p} tail beyond that is below any tolerance used here.
constexpr double kMaxLogX = 230.0;

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

double checked(const Integrand& f, double x) {
  double y = f(x);
  if (!std::isfinite(y)) {
    std::ostringstream msg;
    msg << "integrand is not finite at x=" << x;
    throw NumericalError(msg.str(), std::nan(""), kInf);
  }
  return y;
}

// Gauss-Kronrod 7/15 with the QUADPACK error heuristic.
Segment gk15(const Integrand& f, double a, double b) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = checked(f, centre);
  double resk = fc * kWgk[7];
  double resg = fc * kWg[3];
  double resabs = std::abs(resk);
  std::array<double, 7> f1{}, f2{};
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    f1[j] = checked(f, centre - dx);
    f2[j] = checked(f, centre + dx);
    const double sum = f1[j] + f2[j];
    resk += kWgk[j] * sum;
    resabs += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) resg += kWg[j / 2] * sum;
  }
  const double mean = 0.5 * resk;
  double resasc = kWgk[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j)
    resasc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));

  const double abs_half = std::abs(half);
  resk *= half;
  resabs *= abs_half;
  resasc *= abs_half;
  double err = std::abs((resk - resg * half));
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  if (resabs > std::numeric_limits<double>::min() / (50.0 * kEps))
    err = std::max(50.0 * kEps * resabs, err);
  return {a, b, resk, err};
}

QuadResult adaptive(const Integrand& f, double a, double b, const QuadOptions& opts) {
  if (!(opts.abs_tol > 0.0) || !(opts.rel_tol > 0.0))
    throw DomainError("quadrature tolerances must be positive");
  if (a == b) return {0.0, 0.0, 0};

  std::priority_queue<Segment> active;
  std::vector<Segment> settled;
  double settled_error = 0.0;
  Segment first = gk15(f, a, b);
  std::size_t evals = 15;
  double total = first.value;
  double error = first.error;
  active.push(first);

  auto target = [&] { return std::max(opts.abs_tol, opts.rel_tol * std::abs(total)); };

  // Stop early once unresolvable segments alone exceed the target.
  while (!active.empty() && error > target() && settled_error <= target()) {
    if (evals + 30 > opts.max_evaluations) {
      std::ostringstream msg;
      msg << "quadrature did not converge within " << opts.max_evaluations
          << " evaluations (estimate " << total << ", error bound " << error << ")";
      throw NumericalError(msg.str(), total, error);
    }
    Segment worst = active.top();
    active.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const double scale = std::max(std::abs(worst.a), std::abs(worst.b));
    if (!(mid > worst.a && mid < worst.b) || (worst.b - worst.a) < 8.0 * kEps * scale) {
      settled.push_back(worst);  // cannot resolve further
      settled_error += worst.error;
      continue;
    }
    Segment left = gk15(f, worst.a, mid);
    Segment right = gk15(f, mid, worst.b);
    evals += 30;
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    active.push(left);
    active.push(right);
  }

  // Re-sum to remove drift from the incremental updates.
  total = 0.0;
  error = 0.0;
  for (const auto& s : settled) {
    total += s.value;
    error += s.error;
  }
  while (!active.empty()) {
    total += active.top().value;
    error += active.top().error;
    active.pop();
  }
  if (error > target() && error > 1e3 * kEps * std::abs(total)) {
    std::ostringstream msg;
    msg << "quadrature hit the resolution limit (estimate " << total << ", error bound "
        << error << ")";
    throw NumericalError(msg.str(), total, error);
  }
  return {total, error, evals};
}

}  // namespace

QuadResult integrate(const Integrand& f, double a, double b, const QuadOptions& opts) {
  if (std::isnan(a) || std::isnan(b) || std::isinf(a))
    throw DomainError("integrate: lower limit must be finite");
  if (b < a) {
    QuadResult r = integrate(f, b, a, opts);
    r.value = -r.value;
    return r;
  }
  if (std::isinf(b)) {
    // x = a + e^{u/(1-u)} - 1: algebraic decay in x becomes exponential in
    // the inner variable, so x^{-p} tails leave no endpoint singularity at u = 1.
    Integrand mapped = [&f, a](double u) {
      const double one_minus = 1.0 - u;
      const double s = u / one_minus;
      if (s > kMaxLogX) return 0.0;
      const double e = std::exp(s);
      const double x = a + std::expm1(s);
      if (std::isinf(x)) return 0.0;
      const double y = f(x);
      return y == 0.0 ? 0.0 : y * e / (one_minus * one_minus);
    };
    return adaptive(mapped, 0.0, 1.0, opts);
  }
  return adaptive(f, a, b, opts);
}

QuadResult integrate_pieces(const Integrand& f, const std::vector<double>& breaks,
                            const QuadOptions& opts) {
  if (breaks.size() < 2) throw DomainError("integrate_pieces needs at least two breakpoints");
  QuadOptions piece = opts;
  piece.abs_tol = opts.abs_tol / static_cast<double>(breaks.size() - 1);
  QuadResult total;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (total.evaluations >= opts.max_evaluations)
      throw NumericalError("quadrature budget exhausted across pieces", total.value,
                           total.abs_err_est);
    piece.max_evaluations = opts.max_evaluations - total.evaluations;
    try {
      QuadResult r = integrate(f, breaks[i], breaks[i + 1], piece);
      total.value += r.value;
      total.abs_err_est += r.abs_err_est;
      total.evaluations += r.evaluations;
    } catch (const NumericalError& e) {
      throw NumericalError(e.what(), total.value + e.estimate(),
                           total.abs_err_est + e.error_bound());
    }
  }
  return total;
}

QuadResult integrate_to_zero(const Integrand& f, double x0, const QuadOptions& opts) {
  if (!(x0 > 0.0)) throw DomainError("integrate_to_zero: upper limit must be positive");
  Integrand mapped = [&f, x0](double s) {
    const double x = x0 * std::exp(-s);
    if (x == 0.0) return 0.0;
    return f(x) * x;
  };
  return integrate(mapped, 0.0, kInf, opts);
}

QuadResult integrate_positive_axis(const Integrand& f, const QuadOptions& opts) {
  QuadOptions half = opts;
  half.abs_tol = 0.5 * opts.abs_tol;
  QuadResult head = integrate_to_zero(f, 1.0, half);
  half.max_evaluations = opts.max_evaluations > head.evaluations
                             ? opts.max_evaluations - head.evaluations
                             : 1;
  try {
    QuadResult tail = integrate(f, 1.0, kInf, half);
    return {head.value + tail.value, head.abs_err_est + tail.abs_err_est,
            head.evaluations + tail.evaluations};
  } catch (const NumericalError& e) {
    throw NumericalError(e.what(), head.value + e.estimate(),
                         head.abs_err_est + e.error_bound());
  }
}

}  // namespace tailsplit
