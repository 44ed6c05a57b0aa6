#pragma once

#include <string>

#include "tailsplit/mixing_law.hpp"
#include "tailsplit/quadrature.hpp"
#include "tailsplit/tail_model.hpp"

namespace tailsplit {

// Tail regime: infinite mean (alpha < 1), finite mean (alpha > 1), and the
// two centered cases where the small-claim sum has mu subtracted per claim.
enum class AlphaRange { Lt1, Gt1, Centered12, Centered2 };

// How many top claims are split off: a fixed s, s = floor(p(t) N(t)) with
// p(t) = t^{-p_exponent} -> 0, or s = floor(p N(t)) for a fixed p.
enum class SplitRule { FixedS, VanishingP, FixedP };

struct Regime {
  AlphaRange range = AlphaRange::Lt1;
  SplitRule rule = SplitRule::FixedS;
  unsigned s = 0;
  double p = 0.5;
  double p_exponent = 0.5;

  static Regime fixed_s(AlphaRange range, unsigned s);
  static Regime vanishing_p(AlphaRange range, double p_exponent = 0.5);
  static Regime fixed_p(AlphaRange range, double p);
  // Names: lt1-fixed-s, lt1-vanishing, lt1-fixed-p, gt1-fixed-s, gt1-vanishing,
  // gt1-fixed-p, ctr12-fixed-s, ctr2-fixed-s.
  static Regime from_name(const std::string& name, unsigned s = 0, double p = 0.5,
                          double p_exponent = 0.5);

  std::string name() const;
  bool centered() const { return range == AlphaRange::Centered12 || range == AlphaRange::Centered2; }
  void validate() const;
  // Throws RegimeError when the model's alpha is outside the regime's range.
  void check_model(const TailModel& model) const;
  double p_of_t(double t) const;
};

enum class Normalizer { One, Ut, UInvP, TpUInvP, T, SqrtT };

// Scale applied to each simulated part before comparing with the limit.
struct LimitTriple {
  Normalizer lambda;
  Normalizer xi;
  Normalizer sigma;
  bool sigma_centered;
};

struct NormalizerValues {
  double lambda;
  double xi;
  double sigma;
};

LimitTriple normalization_descriptor(const Regime& regime);
std::string describe(Normalizer n);
NormalizerValues normalizer_values(const Regime& regime, const TailModel& model, double t);

// Two forms exist for a few closed forms. Consistent agrees with direct
// simulation of the finite-t process; Literal keeps the commonly quoted
// expression (see README for where they differ).
enum class FormulaVariant { Consistent, Literal };

struct LimitOptions {
  FormulaVariant variant = FormulaVariant::Consistent;
  QuadOptions quad{1e-11, 1e-10, 800000};
};

// int_1^inf e^{-c eta} eta^{-1-alpha} d eta = c^alpha Gamma(-alpha, c).
double inner_tail_integral(double c, double alpha);
// int_0^1 (1 - e^{-c eta}) eta^{-1-alpha} d eta, alpha in (0, 1).
double inner_head_integral(double c, double alpha);
// J(c) = int_0^1 (e^{-c eta} - 1 + c eta) eta^{-1-alpha} d eta, alpha in (1, 2).
double inner_centered_integral(double c, double alpha);

double lt_eval(const Regime& regime, const TailModel& model, const MixingLaw& mix, double u,
               double v, double w, const LimitOptions& opts = {});

// Same limits for Theta = 1, written with exp(...) in place of q and with
// the inner eta-integrals done by quadrature. Used to cross-check lt_eval.
double lt_eval_unit_intensity(const Regime& regime, const TailModel& model, double u, double v,
                              double w, const LimitOptions& opts = {});

// Laplace transform of an inverse-gamma law with shape 1/2 and scale b:
// exp(-2 sqrt(b u)). With Theta = 1 and alpha = 1/2 the fixed-p top-claim
// limit is of this form with b = Gamma(1/2)^2 / 4.
double inverse_gamma_half_lt(double u, double scale);

}  // namespace tailsplit
