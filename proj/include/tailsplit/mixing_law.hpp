#pragma once

#include <utility>
#include <vector>

#include "tailsplit/quadrature.hpp"
#include "tailsplit/rng.hpp"

namespace tailsplit {

enum class MixingKind { Degenerate, Gamma, Discrete };

struct Atom {
  double value;
  double prob;
};

// Law of the intensity Theta of the mixed Poisson count.
class MixingLaw {
 public:
  static MixingLaw degenerate(double theta);
  static MixingLaw gamma(double shape, double rate);
  static MixingLaw discrete(std::vector<Atom> atoms);

  MixingKind kind() const { return kind_; }
  double theta() const { return theta_; }
  double shape() const { return shape_; }
  double rate() const { return rate_; }
  const std::vector<Atom>& atoms() const { return atoms_; }

  // q_r(w) = E{e^{-w Theta} Theta^r}. Negative w is fine for degenerate and
  // discrete laws; the Gamma law needs w > -rate, else DivergenceError.
  double q(unsigned r, double w) const;

  // E{Theta^c}; +inf for a Gamma law with c <= -shape.
  double theta_moment(double c) const;
  double mean() const { return theta_moment(1.0); }

  // Smallest argument accepted by q (exclusive bound); -inf when unbounded.
  double q_argument_floor() const;

  double sample(Rng& rng) const;

 private:
  MixingLaw() = default;

  MixingKind kind_ = MixingKind::Degenerate;
  double theta_ = 1.0;
  double shape_ = 0.0;
  double rate_ = 0.0;
  std::vector<Atom> atoms_;
};

struct IdentityCheck {
  double lhs;
  double rhs;
};

// int_0^inf w^{beta-1} q_r(w) dw against Gamma(beta) E{Theta^{r-beta}}.
// A divergent moment reports +inf on both sides.
IdentityCheck verify_q_integral_identity(const MixingLaw& mix, unsigned r, double beta);

}  // namespace tailsplit
