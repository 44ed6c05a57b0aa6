#include "tailsplit/mixing_law.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "tailsplit/errors.hpp"

namespace tailsplit {

MixingLaw MixingLaw::degenerate(double theta) {
  if (!(theta > 0.0) || !std::isfinite(theta)) throw DomainError("degenerate theta must be positive");
  MixingLaw m;
  m.kind_ = MixingKind::Degenerate;
  m.theta_ = theta;
  return m;
}

MixingLaw MixingLaw::gamma(double shape, double rate) {
  if (!(shape > 0.0) || !std::isfinite(shape)) throw DomainError("gamma shape must be positive");
  if (!(rate > 0.0) || !std::isfinite(rate)) throw DomainError("gamma rate must be positive");
  MixingLaw m;
  m.kind_ = MixingKind::Gamma;
  m.shape_ = shape;
  m.rate_ = rate;
  return m;
}

MixingLaw MixingLaw::discrete(std::vector<Atom> atoms) {
  if (atoms.empty()) throw DomainError("discrete mixing law needs at least one atom");
  double total = 0.0;
  for (const auto& a : atoms) {
    if (!(a.value > 0.0) || !std::isfinite(a.value)) throw DomainError("discrete atom values must be positive");
    if (!(a.prob >= 0.0)) throw DomainError("discrete atom probabilities must be nonnegative");
    total += a.prob;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    std::ostringstream msg;
    msg << "discrete atom probabilities must sum to 1 (got " << total << ")";
    throw DomainError(msg.str());
  }
  MixingLaw m;
  m.kind_ = MixingKind::Discrete;
  m.atoms_ = std::move(atoms);
  return m;
}

double MixingLaw::q_argument_floor() const {
  return kind_ == MixingKind::Gamma ? -rate_ : -kInf;
}

double MixingLaw::q(unsigned r, double w) const {
  if (std::isnan(w)) throw DomainError("q: NaN argument");
  switch (kind_) {
    case MixingKind::Degenerate:
      return std::exp(r * std::log(theta_) - w * theta_);
    case MixingKind::Gamma: {
      if (!(w > -rate_)) {
        std::ostringstream msg;
        msg << "q diverges for a Gamma mixing law at argument " << w << " <= -rate = " << -rate_;
        throw DivergenceError(msg.str());
      }
      const double a = shape_;
      return std::exp(a * std::log(rate_) + log_gamma(a + r) - log_gamma(a) -
                      (a + r) * std::log(rate_ + w));
    }
    case MixingKind::Discrete: {
      double sum = 0.0;
      for (const auto& atom : atoms_)
        sum += atom.prob * std::exp(r * std::log(atom.value) - w * atom.value);
      return sum;
    }
  }
  return 0.0;
}

double MixingLaw::theta_moment(double c) const {
  switch (kind_) {
    case MixingKind::Degenerate:
      return std::pow(theta_, c);
    case MixingKind::Gamma:
      if (c <= -shape_) return kInf;
      return std::exp(log_gamma(shape_ + c) - log_gamma(shape_) - c * std::log(rate_));
    case MixingKind::Discrete: {
      double sum = 0.0;
      for (const auto& atom : atoms_) sum += atom.prob * std::pow(atom.value, c);
      return sum;
    }
  }
  return 0.0;
}

double MixingLaw::sample(Rng& rng) const {
  switch (kind_) {
    case MixingKind::Degenerate:
      return theta_;
    case MixingKind::Gamma: {
      std::gamma_distribution<double> dist(shape_, 1.0 / rate_);
      return dist(rng);
    }
    case MixingKind::Discrete: {
      const double u = uniform01(rng);
      double cumulative = 0.0;
      for (const auto& atom : atoms_) {
        cumulative += atom.prob;
        if (u < cumulative) return atom.value;
      }
      return atoms_.back().value;
    }
  }
  return theta_;
}

IdentityCheck verify_q_integral_identity(const MixingLaw& mix, unsigned r, double beta) {
  if (!(beta > 0.0)) throw DomainError("beta must be positive");
  const double moment = mix.theta_moment(static_cast<double>(r) - beta);
  if (std::isinf(moment)) return {kInf, kInf};
  const double rhs = gamma_fn(beta) * moment;
  auto f = [&mix, r, beta](double w) { return std::pow(w, beta - 1.0) * mix.q(r, w); };
  QuadOptions opts{1e-14, 1e-11, 400000};
  const double lhs = integrate_to_zero(f, 1.0, opts).value + integrate(f, 1.0, kInf, opts).value;
  return {lhs, rhs};
}

}  // namespace tailsplit
