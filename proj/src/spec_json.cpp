#include "tailsplit/spec_json.hpp"

#include <cmath>
#include <sstream>

#include "tailsplit/errors.hpp"

namespace tailsplit {
namespace {

double number_field(const Json& j, const char* key) {
  if (!j.contains(key)) throw DomainError(std::string("missing field '") + key + "'");
  const Json& v = j.at(key);
  if (!v.is_number()) throw DomainError(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

double number_field_or(const Json& j, const char* key, double fallback) {
  return j.contains(key) ? number_field(j, key) : fallback;
}

std::vector<double> split_numbers(const std::string& text, char sep) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(item, &used);
    } catch (const std::exception&) {
      throw DomainError("cannot parse number '" + item + "'");
    }
    if (used != item.size()) throw DomainError("cannot parse number '" + item + "'");
    out.push_back(value);
  }
  return out;
}

}  // namespace

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw DomainError(std::string("invalid JSON: ") + e.what());
  }
}

TailModel tail_model_from_json(const Json& j) {
  if (!j.is_object()) throw DomainError("tail model spec must be a JSON object");
  const double alpha = number_field(j, "alpha");
  const double x_min = number_field_or(j, "x_min", 1.0);
  SlowlyVarying sv;
  sv.c = std::pow(x_min, alpha);
  if (j.contains("sv")) {
    const Json& s = j.at("sv");
    if (!s.is_object()) throw DomainError("'sv' must be an object");
    const std::string kind = s.value("kind", std::string("constant"));
    if (kind == "constant") sv.kind = SlowlyVaryingKind::Constant;
    else if (kind == "log_power") sv.kind = SlowlyVaryingKind::LogPower;
    else throw DomainError("unknown slowly varying kind '" + kind + "'");
    sv.c = number_field_or(s, "c", sv.c);
    sv.rho = number_field_or(s, "rho", 0.0);
    if (sv.kind == SlowlyVaryingKind::Constant && sv.rho != 0.0)
      throw DomainError("constant slowly varying factor takes no rho");
  }
  return TailModel(alpha, x_min, sv);
}

Json to_json(const TailModel& model) {
  const auto& sv = model.slowly_varying();
  Json s = {{"kind", sv.kind == SlowlyVaryingKind::Constant ? "constant" : "log_power"}, {"c", sv.c}};
  if (sv.kind == SlowlyVaryingKind::LogPower) s["rho"] = sv.rho;
  return {{"alpha", model.alpha()}, {"x_min", model.x_min()}, {"sv", s}};
}

MixingLaw mixing_law_from_json(const Json& j) {
  if (!j.is_object()) throw DomainError("mixing law spec must be a JSON object");
  if (!j.contains("kind") || !j.at("kind").is_string()) throw DomainError("mixing law needs a 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "degenerate") return MixingLaw::degenerate(number_field(j, "theta"));
  if (kind == "gamma") return MixingLaw::gamma(number_field(j, "shape"), number_field(j, "rate"));
  if (kind == "discrete") {
    if (!j.contains("atoms") || !j.at("atoms").is_array()) throw DomainError("discrete law needs 'atoms'");
    std::vector<Atom> atoms;
    for (const auto& a : j.at("atoms")) {
      if (!a.is_array() || a.size() != 2 || !a[0].is_number() || !a[1].is_number())
        throw DomainError("each atom must be [value, probability]");
      atoms.push_back({a[0].get<double>(), a[1].get<double>()});
    }
    return MixingLaw::discrete(std::move(atoms));
  }
  throw DomainError("unknown mixing law kind '" + kind + "'");
}

Json to_json(const MixingLaw& mix) {
  switch (mix.kind()) {
    case MixingKind::Degenerate: return {{"kind", "degenerate"}, {"theta", mix.theta()}};
    case MixingKind::Gamma: return {{"kind", "gamma"}, {"shape", mix.shape()}, {"rate", mix.rate()}};
    case MixingKind::Discrete: {
      Json atoms = Json::array();
      for (const auto& a : mix.atoms()) atoms.push_back({a.value, a.prob});
      return {{"kind", "discrete"}, {"atoms", atoms}};
    }
  }
  return {};
}

MixingLaw parse_mixing_law(const std::string& text) {
  const auto first = text.find_first_not_of(" \t");
  if (first != std::string::npos && text[first] == '{') return mixing_law_from_json(parse_json(text));
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw DomainError("mixing law must look like kind:params, got '" + text + "'");
  const std::string kind = text.substr(0, colon);
  const std::string params = text.substr(colon + 1);
  if (kind == "degenerate") {
    auto v = split_numbers(params, ',');
    if (v.size() != 1) throw DomainError("degenerate:<theta>");
    return MixingLaw::degenerate(v[0]);
  }
  if (kind == "gamma") {
    auto v = split_numbers(params, ',');
    if (v.size() != 2) throw DomainError("gamma:<shape>,<rate>");
    return MixingLaw::gamma(v[0], v[1]);
  }
  if (kind == "discrete") {
    std::vector<Atom> atoms;
    std::stringstream ss(params);
    std::string item;
    while (std::getline(ss, item, ',')) {
      auto v = split_numbers(item, '@');
      if (v.size() != 2) throw DomainError("discrete:<value>@<prob>,...");
      atoms.push_back({v[0], v[1]});
    }
    return MixingLaw::discrete(std::move(atoms));
  }
  throw DomainError("unknown mixing law kind '" + kind + "'");
}

Regime regime_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("name") || !j.at("name").is_string())
    throw DomainError("regime spec needs a 'name'");
  double s = number_field_or(j, "s", 0.0);
  if (s < 0.0 || s != std::floor(s) || s > 1e9) throw DomainError("regime s must be a nonnegative integer");
  return Regime::from_name(j.at("name").get<std::string>(), static_cast<unsigned>(s),
                           number_field_or(j, "p", 0.5), number_field_or(j, "p_exponent", 0.5));
}

Json to_json(const Regime& regime) {
  Json j = {{"name", regime.name()}};
  switch (regime.rule) {
    case SplitRule::FixedS: j["s"] = regime.s; break;
    case SplitRule::VanishingP: j["p_exponent"] = regime.p_exponent; break;
    case SplitRule::FixedP: j["p"] = regime.p; break;
  }
  return j;
}

}  // namespace tailsplit
