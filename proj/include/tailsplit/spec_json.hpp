#pragma once

#include <string>

#include "json.hpp"
#include "tailsplit/limit_lt.hpp"
#include "tailsplit/mixing_law.hpp"
#include "tailsplit/tail_model.hpp"

namespace tailsplit {

using Json = nlohmann::json;

// {"alpha": a, "x_min": m, "sv": {"kind": "constant"|"log_power", "c": c, "rho": r}}
// x_min defaults to 1, sv to constant, c to x_min^alpha.
TailModel tail_model_from_json(const Json& j);
Json to_json(const TailModel& model);

// {"kind":"degenerate","theta":..} | {"kind":"gamma","shape":..,"rate":..}
// | {"kind":"discrete","atoms":[[v,p],...]}
MixingLaw mixing_law_from_json(const Json& j);
Json to_json(const MixingLaw& mix);

// Accepts JSON or the shorthand degenerate:1, gamma:2,2, discrete:1@0.5,3@0.5.
MixingLaw parse_mixing_law(const std::string& text);

// {"name": "gt1-fixed-s", "s": 0, "p": 0.5, "p_exponent": 0.5}
Regime regime_from_json(const Json& j);
Json to_json(const Regime& regime);

// Parses a JSON document, mapping parse errors to DomainError.
Json parse_json(const std::string& text);

}  // namespace tailsplit
