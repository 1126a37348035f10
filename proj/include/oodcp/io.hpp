#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "oodcp/sim.hpp"

namespace oodcp {

// %.17g rendering: round-trip exact for finite doubles, "inf"/"-inf"/"nan"
// for the non-finite ones.
std::string real_to_string(double value);

// JSON has no literal for the non-finite reals; infinities travel as the
// strings "inf"/"-inf" and NaN (a field that does not apply) as null.
nlohmann::json real_to_json(double value);
double real_from_json(const nlohmann::json& value);

// Loads one score vector. Files ending in .json must hold a JSON array of
// finite numbers; anything else is a one-column CSV with header "score".
// Throws ParseError (with line numbers for CSV), EmptyInput when no scores
// remain, NonFiniteScore on bad values.
std::vector<double> load_scores(const std::filesystem::path& path);

// Experiment config JSON. Missing fields keep the defaults documented in
// ExperimentConfig; unknown fields are rejected. The result is validated.
ExperimentConfig experiment_config_from_json(const nlohmann::json& json);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
nlohmann::json experiment_config_to_json(const ExperimentConfig& config);

}  // namespace oodcp
