#include "oodcp/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace oodcp {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<double> scores_from_json_file(const std::filesystem::path& path,
                                          std::ifstream& in) {
  json parsed;
  try {
    parsed = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  if (!parsed.is_array()) {
    throw ParseError(path.string() + ": expected a JSON array of numbers");
  }
  std::vector<double> scores;
  scores.reserve(parsed.size());
  for (const auto& item : parsed) {
    if (!item.is_number()) {
      throw ParseError(path.string() + ": non-numeric entry in score array");
    }
    const double v = item.get<double>();
    if (!std::isfinite(v)) {
      throw NonFiniteScore(path.string() + ": score " + std::to_string(v));
    }
    scores.push_back(v);
  }
  if (scores.empty()) throw EmptyInput(path.string() + ": no scores");
  return scores;
}

std::vector<double> scores_from_csv_file(const std::filesystem::path& path,
                                         std::ifstream& in) {
  std::string line;
  std::size_t line_no = 0;
  // Header row.
  if (!std::getline(in, line)) {
    throw ParseError(path.string() + ": empty file, expected 'score' header");
  }
  ++line_no;
  if (trim(line) != "score") {
    throw ParseError(path.string() + ":1: expected header 'score', got '" +
                     trim(line) + "'");
  }
  std::vector<double> scores;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string cell = trim(line);
    if (cell.empty()) continue;
    std::size_t consumed = 0;
    double v = 0.0;
    try {
      v = std::stod(cell, &consumed);
    } catch (const std::exception&) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) +
                       ": not a number: '" + cell + "'");
    }
    if (consumed != cell.size()) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) +
                       ": trailing characters after number: '" + cell + "'");
    }
    if (!std::isfinite(v)) {
      throw NonFiniteScore(path.string() + ":" + std::to_string(line_no) +
                           ": score " + cell);
    }
    scores.push_back(v);
  }
  if (scores.empty()) {
    throw EmptyInput(path.string() + ": header only, no scores");
  }
  return scores;
}

// Reads a double or one of the strings "inf", "-inf", "nan".
double real_field(const json& value, const std::string& what) {
  try {
    return real_from_json(value);
  } catch (const ParseError&) {
    throw ParseError(what + ": expected a number or 'inf'/'-inf'/'nan'");
  }
}

}  // namespace

std::string real_to_string(double value) {
  if (std::isnan(value)) return "nan";
  if (value == kInf) return "inf";
  if (value == -kInf) return "-inf";
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

nlohmann::json real_to_json(double value) {
  if (std::isnan(value)) return nullptr;
  if (std::isfinite(value)) return value;
  return real_to_string(value);
}

double real_from_json(const nlohmann::json& value) {
  if (value.is_number()) return value.get<double>();
  if (value.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (value.is_string()) {
    const auto& s = value.get_ref<const std::string&>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw ParseError("expected a number, null, or 'inf'/'-inf'");
}

std::vector<double> load_scores(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": cannot open");
  if (path.extension() == ".json") return scores_from_json_file(path, in);
  return scores_from_csv_file(path, in);
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& config_json) {
  if (!config_json.is_object()) {
    throw ParseError("experiment config: expected a JSON object");
  }
  static const char* const known[] = {
      "dims",       "w_star",     "b_star",     "mu_list",
      "sigma_sx",   "sigma_sy",   "sigma_ty",   "target_mix",
      "m_train",    "n_calib",    "m_test",     "alpha_list",
      "family",     "rho",        "rho_oracle_scale", "epsilon_grid",
      "n_trials",   "seed"};
  for (const auto& [key, value] : config_json.items()) {
    (void)value;
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw ParseError("experiment config: unknown field '" + key + "'");
  }
  ExperimentConfig config;
  try {
    if (config_json.contains("dims")) {
      config.dims = config_json.at("dims").get<std::size_t>();
    }
    if (config_json.contains("w_star")) {
      config.w_star = config_json.at("w_star").get<std::vector<double>>();
    }
    if (config_json.contains("b_star")) {
      config.b_star = real_field(config_json.at("b_star"), "b_star");
    }
    if (config_json.contains("mu_list")) {
      config.mu_list =
          config_json.at("mu_list").get<std::vector<std::vector<double>>>();
    } else {
      config.mu_list = {std::vector<double>(config.dims, 0.0)};
    }
    if (config_json.contains("sigma_sx")) {
      config.sigma_sx = real_field(config_json.at("sigma_sx"), "sigma_sx");
    }
    if (config_json.contains("sigma_sy")) {
      config.sigma_sy = real_field(config_json.at("sigma_sy"), "sigma_sy");
    }
    if (config_json.contains("sigma_ty")) {
      config.sigma_ty = real_field(config_json.at("sigma_ty"), "sigma_ty");
    }
    if (config_json.contains("target_mix")) {
      config.target_mix =
          config_json.at("target_mix").get<std::vector<double>>();
    }
    if (config_json.contains("m_train")) {
      config.m_train = config_json.at("m_train").get<std::size_t>();
    }
    if (config_json.contains("n_calib")) {
      config.n_calib = config_json.at("n_calib").get<std::size_t>();
    }
    if (config_json.contains("m_test")) {
      config.m_test = config_json.at("m_test").get<std::size_t>();
    }
    if (config_json.contains("alpha_list")) {
      config.alpha_list =
          config_json.at("alpha_list").get<std::vector<double>>();
    }
    if (config_json.contains("family")) {
      config.family_name = config_json.at("family").get<std::string>();
    }
    if (config_json.contains("rho") &&
        config_json.contains("rho_oracle_scale")) {
      throw ParseError(
          "experiment config: give either rho or rho_oracle_scale, not both");
    }
    if (config_json.contains("rho")) {
      config.rho = real_field(config_json.at("rho"), "rho");
    } else if (config_json.contains("rho_oracle_scale")) {
      config.rho_oracle_scale =
          real_field(config_json.at("rho_oracle_scale"), "rho_oracle_scale");
    } else {
      config.rho_oracle_scale = 1.5;
    }
    if (config_json.contains("epsilon_grid")) {
      config.epsilon_grid = config_json.at("epsilon_grid").get<int>();
    }
    if (config_json.contains("n_trials")) {
      config.n_trials = config_json.at("n_trials").get<std::size_t>();
    }
    if (config_json.contains("seed")) {
      config.seed = config_json.at("seed").get<std::uint64_t>();
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("experiment config: ") + e.what());
  }
  config.validate();
  return config;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": cannot open");
  json parsed;
  try {
    parsed = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return experiment_config_from_json(parsed);
}

nlohmann::json experiment_config_to_json(const ExperimentConfig& config) {
  json out;
  out["dims"] = config.dims;
  out["w_star"] = config.w_star.empty()
                      ? std::vector<double>(config.dims, 1.0)
                      : config.w_star;
  out["b_star"] = config.b_star;
  out["mu_list"] = config.mu_list;
  out["sigma_sx"] = config.sigma_sx;
  out["sigma_sy"] = config.sigma_sy;
  out["sigma_ty"] = config.sigma_ty;
  out["target_mix"] =
      config.target_mix.empty()
          ? std::vector<double>(config.n_sources(),
                                1.0 / static_cast<double>(config.n_sources()))
          : config.target_mix;
  out["m_train"] = config.m_train;
  out["n_calib"] = config.n_calib;
  out["m_test"] = config.m_test;
  out["alpha_list"] = config.alpha_list;
  out["family"] = config.family_name;
  out["rho"] = config.resolved_rho();
  if (config.rho_oracle_scale) {
    out["rho_oracle_scale"] = *config.rho_oracle_scale;
  }
  out["epsilon_grid"] = config.epsilon_grid;
  out["n_trials"] = config.n_trials;
  out["seed"] = config.seed;
  return out;
}

}  // namespace oodcp
