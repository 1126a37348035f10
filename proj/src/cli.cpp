#include "oodcp/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "oodcp/io.hpp"
#include "oodcp/robust.hpp"
#include "oodcp/sim.hpp"

namespace oodcp::cli {

namespace {

using nlohmann::json;

// Selects the report stream, creating `path` up front so a bad output
// location fails before any computation starts.
std::ostream& open_output(const std::string& path, std::ofstream& file) {
  if (path.empty()) return std::cout;
  file.open(path, std::ios::trunc);
  if (!file) throw ConfigError(path + ": cannot open for writing");
  return file;
}

void warn_if_degraded(const char* command, double corrected, double alpha) {
  if (std::isfinite(corrected) && corrected > alpha + 1e-12) {
    std::cerr << command << ": warning: certified miscoverage "
              << real_to_string(corrected) << " exceeds the requested alpha "
              << real_to_string(alpha)
              << "; the divergence ball is too wide for this level\n";
  }
}

json stats_to_json(const MetricStats& stats) {
  json out;
  out["mean"] = real_to_json(stats.mean);
  out["q25"] = real_to_json(stats.q25);
  out["q50"] = real_to_json(stats.q50);
  out["q75"] = real_to_json(stats.q75);
  json values = json::array();
  for (const double v : stats.values) values.push_back(real_to_json(v));
  out["values"] = std::move(values);
  return out;
}

}  // namespace

int run_gcurve(const GcurveOptions& options) {
  try {
    if (!(options.step > 0.0) || options.step > 0.5) {
      throw ConfigError("step must lie in (0, 0.5]");
    }
    const LevelDistortion curve(family_from_name(options.family), options.rho);
    std::ofstream file;
    std::ostream& out = open_output(options.out, file);

    // beta = k * step up to 1; the endpoint is pinned exactly.
    std::vector<double> grid;
    for (std::size_t k = 0;; ++k) {
      const double value = static_cast<double>(k) * options.step;
      if (value >= 1.0 - 1e-12) break;
      grid.push_back(value);
    }
    grid.push_back(1.0);

    out << "# schema_version=" << kSchemaVersion << '\n';
    out << "beta,g,tau,g_inverse\n";
    for (const double value : grid) {
      out << real_to_string(value) << ','
          << real_to_string(curve.worst_case_level(value)) << ','
          << real_to_string(value) << ','
          << real_to_string(curve.required_level(value)) << '\n';
    }
    return kExitOk;
  } catch (const Error& e) {
    std::cerr << "gcurve: error: " << e.what() << '\n';
    return kExitInput;
  }
}

int run_threshold(const ThresholdOptions& options) {
  try {
    if (options.score_files.empty()) {
      throw ConfigError("at least one --scores file is required");
    }
    RobustConfig config{family_from_name(options.family), options.rho,
                        options.alpha, options.epsilon_grid, options.assume_m};
    config.validate();

    std::ofstream file;
    std::ostream& out = open_output(options.out, file);

    CalibrationBundle bundle;
    bundle.scores_by_domain.reserve(options.score_files.size());
    for (const auto& path : options.score_files) {
      bundle.scores_by_domain.push_back(load_scores(path));
    }
    bundle.validate();

    const RobustThresholdReport report = robust_threshold(bundle, config);

    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["feasible"] = report.feasible;
    doc["threshold"] = real_to_json(report.threshold);
    doc["epsilon_star"] = real_to_json(report.epsilon_star);
    doc["corrected_alpha"] = real_to_json(report.corrected_alpha);
    doc["dkw_delta"] = real_to_json(report.dkw_delta);
    doc["quantile_level"] = real_to_json(report.quantile_level);
    json echo;
    echo["family"] = config.family.name();
    echo["rho"] = config.rho;
    echo["alpha"] = config.alpha;
    echo["epsilon_grid"] = config.epsilon_grid;
    echo["sample_sizes"] = bundle.sample_sizes();
    echo["dkw_m_override"] = config.dkw_m_override
                                 ? json(*config.dkw_m_override)
                                 : json(nullptr);
    doc["config"] = std::move(echo);
    out << doc.dump(2) << '\n';

    if (!report.feasible) {
      std::cerr << "threshold: warning: no concentration margin certifies "
                   "this level; emitting the full prediction set\n";
      return kExitInfeasible;
    }
    warn_if_degraded("threshold", report.corrected_alpha, options.alpha);
    return kExitOk;
  } catch (const Error& e) {
    std::cerr << "threshold: error: " << e.what() << '\n';
    return kExitInput;
  }
}

int run_simulate(const SimulateOptions& options) {
  try {
    if (options.config_file.empty()) throw ConfigError("--config is required");
    if (options.out_prefix.empty()) throw ConfigError("--out is required");

    ExperimentConfig config = load_experiment_config(options.config_file);
    if (options.seed) config.seed = *options.seed;

    const std::string csv_path = options.out_prefix + ".csv";
    const std::string summary_path = options.out_prefix + ".summary.json";
    std::ofstream csv(csv_path, std::ios::trunc);
    if (!csv) throw ConfigError(csv_path + ": cannot open for writing");
    std::ofstream summary_out(summary_path, std::ios::trunc);
    if (!summary_out) {
      throw ConfigError(summary_path + ": cannot open for writing");
    }

    std::vector<TrialResult> trials;
    const ExperimentSummary summary = run_experiment(config, &trials);

    csv << "# schema_version=" << kSchemaVersion << '\n';
    csv << "trial,alpha,method,coverage,length\n";
    for (std::size_t trial = 0; trial < trials.size(); ++trial) {
      const TrialResult& result = trials[trial];
      for (std::size_t a = 0; a < config.alpha_list.size(); ++a) {
        const std::string alpha = real_to_string(config.alpha_list[a]);
        csv << trial << ',' << alpha << ",scp,"
            << real_to_string(result.scp_coverage[a]) << ','
            << real_to_string(result.scp_length[a]) << '\n';
        csv << trial << ',' << alpha << ",ood_scp,"
            << real_to_string(result.ood_coverage[a]) << ','
            << real_to_string(result.ood_length[a]) << '\n';
      }
    }

    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["generator"] = summary.generator;
    doc["seed"] = summary.seed;
    doc["config"] = experiment_config_to_json(config);
    json per_alpha = json::array();
    for (const AlphaSummary& entry : summary.per_alpha) {
      json row;
      row["alpha"] = entry.alpha;
      row["scp_coverage"] = stats_to_json(entry.scp_coverage);
      row["ood_coverage"] = stats_to_json(entry.ood_coverage);
      row["scp_length"] = stats_to_json(entry.scp_length);
      row["ood_length"] = stats_to_json(entry.ood_length);
      per_alpha.push_back(std::move(row));
    }
    doc["per_alpha"] = std::move(per_alpha);
    summary_out << doc.dump(2) << '\n';

    std::cerr << "simulate: wrote " << csv_path << " and " << summary_path
              << '\n';
    return kExitOk;
  } catch (const Error& e) {
    std::cerr << "simulate: error: " << e.what() << '\n';
    return kExitInput;
  }
}

int run_bound(const BoundOptions& options) {
  try {
    if (options.sample_sizes.empty()) {
      throw ConfigError("at least one --m sample size is required");
    }
    for (const std::uint64_t m : options.sample_sizes) {
      if (m == 0) throw ConfigError("sample sizes must be positive");
    }
    const DivergenceFamily family = family_from_name(options.family);
    RobustConfig config{family, options.rho, options.alpha,
                        options.epsilon_grid, std::nullopt};
    config.validate();
    if (options.epsilon && !(*options.epsilon > 0.0 && *options.epsilon <= 1.0)) {
      std::cerr << "bound: epsilon " << real_to_string(*options.epsilon)
                << " lies outside (0, 1]\n";
      return kExitInput;
    }

    std::ofstream file;
    std::ostream& out = open_output(options.out, file);

    double epsilon = 0.0;
    if (options.epsilon) {
      epsilon = *options.epsilon;
    } else {
      epsilon = optimize_epsilon(options.sample_sizes, family, options.rho,
                                 options.alpha, options.epsilon_grid)
                    .epsilon;
    }
    const double delta = dkw_failure_bound(options.sample_sizes, epsilon);
    const double alpha_prime = corrected_alpha(
        options.sample_sizes, family, options.rho, options.alpha, epsilon);
    const double bound = coverage_lower_bound(
        options.sample_sizes, family, options.rho, options.alpha, epsilon);

    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["epsilon_star"] = real_to_json(epsilon);
    doc["delta"] = real_to_json(delta);
    doc["coverage_lower_bound"] = real_to_json(bound);
    doc["corrected_alpha"] = real_to_json(alpha_prime);
    json echo;
    echo["family"] = family.name();
    echo["rho"] = options.rho;
    echo["alpha"] = options.alpha;
    echo["epsilon_grid"] = options.epsilon_grid;
    echo["sample_sizes"] = options.sample_sizes;
    doc["config"] = std::move(echo);
    out << doc.dump(2) << '\n';

    warn_if_degraded("bound", alpha_prime, options.alpha);
    return kExitOk;
  } catch (const Infeasible& e) {
    std::cerr << "bound: infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const Error& e) {
    std::cerr << "bound: error: " << e.what() << '\n';
    return kExitInput;
  }
}

}  // namespace oodcp::cli
