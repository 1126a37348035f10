#include <CLI11.hpp>

#include "oodcp/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "Split conformal prediction with distribution-shift-robust corrections"};
  app.require_subcommand(1);

  oodcp::cli::GcurveOptions gcurve;
  CLI::App* gcurve_cmd = app.add_subcommand(
      "gcurve",
      "Tabulate the worst-case level curve and its inverse as CSV");
  gcurve_cmd->add_option("--family", gcurve.family,
                         "Divergence family: chi2, tv, or kl")
      ->capture_default_str();
  gcurve_cmd->add_option("--rho", gcurve.rho, "Divergence ball radius, >= 0")
      ->capture_default_str();
  gcurve_cmd->add_option("--step", gcurve.step, "Grid spacing in (0, 0.5]")
      ->capture_default_str();
  gcurve_cmd->add_option("--out", gcurve.out, "Output CSV path (default: stdout)");

  oodcp::cli::ThresholdOptions threshold;
  CLI::App* threshold_cmd = app.add_subcommand(
      "threshold",
      "Robust conformal threshold from per-source calibration scores");
  threshold_cmd->alias("calibrate");
  threshold_cmd
      ->add_option("--scores", threshold.score_files,
                   "Calibration score file, once per source (one-column CSV "
                   "with a 'score' header, or a .json array)")
      ->required();
  threshold_cmd->add_option("--family", threshold.family,
                            "Divergence family: chi2, tv, or kl")
      ->capture_default_str();
  threshold_cmd->add_option("--rho", threshold.rho, "Divergence ball radius, >= 0")
      ->capture_default_str();
  threshold_cmd->add_option("--alpha", threshold.alpha,
                            "Target miscoverage level in (0, 1)")
      ->capture_default_str();
  threshold_cmd->add_option("--grid", threshold.epsilon_grid,
                            "Number of candidate concentration margins")
      ->capture_default_str();
  threshold_cmd->add_option(
      "--assume-m", threshold.assume_m,
      "Compute the concentration correction as if every source had this many "
      "points (quantiles still use the real scores)");
  threshold_cmd->add_option("--out", threshold.out,
                            "Output JSON path (default: stdout)");

  oodcp::cli::SimulateOptions simulate;
  CLI::App* simulate_cmd = app.add_subcommand(
      "simulate", "Coverage experiment on synthetic shifted-variance data");
  simulate_cmd->add_option("--config", simulate.config_file,
                           "Experiment config JSON")
      ->required();
  simulate_cmd
      ->add_option("--out", simulate.out_prefix,
                   "Output prefix; writes <prefix>.csv and <prefix>.summary.json")
      ->required();
  simulate_cmd->add_option("--seed", simulate.seed,
                           "Override the seed from the config");

  oodcp::cli::BoundOptions bound;
  CLI::App* bound_cmd = app.add_subcommand(
      "bound", "Coverage lower bound and corrected level for given sample sizes");
  bound_cmd
      ->add_option("--m", bound.sample_sizes,
                   "Calibration sample size, once per source")
      ->required();
  bound_cmd->add_option("--family", bound.family,
                        "Divergence family: chi2, tv, or kl")
      ->capture_default_str();
  bound_cmd->add_option("--rho", bound.rho, "Divergence ball radius, >= 0")
      ->capture_default_str();
  bound_cmd->add_option("--alpha", bound.alpha,
                        "Target miscoverage level in (0, 1)")
      ->capture_default_str();
  bound_cmd->add_option("--grid", bound.epsilon_grid,
                        "Number of candidate concentration margins")
      ->capture_default_str();
  bound_cmd->add_option("--epsilon", bound.epsilon,
                        "Fixed concentration margin in (0, 1] (default: optimized)");
  bound_cmd->add_option("--out", bound.out, "Output JSON path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);  // --help and friends
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return oodcp::cli::kExitInput;
  }

  if (gcurve_cmd->parsed()) return oodcp::cli::run_gcurve(gcurve);
  if (threshold_cmd->parsed()) return oodcp::cli::run_threshold(threshold);
  if (simulate_cmd->parsed()) return oodcp::cli::run_simulate(simulate);
  if (bound_cmd->parsed()) return oodcp::cli::run_bound(bound);
  return oodcp::cli::kExitInput;
}
