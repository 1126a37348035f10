#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "oodcp/divergence.hpp"
#include "oodcp/rng.hpp"
#include "oodcp/robust.hpp"

namespace oodcp {

// Feature rows (row-major, size() x dims) with responses.
struct Dataset {
  std::size_t dims = 0;
  std::vector<double> x;
  std::vector<double> y;

  std::size_t size() const { return y.size(); }
  std::span<const double> row(std::size_t i) const {
    return {x.data() + i * dims, dims};
  }
};

// Linear predictor y ~ <weights, x> + intercept.
struct LinearModel {
  std::vector<double> weights;
  double intercept = 0.0;
};

// Synthetic benchmark: several Gaussian source domains share a linear signal
// and a noise scale; the target mixes the source feature marginals and uses
// its own noise scale.
struct ExperimentConfig {
  std::size_t dims = 5;
  std::vector<double> w_star;          // defaults to all ones
  double b_star = 1.0;
  std::vector<std::vector<double>> mu_list;  // one mean per source domain
  double sigma_sx = 1.0;
  double sigma_sy = 1.0;
  double sigma_ty = 1.5;
  std::vector<double> target_mix;      // defaults to uniform over sources
  std::size_t m_train = 2000;
  std::size_t n_calib = 2000;
  std::size_t m_test = 1000;
  std::vector<double> alpha_list = {0.05, 0.1, 0.15, 0.2, 0.25, 0.3};
  std::string family_name = "kl";
  double rho = 0.0;
  // When set, rho is resolved as scale * score_law_divergence(sigma_sy,
  // sigma_ty, family) instead of taken literally.
  std::optional<double> rho_oracle_scale;
  int epsilon_grid = 2000;
  std::size_t n_trials = 1000;
  std::uint64_t seed = 1;

  std::size_t n_sources() const { return mu_list.size(); }
  DivergenceFamily family() const { return family_from_name(family_name); }
  double resolved_rho() const;

  // Every violated invariant, empty when the config is sound.
  std::vector<std::string> violations() const;
  // Throws ConfigError listing all violations.
  void validate() const;
};

// Per-trial outcomes, indexed like alpha_list.
struct TrialResult {
  std::vector<double> scp_coverage;
  std::vector<double> ood_coverage;
  std::vector<double> scp_length;
  std::vector<double> ood_length;
};

struct MetricStats {
  double mean = 0.0;
  double q25 = 0.0;
  double q50 = 0.0;
  double q75 = 0.0;
  std::vector<double> values;  // one per trial, violin-ready
};

struct AlphaSummary {
  double alpha = 0.0;
  MetricStats scp_coverage;
  MetricStats ood_coverage;
  MetricStats scp_length;
  MetricStats ood_length;
};

struct ExperimentSummary {
  std::vector<AlphaSummary> per_alpha;
  std::string generator = kGeneratorId;
  std::uint64_t seed = 0;
};

// Draws `count` samples with x ~ N(mu, sigma_x^2 I) and
// y = <w, x> + b + sigma_y * z.
Dataset draw_linear_gaussian(const std::vector<double>& mu, double sigma_x,
                             double sigma_y, const std::vector<double>& w,
                             double b, std::size_t count, RandomStream& rng);

// Target draw: source index from target_mix, features from that source's
// marginal, response noise at sigma_ty.
Dataset draw_target_mixture(const ExperimentConfig& config, std::size_t count,
                            RandomStream& rng);

// Least-squares fit with an intercept column; throws RankDeficient when the
// design (including the intercept) loses full column rank.
LinearModel fit_least_squares(const Dataset& data);

double predict(const LinearModel& model, std::span<const double> x);

// Nonconformity score |<w, x> + b - y|.
double absolute_residual(const LinearModel& model, std::span<const double> x,
                         double y);

// Divergence between the absolute-residual laws of target and source when
// the fitted model matches the signal: half-normal scale sigma_target versus
// half-normal scale sigma_source. Closed form for kl; composite-Simpson
// quadrature on [0, 12 * max scale] otherwise.
double score_law_divergence(double sigma_source, double sigma_target,
                            const DivergenceFamily& family);

// One trial: fit on fresh training data, calibrate per source, score a fresh
// target sample against both the split-conformal and the robust threshold at
// every alpha. `plans` may carry precomputed epsilon choices (one per alpha,
// nullopt = infeasible); when absent they are recomputed here.
TrialResult run_trial(const ExperimentConfig& config, std::uint64_t trial_index,
                      const std::vector<std::optional<EpsilonChoice>>* plans =
                          nullptr);

// All trials (parallel when OODCP_THREADS or the hardware allows), folded
// deterministically in trial order.
ExperimentSummary run_experiment(const ExperimentConfig& config,
                                 std::vector<TrialResult>* trials_out = nullptr);

}  // namespace oodcp
