#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "oodcp/empirical.hpp"
#include "oodcp/gcurve.hpp"

namespace oodcp {

// Settings for the distribution-shift-robust threshold.
struct RobustConfig {
  DivergenceFamily family;
  double rho = 0.0;
  double alpha = 0.1;
  // Number of candidate epsilons k/epsilon_grid, k = 1..epsilon_grid.
  int epsilon_grid = 2000;
  // When set, the concentration correction is computed as if every source
  // had this many calibration points; quantiles still use the real scores.
  // Lets callers study the large-sample limit on a finite sample.
  std::optional<std::uint64_t> dkw_m_override;

  void validate() const;
};

// Outcome of the robust threshold computation. When the epsilon program is
// infeasible the threshold is +inf (full prediction set), `feasible` is
// false and the remaining fields are NaN.
struct RobustThresholdReport {
  double threshold = 0.0;
  double epsilon_star = 0.0;
  double corrected_alpha = 0.0;
  double dkw_delta = 0.0;
  double quantile_level = 0.0;
  bool feasible = true;
};

// A concentration margin and the quantile level it induces.
struct EpsilonChoice {
  double epsilon = 0.0;
  double level = 0.0;
};

// Quantile of the min-CDF envelope at the distorted level required_level(level).
// level in [0, 1].
double worst_case_quantile(const MinCdf& envelope,
                           const DivergenceFamily& family, double rho,
                           double level);

// Corrected quantile level for a fixed concentration margin epsilon:
//   epsilon + required_level((1 - alpha) / (1 - delta(epsilon))),
// where delta is the union concentration failure bound. Returns +inf when
// delta >= 1 or when (1 - alpha) / (1 - delta) exceeds 1; values above 1 are
// returned as-is for the optimizer to reject.
double epsilon_objective(std::span<const std::uint64_t> sample_sizes,
                         const DivergenceFamily& family, double rho,
                         double alpha, double epsilon);

// Minimizes epsilon_objective over the grid {k/grid : k = 1..grid} with one
// deterministic local refinement pass around the best cell, keeping only
// candidates whose level is at most 1. Ties resolve to the smaller epsilon.
// Throws Infeasible when no candidate qualifies.
EpsilonChoice optimize_epsilon(std::span<const std::uint64_t> sample_sizes,
                               const DivergenceFamily& family, double rho,
                               double alpha, int grid = 2000);

// Miscoverage level actually certified after both corrections:
//   1 - worst_case_level(min(epsilon_objective(...), 1)).
// Throws InfeasibleEpsilon when epsilon is outside (0, 1], delta >= 1 or the
// inflated level exceeds 1.
double corrected_alpha(std::span<const std::uint64_t> sample_sizes,
                       const DivergenceFamily& family, double rho,
                       double alpha, double epsilon);

// Lower confidence bound on target coverage at the robust threshold:
//   (1 - delta) * worst_case_level(required_level(1 - alpha) - epsilon),
// clamped into [0, 1]; a vacuous 0 when delta >= 1. Throws InfeasibleEpsilon
// for epsilon outside (0, 1].
double coverage_lower_bound(std::span<const std::uint64_t> sample_sizes,
                            const DivergenceFamily& family, double rho,
                            double alpha, double epsilon);

// Epsilon choice for a given source size profile, or nullopt when the
// program is infeasible.
std::optional<EpsilonChoice> plan_epsilon(
    std::span<const std::uint64_t> sample_sizes, const RobustConfig& config);

// Applies a precomputed epsilon choice to a calibration envelope.
RobustThresholdReport apply_epsilon_choice(
    const MinCdf& envelope, std::span<const std::uint64_t> sample_sizes,
    const RobustConfig& config, const EpsilonChoice& choice);

// Full pipeline: plan the margin, read the distorted quantile off the
// envelope, report the certified miscoverage. Infeasibility is reported in
// the result, not thrown.
RobustThresholdReport robust_threshold(const CalibrationBundle& bundle,
                                       const RobustConfig& config);

}  // namespace oodcp
