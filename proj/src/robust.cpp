#include "oodcp/robust.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace oodcp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error("alpha must lie in (0, 1), got " + std::to_string(alpha));
  }
}

// Sizes with the override applied, when present.
std::vector<std::uint64_t> effective_sizes(
    std::span<const std::uint64_t> sample_sizes,
    const std::optional<std::uint64_t>& override_m) {
  std::vector<std::uint64_t> ms(sample_sizes.begin(), sample_sizes.end());
  if (override_m) {
    std::fill(ms.begin(), ms.end(), *override_m);
  }
  return ms;
}

}  // namespace

void RobustConfig::validate() const {
  if (!(rho >= 0.0) || std::isnan(rho)) {
    throw Error("RobustConfig: rho must be >= 0, got " + std::to_string(rho));
  }
  check_alpha(alpha);
  if (epsilon_grid < 10) {
    throw Error("RobustConfig: epsilon_grid must be >= 10, got " +
                std::to_string(epsilon_grid));
  }
  if (dkw_m_override && *dkw_m_override == 0) {
    throw Error("RobustConfig: dkw_m_override must be positive");
  }
}

double worst_case_quantile(const MinCdf& envelope,
                           const DivergenceFamily& family, double rho,
                           double level) {
  if (!(level >= 0.0 && level <= 1.0)) {
    throw Error("worst_case_quantile: level must lie in [0, 1], got " +
                std::to_string(level));
  }
  const LevelDistortion curve(family, rho);
  return envelope.quantile(curve.required_level(level));
}

double epsilon_objective(std::span<const std::uint64_t> sample_sizes,
                         const DivergenceFamily& family, double rho,
                         double alpha, double epsilon) {
  check_alpha(alpha);
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    throw InfeasibleEpsilon("epsilon must lie in (0, 1], got " +
                            std::to_string(epsilon));
  }
  const double delta = dkw_failure_bound(sample_sizes, epsilon);
  if (delta >= 1.0) return kInf;
  const double inflated = (1.0 - alpha) / (1.0 - delta);
  if (inflated > 1.0) return kInf;
  const LevelDistortion curve(family, rho);
  return epsilon + curve.required_level(inflated);
}

EpsilonChoice optimize_epsilon(std::span<const std::uint64_t> sample_sizes,
                               const DivergenceFamily& family, double rho,
                               double alpha, int grid) {
  if (grid < 10) {
    throw Error("optimize_epsilon: grid must be >= 10, got " +
                std::to_string(grid));
  }
  double best_eps = 0.0;
  double best_level = kInf;
  for (int k = 1; k <= grid; ++k) {
    const double eps = static_cast<double>(k) / grid;
    const double level =
        epsilon_objective(sample_sizes, family, rho, alpha, eps);
    if (level <= 1.0 && level < best_level) {
      best_level = level;
      best_eps = eps;
    }
  }
  if (!(best_level <= 1.0)) {
    throw Infeasible(
        "optimize_epsilon: no epsilon keeps the corrected level at or "
        "below 1 (alpha=" +
        std::to_string(alpha) + ", rho=" + std::to_string(rho) + ")");
  }
  // One deterministic shrinking pass around the best cell. Accepted only on
  // strict improvement, so grid ties still resolve to the smaller epsilon.
  const double cell = 1.0 / grid;
  double lo = std::max(best_eps - cell, cell * 1e-6);
  double hi = std::min(best_eps + cell, 1.0);
  for (int i = 0; i < 60 && hi - lo > 1e-15; ++i) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    const double f1 = epsilon_objective(sample_sizes, family, rho, alpha, m1);
    const double f2 = epsilon_objective(sample_sizes, family, rho, alpha, m2);
    if (f1 <= 1.0 && f1 < best_level) {
      best_level = f1;
      best_eps = m1;
    }
    if (f2 <= 1.0 && f2 < best_level) {
      best_level = f2;
      best_eps = m2;
    }
    if (f1 < f2) {
      hi = m2;
    } else {
      lo = m1;
    }
  }
  return {best_eps, best_level};
}

double corrected_alpha(std::span<const std::uint64_t> sample_sizes,
                       const DivergenceFamily& family, double rho, double alpha,
                       double epsilon) {
  const double level =
      epsilon_objective(sample_sizes, family, rho, alpha, epsilon);
  if (!std::isfinite(level)) {
    throw InfeasibleEpsilon(
        "corrected_alpha: epsilon " + std::to_string(epsilon) +
        " leaves the corrected quantile level undefined (delta >= 1 or "
        "inflated level above 1)");
  }
  // Levels overshooting 1 land on the clipped end of the curve; for tv this
  // yields the rho plateau.
  const LevelDistortion curve(family, rho);
  return 1.0 - curve.worst_case_level(std::min(level, 1.0));
}

double coverage_lower_bound(std::span<const std::uint64_t> sample_sizes,
                            const DivergenceFamily& family, double rho,
                            double alpha, double epsilon) {
  check_alpha(alpha);
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    throw InfeasibleEpsilon("epsilon must lie in (0, 1], got " +
                            std::to_string(epsilon));
  }
  const double delta = dkw_failure_bound(sample_sizes, epsilon);
  if (delta >= 1.0) return 0.0;  // vacuous
  const LevelDistortion curve(family, rho);
  const double arg =
      std::clamp(curve.required_level(1.0 - alpha) - epsilon, 0.0, 1.0);
  const double bound = (1.0 - delta) * curve.worst_case_level(arg);
  return std::clamp(bound, 0.0, 1.0);
}

std::optional<EpsilonChoice> plan_epsilon(
    std::span<const std::uint64_t> sample_sizes, const RobustConfig& config) {
  config.validate();
  const auto ms = effective_sizes(sample_sizes, config.dkw_m_override);
  try {
    return optimize_epsilon(ms, config.family, config.rho, config.alpha,
                            config.epsilon_grid);
  } catch (const Infeasible&) {
    return std::nullopt;
  }
}

RobustThresholdReport apply_epsilon_choice(
    const MinCdf& envelope, std::span<const std::uint64_t> sample_sizes,
    const RobustConfig& config, const EpsilonChoice& choice) {
  const auto ms = effective_sizes(sample_sizes, config.dkw_m_override);
  const LevelDistortion curve(config.family, config.rho);
  RobustThresholdReport report;
  report.feasible = true;
  report.epsilon_star = choice.epsilon;
  report.quantile_level = choice.level;
  report.dkw_delta = dkw_failure_bound(ms, choice.epsilon);
  report.threshold = envelope.quantile(choice.level);
  report.corrected_alpha =
      1.0 - curve.worst_case_level(std::min(choice.level, 1.0));
  return report;
}

RobustThresholdReport robust_threshold(const CalibrationBundle& bundle,
                                       const RobustConfig& config) {
  bundle.validate();
  config.validate();
  const auto sizes = bundle.sample_sizes();
  const auto choice = plan_epsilon(sizes, config);
  if (!choice) {
    RobustThresholdReport report;
    report.feasible = false;
    report.threshold = kInf;
    report.epsilon_star = kNaN;
    report.corrected_alpha = kNaN;
    report.dkw_delta = kNaN;
    report.quantile_level = kNaN;
    return report;
  }
  return apply_epsilon_choice(bundle.min_cdf(), sizes, config, *choice);
}

}  // namespace oodcp
