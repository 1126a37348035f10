#include "oodcp/gcurve.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace oodcp {

namespace {

constexpr int kMaxBisectionSteps = 200;

void check_unit_interval(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw Error(std::string(what) + " must lie in [0, 1], got " +
                std::to_string(v));
  }
}

}  // namespace

LevelDistortion::LevelDistortion(DivergenceFamily family, double rho,
                                 double tolerance)
    : family_(std::move(family)), rho_(rho), tolerance_(tolerance) {
  if (!(rho >= 0.0) || std::isnan(rho)) {
    throw Error("LevelDistortion: rho must be >= 0, got " +
                std::to_string(rho));
  }
  if (!(tolerance > 0.0 && tolerance <= 1e-4)) {
    throw Error("LevelDistortion: tolerance must lie in (0, 1e-4], got " +
                std::to_string(tolerance));
  }
}

double LevelDistortion::worst_case_level(double beta) const {
  check_unit_interval(beta, "beta");
  if (rho_ == 0.0) return beta;
  switch (family_.kind()) {
    case DivergenceKind::kChiSquare: {
      const double s = beta - std::sqrt(rho_ * beta * (1.0 - beta));
      return std::max(s, 0.0);
    }
    case DivergenceKind::kTotalVariation:
      return std::max(beta - rho_, 0.0);
    default:
      return worst_case_level_generic(beta);
  }
}

double LevelDistortion::worst_case_level_generic(double beta) const {
  check_unit_interval(beta, "beta");
  // binary_divergence(., beta) is non-increasing on [0, beta] and hits 0 at
  // beta, so the feasible set is an interval [z*, beta]; bisect for z*.
  if (binary_divergence(family_, 0.0, beta) <= rho_) return 0.0;
  double lo = 0.0;    // infeasible
  double hi = beta;   // feasible
  for (int i = 0; i < kMaxBisectionSteps && hi - lo > tolerance_; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (binary_divergence(family_, mid, beta) <= rho_) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

double LevelDistortion::required_level(double tau) const {
  check_unit_interval(tau, "tau");
  if (rho_ == 0.0) return tau;
  switch (family_.kind()) {
    case DivergenceKind::kChiSquare: {
      // Largest root of (beta - tau)^2 = rho beta (1 - beta), clipped to the
      // zero plateau [rho/(1+rho), 1] and to [tau, 1].
      const double disc = rho_ * (4.0 * tau * (1.0 - tau) + rho_);
      const double root =
          ((2.0 * tau + rho_) + std::sqrt(disc)) / (2.0 * (1.0 + rho_));
      const double lower = std::max(tau, rho_ / (1.0 + rho_));
      return std::min(std::max(root, lower), 1.0);
    }
    case DivergenceKind::kTotalVariation:
      return std::min(tau + rho_, 1.0);
    default:
      return required_level_generic(tau);
  }
}

double LevelDistortion::required_level_generic(double tau) const {
  check_unit_interval(tau, "tau");
  // binary_divergence(tau, .) is non-decreasing on [tau, 1], so the feasible
  // set is an interval [tau, beta*]; bisect for beta*.
  if (binary_divergence(family_, tau, 1.0) <= rho_) return 1.0;
  double lo = tau;   // feasible: the objective vanishes at beta = tau
  double hi = 1.0;   // infeasible
  for (int i = 0; i < kMaxBisectionSteps && hi - lo > tolerance_; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (binary_divergence(family_, tau, mid) <= rho_) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

double LevelDistortion::worst_case_level(std::span<const double> betas) const {
  if (betas.empty()) {
    throw EmptyInput("worst_case_level: empty level list");
  }
  double smallest = betas[0];
  for (double b : betas) {
    check_unit_interval(b, "beta");
    smallest = std::min(smallest, b);
  }
  return worst_case_level(smallest);
}

}  // namespace oodcp
