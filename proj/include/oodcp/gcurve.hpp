#pragma once

#include <span>

#include "oodcp/divergence.hpp"

namespace oodcp {

// Level-distortion curve of a divergence ball of radius rho.
//
// worst_case_level(beta) is the smallest CDF level any distribution within
// divergence rho of the reference can assign to an event of reference level
// beta. required_level(tau) is its right inverse: the reference level one
// must read off so that every distribution in the ball still reaches tau.
//
// Both are computed in closed form for chi2 and tv and by bisection on the
// two-point objective otherwise. Bisection answers land on the feasible side
// of the constraint, within `tolerance` of the exact boundary: the curve is
// rounded up and its inverse down.
class LevelDistortion {
 public:
  static constexpr double kDefaultTolerance = 1e-10;

  // Requires rho >= 0 and tolerance in (0, 1e-4].
  LevelDistortion(DivergenceFamily family, double rho,
                  double tolerance = kDefaultTolerance);

  const DivergenceFamily& family() const { return family_; }
  double rho() const { return rho_; }
  double tolerance() const { return tolerance_; }

  // inf { z in [0,1] : binary_divergence(z, beta) <= rho }, beta in [0,1].
  double worst_case_level(double beta) const;

  // sup { beta in [0,1] : worst_case_level(beta) <= tau }, tau in [0,1].
  double required_level(double tau) const;

  // Multi-source reduction: the worst case over a hull of references is the
  // worst case at the smallest level. Throws EmptyInput on an empty span.
  double worst_case_level(std::span<const double> betas) const;

  // Bisection paths, exposed so closed forms can be cross-checked and used
  // directly for custom families.
  double worst_case_level_generic(double beta) const;
  double required_level_generic(double tau) const;

 private:
  DivergenceFamily family_;
  double rho_;
  double tolerance_;
};

}  // namespace oodcp
