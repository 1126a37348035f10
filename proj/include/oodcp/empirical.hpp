#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "oodcp/error.hpp"

namespace oodcp {

// Slack subtracted from rank products like ceil(beta * m) before rounding up.
// Decimal levels such as 0.9 are not representable in binary; without the
// slack, (n+1) * (1 - alpha) can land one ulp above an exact integer and
// shift the selected order statistic by one. Levels that differ from an
// integer multiple of 1/m by more than 1e-9/m are unaffected.
inline constexpr double kRankSlack = 1e-9;

// Empirical CDF of a finite score sample: F(x) = #{scores <= x} / m.
class EmpiricalCdf {
 public:
  // Sorts a copy. Throws EmptyInput on an empty sample and NonFiniteScore on
  // NaN or infinite entries.
  explicit EmpiricalCdf(std::vector<double> scores);

  std::size_t size() const { return sorted_.size(); }
  std::span<const double> sorted() const { return sorted_; }

  double value_at(double x) const;

  // Generalized inverse: the smallest x with F(x) >= level, i.e. the
  // ceil(level * m)-th order statistic. level <= 0 gives -inf; a level
  // materially above 1 (beyond the rank slack) gives +inf.
  double quantile(double level) const;

 private:
  std::vector<double> sorted_;
};

// Pointwise minimum of several empirical CDFs, the conservative envelope a
// hull of source domains guarantees at every point.
class MinCdf {
 public:
  // Throws EmptyInput when no components are given.
  explicit MinCdf(std::vector<EmpiricalCdf> components);

  const std::vector<EmpiricalCdf>& components() const { return components_; }
  std::vector<std::uint64_t> sample_sizes() const;

  double value_at(double x) const;

  // Smallest x in the merged atom list with min_i F_i(x) >= level; found by
  // scanning merged atoms in order. Same boundary conventions as
  // EmpiricalCdf::quantile.
  double quantile(double level) const;

 private:
  std::vector<EmpiricalCdf> components_;
};

// Calibration scores grouped by source domain.
struct CalibrationBundle {
  std::vector<std::vector<double>> scores_by_domain;

  // Throws EmptyCalibration when there are no domains or a domain is empty,
  // NonFiniteScore on bad entries.
  void validate() const;

  std::vector<std::uint64_t> sample_sizes() const;
  std::vector<double> pooled() const;
  MinCdf min_cdf() const;
};

// Union failure probability that any of the source empirical CDFs deviates
// from its population CDF by more than epsilon in sup norm:
//   2 * sum_i exp(-2 * m_i * epsilon^2).
// Not clamped to [0, 1]; small terms underflow to 0 naturally.
double dkw_failure_bound(std::span<const std::uint64_t> sample_sizes,
                         double epsilon);

}  // namespace oodcp
