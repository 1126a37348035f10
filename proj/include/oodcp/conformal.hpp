#pragma once

#include <span>
#include <vector>

#include "oodcp/empirical.hpp"

namespace oodcp {

// Split-conformal nonconformity threshold:
//   the ceil((n+1) * (1 - alpha))-th order statistic of the scores,
//   or +inf when that rank exceeds n (the finite sample cannot certify the
//   level, so the full set is returned).
// Requires alpha in (0, 1); throws EmptyCalibration on an empty sample.
double scp_threshold(std::span<const double> scores, double alpha);

// A closed interval on the extended real line.
struct RealInterval {
  double lo;
  double hi;

  double length() const { return hi - lo; }
  bool contains(double y) const { return lo <= y && y <= hi; }
};

// Interval prediction set for an absolute-residual score:
//   [prediction - threshold, prediction + threshold].
// threshold = +inf gives the whole line. Throws NegativeThreshold when
// threshold is negative or NaN.
RealInterval interval_set(double prediction, double threshold);

// Label prediction set for classification scores: keeps the indices whose
// score is at most the threshold. Same threshold validation as interval_set;
// throws NonFiniteScore on NaN scores.
std::vector<std::size_t> admitted_labels(std::span<const double> label_scores,
                                         double threshold);

// Calibrated split-conformal predictor for regression scores |y - prediction|.
class ScpPredictor {
 public:
  ScpPredictor(std::vector<double> calibration_scores, double alpha);

  double alpha() const { return alpha_; }
  double threshold() const { return threshold_; }
  const EmpiricalCdf& calibration() const { return calibration_; }

  RealInterval predict(double point_prediction) const;

 private:
  EmpiricalCdf calibration_;
  double alpha_;
  double threshold_;
};

}  // namespace oodcp
