#include "oodcp/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "oodcp/divergence.hpp"

namespace oodcp {

double scp_threshold(std::span<const double> scores, double alpha) {
  if (scores.empty()) {
    throw EmptyCalibration("scp_threshold: no calibration scores");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error("scp_threshold: alpha must lie in (0, 1), got " +
                std::to_string(alpha));
  }
  for (double s : scores) {
    if (!std::isfinite(s)) {
      throw NonFiniteScore("scp_threshold: score " + std::to_string(s));
    }
  }
  const std::size_t n = scores.size();
  const double target = static_cast<double>(n + 1) * (1.0 - alpha);
  const double k = std::ceil(target - kRankSlack);
  if (k > static_cast<double>(n)) return kInf;
  std::vector<double> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t rank = k <= 1.0 ? 1 : static_cast<std::size_t>(k);
  return sorted[rank - 1];
}

RealInterval interval_set(double prediction, double threshold) {
  if (std::isnan(threshold) || threshold < 0.0) {
    throw NegativeThreshold("interval_set: threshold " +
                            std::to_string(threshold));
  }
  if (!std::isfinite(prediction)) {
    throw NonFiniteScore("interval_set: prediction " +
                         std::to_string(prediction));
  }
  if (threshold == kInf) return {-kInf, kInf};
  return {prediction - threshold, prediction + threshold};
}

std::vector<std::size_t> admitted_labels(std::span<const double> label_scores,
                                         double threshold) {
  if (std::isnan(threshold) || threshold < 0.0) {
    throw NegativeThreshold("admitted_labels: threshold " +
                            std::to_string(threshold));
  }
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < label_scores.size(); ++i) {
    if (std::isnan(label_scores[i])) {
      throw NonFiniteScore("admitted_labels: score at index " +
                           std::to_string(i));
    }
    if (label_scores[i] <= threshold) kept.push_back(i);
  }
  return kept;
}

ScpPredictor::ScpPredictor(std::vector<double> calibration_scores, double alpha)
    : calibration_(std::move(calibration_scores)),
      alpha_(alpha),
      threshold_(scp_threshold(calibration_.sorted(), alpha)) {}

RealInterval ScpPredictor::predict(double point_prediction) const {
  return interval_set(point_prediction, threshold_);
}

}  // namespace oodcp
