#include "oodcp/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "oodcp/divergence.hpp"

namespace oodcp {

namespace {

// ceil(level * m - kRankSlack) clamped below at 1. Ranks above m signal a
// level materially larger than 1.
std::size_t rank_for_level(double level, std::size_t m) {
  const double scaled = level * static_cast<double>(m) - kRankSlack;
  const double k = std::ceil(scaled);
  if (k <= 1.0) return 1;
  return static_cast<std::size_t>(k);
}

}  // namespace

EmpiricalCdf::EmpiricalCdf(std::vector<double> scores)
    : sorted_(std::move(scores)) {
  if (sorted_.empty()) {
    throw EmptyInput("EmpiricalCdf: empty score sample");
  }
  for (double s : sorted_) {
    if (!std::isfinite(s)) {
      throw NonFiniteScore("EmpiricalCdf: score " + std::to_string(s));
    }
  }
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::value_at(double x) const {
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
  return static_cast<double>(it - sorted_.begin()) /
         static_cast<double>(sorted_.size());
}

double EmpiricalCdf::quantile(double level) const {
  if (level <= 0.0) return -kInf;
  const std::size_t k = rank_for_level(level, sorted_.size());
  if (k > sorted_.size()) return kInf;
  return sorted_[k - 1];
}

MinCdf::MinCdf(std::vector<EmpiricalCdf> components)
    : components_(std::move(components)) {
  if (components_.empty()) {
    throw EmptyInput("MinCdf: no components");
  }
}

std::vector<std::uint64_t> MinCdf::sample_sizes() const {
  std::vector<std::uint64_t> sizes;
  sizes.reserve(components_.size());
  for (const auto& c : components_) sizes.push_back(c.size());
  return sizes;
}

double MinCdf::value_at(double x) const {
  double smallest = 1.0;
  for (const auto& c : components_) {
    smallest = std::min(smallest, c.value_at(x));
  }
  return smallest;
}

double MinCdf::quantile(double level) const {
  if (level <= 0.0) return -kInf;
  // The envelope reaches `level` at x iff every component does, i.e. iff at
  // least k_i atoms of component i lie at or below x.
  std::vector<std::size_t> needed(components_.size());
  for (std::size_t i = 0; i < components_.size(); ++i) {
    const std::size_t k = rank_for_level(level, components_[i].size());
    if (k > components_[i].size()) return kInf;
    needed[i] = k;
  }
  // Scan the merged sorted atoms, advancing per-component counts of atoms
  // consumed so far; the first atom where every count meets its requirement
  // is the quantile.
  std::vector<std::size_t> pos(components_.size(), 0);
  for (;;) {
    double next = kInf;
    for (std::size_t i = 0; i < components_.size(); ++i) {
      const auto atoms = components_[i].sorted();
      if (pos[i] < atoms.size()) next = std::min(next, atoms[pos[i]]);
    }
    // All requirements are satisfiable, so the scan terminates before the
    // merged list is exhausted; this guards against logic rot.
    if (next == kInf) return kInf;
    for (std::size_t i = 0; i < components_.size(); ++i) {
      const auto atoms = components_[i].sorted();
      while (pos[i] < atoms.size() && atoms[pos[i]] <= next) ++pos[i];
    }
    bool reached = true;
    for (std::size_t i = 0; i < components_.size(); ++i) {
      if (pos[i] < needed[i]) {
        reached = false;
        break;
      }
    }
    if (reached) return next;
  }
}

void CalibrationBundle::validate() const {
  if (scores_by_domain.empty()) {
    throw EmptyCalibration("calibration bundle: no source domains");
  }
  for (std::size_t i = 0; i < scores_by_domain.size(); ++i) {
    if (scores_by_domain[i].empty()) {
      throw EmptyCalibration("calibration bundle: domain " +
                             std::to_string(i) + " has no scores");
    }
    for (double s : scores_by_domain[i]) {
      if (!std::isfinite(s)) {
        throw NonFiniteScore("calibration bundle: domain " +
                             std::to_string(i) + " has score " +
                             std::to_string(s));
      }
    }
  }
}

std::vector<std::uint64_t> CalibrationBundle::sample_sizes() const {
  std::vector<std::uint64_t> sizes;
  sizes.reserve(scores_by_domain.size());
  for (const auto& d : scores_by_domain) sizes.push_back(d.size());
  return sizes;
}

std::vector<double> CalibrationBundle::pooled() const {
  std::vector<double> all;
  for (const auto& d : scores_by_domain) {
    all.insert(all.end(), d.begin(), d.end());
  }
  return all;
}

MinCdf CalibrationBundle::min_cdf() const {
  validate();
  std::vector<EmpiricalCdf> parts;
  parts.reserve(scores_by_domain.size());
  for (const auto& d : scores_by_domain) parts.emplace_back(d);
  return MinCdf(std::move(parts));
}

double dkw_failure_bound(std::span<const std::uint64_t> sample_sizes,
                         double epsilon) {
  if (sample_sizes.empty()) {
    throw EmptyInput("dkw_failure_bound: no sample sizes");
  }
  if (!(epsilon > 0.0)) {
    throw Error("dkw_failure_bound: epsilon must be > 0, got " +
                std::to_string(epsilon));
  }
  double sum = 0.0;
  for (std::uint64_t m : sample_sizes) {
    if (m == 0) throw EmptyInput("dkw_failure_bound: zero sample size");
    sum += std::exp(-2.0 * static_cast<double>(m) * epsilon * epsilon);
  }
  return 2.0 * sum;
}

}  // namespace oodcp
