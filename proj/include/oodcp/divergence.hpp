#pragma once

#include <functional>
#include <limits>
#include <span>
#include <string>
#include <string_view>

#include "oodcp/error.hpp"

namespace oodcp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class DivergenceKind : std::uint8_t {
  kChiSquare,
  kTotalVariation,
  kKullbackLeibler,
  kCustom,
};

// An f-divergence is determined by a convex generator f with f(1) = 0,
// extended by f(t) = +inf for t < 0. All built-in generators are normalized
// so that f >= 0 and f'(1) = 0; the normalization adds a multiple of (t - 1)
// and leaves every divergence value unchanged.
//
// The slope at infinity lim f(t)/t controls how much probability mass can
// escape the support of the reference distribution: an infinite slope pins
// the worst case inside it.
class DivergenceFamily {
 public:
  using Generator = std::function<double(double)>;

  static DivergenceFamily chi_square();
  static DivergenceFamily total_variation();
  static DivergenceFamily kullback_leibler();

  // Registers a caller-supplied generator. Spot-checks f(1) = 0, f >= 0 and
  // midpoint convexity on a 64-point grid; throws InvalidFamily on violation.
  static DivergenceFamily custom(std::string name, Generator f,
                                 double slope_at_infinity);

  DivergenceKind kind() const { return kind_; }
  const std::string& name() const { return name_; }

  // f(t); +inf for t < 0.
  double value(double t) const;

  // lim_{t->inf} f(t)/t, possibly +inf.
  double slope_at_infinity() const { return slope_at_infinity_; }

  // True when the level-distortion curve has a closed form (chi2, tv).
  bool has_closed_form_curve() const;

 private:
  DivergenceFamily(DivergenceKind kind, std::string name,
                   Generator f, double slope_at_infinity);

  DivergenceKind kind_;
  std::string name_;
  Generator f_;
  double slope_at_infinity_;
};

// Parses "chi2", "tv" or "kl"; throws UnknownFamily otherwise.
DivergenceFamily family_from_name(std::string_view name);

// b * f(a / b) extended by continuity: the b = 0 limit is a * f'(inf), and
// 0 * f(0/0) = 0 when a and b vanish together.
double perspective_term(const DivergenceFamily& family, double a, double b);

// Divergence between Bernoulli(z) and Bernoulli(beta) reference:
//   beta * f(z/beta) + (1 - beta) * f((1-z)/(1-beta)),
// the two-point objective whose sublevel sets define the distortion curve.
// Requires z, beta in [0, 1]. Nonnegative, zero exactly at z = beta,
// non-increasing in z on [0, beta] and non-decreasing on [beta, 1].
double binary_divergence(const DivergenceFamily& family, double z, double beta);

// D_f(p || q) = sum_i q_i * f(p_i / q_i) for probability vectors of equal
// length. q_i = 0 contributes p_i * f'(inf). Throws LengthMismatch or
// NotNormalized (bad sum or negative entry).
double discrete_divergence(const DivergenceFamily& family,
                           std::span<const double> p,
                           std::span<const double> q);

}  // namespace oodcp
