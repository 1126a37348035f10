#include "oodcp/divergence.hpp"

#include <cmath>
#include <utility>

namespace oodcp {

namespace {

double chi_square_f(double t) {
  if (t < 0.0) return kInf;
  return (t - 1.0) * (t - 1.0);
}

double total_variation_f(double t) {
  if (t < 0.0) return kInf;
  return 0.5 * std::abs(t - 1.0);
}

// t log t normalized by -(t - 1) so the generator is nonnegative with a
// stationary point at 1. Divergence values are unaffected.
double kullback_leibler_f(double t) {
  if (t < 0.0) return kInf;
  if (t == 0.0) return 1.0;
  return t * std::log(t) - t + 1.0;
}

}  // namespace

DivergenceFamily::DivergenceFamily(DivergenceKind kind, std::string name,
                                   Generator f, double slope_at_infinity)
    : kind_(kind),
      name_(std::move(name)),
      f_(std::move(f)),
      slope_at_infinity_(slope_at_infinity) {}

DivergenceFamily DivergenceFamily::chi_square() {
  return {DivergenceKind::kChiSquare, "chi2", chi_square_f, kInf};
}

DivergenceFamily DivergenceFamily::total_variation() {
  return {DivergenceKind::kTotalVariation, "tv", total_variation_f, 0.5};
}

DivergenceFamily DivergenceFamily::kullback_leibler() {
  return {DivergenceKind::kKullbackLeibler, "kl", kullback_leibler_f, kInf};
}

DivergenceFamily DivergenceFamily::custom(std::string name, Generator f,
                                          double slope_at_infinity) {
  if (!f) throw InvalidFamily("custom family: null generator");
  if (!(slope_at_infinity >= 0.0)) {
    throw InvalidFamily("custom family: slope at infinity must be >= 0");
  }
  // Spot-check the generator contract on [0, 8]: f(1) = 0, f >= 0, and
  // midpoint convexity over consecutive grid triples.
  constexpr int kGrid = 64;
  constexpr double kSpan = 8.0;
  double prev[2] = {0.0, 0.0};
  for (int i = 0; i < kGrid; ++i) {
    const double t = kSpan * static_cast<double>(i) / (kGrid - 1);
    const double v = f(t);
    if (std::isnan(v) || v < -1e-12) {
      throw InvalidFamily("custom family: generator is negative at t=" +
                          std::to_string(t));
    }
    if (i >= 2 && std::isfinite(prev[0]) && std::isfinite(v)) {
      const double mid = 0.5 * (prev[0] + v);
      if (prev[1] > mid + 1e-9) {
        throw InvalidFamily("custom family: generator fails convexity near t=" +
                            std::to_string(t));
      }
    }
    prev[0] = prev[1];
    prev[1] = v;
  }
  const double at_one = f(1.0);
  if (!(std::abs(at_one) <= 1e-12)) {
    throw InvalidFamily("custom family: f(1) must be 0, got " +
                        std::to_string(at_one));
  }
  auto wrapped = [inner = std::move(f)](double t) {
    if (t < 0.0) return kInf;
    return inner(t);
  };
  return {DivergenceKind::kCustom, std::move(name), std::move(wrapped),
          slope_at_infinity};
}

double DivergenceFamily::value(double t) const { return f_(t); }

bool DivergenceFamily::has_closed_form_curve() const {
  return kind_ == DivergenceKind::kChiSquare ||
         kind_ == DivergenceKind::kTotalVariation;
}

DivergenceFamily family_from_name(std::string_view name) {
  if (name == "chi2") return DivergenceFamily::chi_square();
  if (name == "tv") return DivergenceFamily::total_variation();
  if (name == "kl") return DivergenceFamily::kullback_leibler();
  throw UnknownFamily("unknown divergence family '" + std::string(name) +
                      "' (expected chi2, tv or kl)");
}

double perspective_term(const DivergenceFamily& family, double a, double b) {
  if (b == 0.0) {
    if (a == 0.0) return 0.0;
    const double slope = family.slope_at_infinity();
    return slope == 0.0 ? 0.0 : a * slope;
  }
  return b * family.value(a / b);
}

double binary_divergence(const DivergenceFamily& family, double z,
                         double beta) {
  return perspective_term(family, z, beta) +
         perspective_term(family, 1.0 - z, 1.0 - beta);
}

double discrete_divergence(const DivergenceFamily& family,
                           std::span<const double> p,
                           std::span<const double> q) {
  if (p.size() != q.size()) {
    throw LengthMismatch("discrete_divergence: p has " +
                         std::to_string(p.size()) + " entries, q has " +
                         std::to_string(q.size()));
  }
  if (p.empty()) throw EmptyInput("discrete_divergence: empty vectors");
  double sum_p = 0.0;
  double sum_q = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < 0.0 || q[i] < 0.0) {
      throw NotNormalized("discrete_divergence: negative entry at index " +
                          std::to_string(i));
    }
    sum_p += p[i];
    sum_q += q[i];
  }
  if (std::abs(sum_p - 1.0) > 1e-9 || std::abs(sum_q - 1.0) > 1e-9) {
    throw NotNormalized("discrete_divergence: vectors must sum to 1 (got " +
                        std::to_string(sum_p) + " and " + std::to_string(sum_q) +
                        ")");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    total += perspective_term(family, p[i], q[i]);
  }
  return total;
}

}  // namespace oodcp
