#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "oodcp/gcurve.hpp"

using namespace oodcp;

namespace {

// Same generators re-registered as custom families: has_closed_form_curve()
// is false for those, which forces the generic bisection path and lets the
// tests compare it against the closed forms.
DivergenceFamily chi_square_generic() {
  return DivergenceFamily::custom(
      "chi2generic", [](double t) { return (t - 1.0) * (t - 1.0); }, kInf);
}

DivergenceFamily total_variation_generic() {
  return DivergenceFamily::custom(
      "tvgeneric", [](double t) { return 0.5 * std::abs(t - 1.0); }, 0.5);
}

}  // namespace

TEST_CASE("construction validates rho and tolerance") {
  const auto tv = DivergenceFamily::total_variation();
  CHECK_THROWS_AS(LevelDistortion(tv, -0.1), Error);
  CHECK_THROWS_AS(LevelDistortion(tv, 0.1, 0.0), Error);
  CHECK_THROWS_AS(LevelDistortion(tv, 0.1, -1e-10), Error);
  CHECK_THROWS_AS(LevelDistortion(tv, 0.1, 2e-4), Error);
  CHECK_NOTHROW(LevelDistortion(tv, 0.0, 1e-4));
}

TEST_CASE("zero radius is the identity") {
  for (const auto& family :
       {DivergenceFamily::chi_square(), DivergenceFamily::total_variation(),
        DivergenceFamily::kullback_leibler()}) {
    const LevelDistortion curve(family, 0.0);
    for (double level = 0.0; level <= 1.0; level += 0.05) {
      CHECK(curve.worst_case_level(level) == doctest::Approx(level).epsilon(1e-12));
      CHECK(curve.required_level(level) == doctest::Approx(level).epsilon(1e-12));
    }
  }
}

TEST_CASE("total variation closed forms") {
  const LevelDistortion curve(DivergenceFamily::total_variation(), 0.1);
  CHECK(curve.worst_case_level(0.5) == doctest::Approx(0.4));
  CHECK(curve.required_level(0.5) == doctest::Approx(0.6));
  for (double beta = 0.0; beta <= 1.0; beta += 0.01) {
    CHECK(curve.worst_case_level(beta) ==
          doctest::Approx(std::max(beta - 0.1, 0.0)).epsilon(1e-12));
    CHECK(curve.required_level(beta) ==
          doctest::Approx(std::min(beta + 0.1, 1.0)).epsilon(1e-12));
  }
}

TEST_CASE("chi-square closed forms") {
  const double rho = 0.1;
  const LevelDistortion curve(DivergenceFamily::chi_square(), rho);
  CHECK(curve.worst_case_level(0.5) ==
        doctest::Approx(0.5 - std::sqrt(0.1 * 0.25)).epsilon(1e-12));
  for (double beta = 0.0; beta <= 1.0; beta += 0.01) {
    const double expected =
        std::max(beta - std::sqrt(rho * beta * (1.0 - beta)), 0.0);
    CHECK(curve.worst_case_level(beta) == doctest::Approx(expected).epsilon(1e-12));
  }
  for (double tau = 0.0; tau <= 1.0; tau += 0.01) {
    const double root = ((2.0 * tau + rho) +
                         std::sqrt(rho * (4.0 * tau * (1.0 - tau) + rho))) /
                        (2.0 * (1.0 + rho));
    const double expected = std::min(std::max(root, std::max(tau, rho / (1.0 + rho))), 1.0);
    CHECK(curve.required_level(tau) == doctest::Approx(expected).epsilon(1e-12));
  }
  CHECK(curve.required_level(1.0) == doctest::Approx(1.0));
  CHECK(curve.required_level(0.0) == doctest::Approx(rho / (1.0 + rho)));
}

TEST_CASE("closed forms agree with generic bisection") {
  // The custom registrations force the bisection path on the same math.
  const std::vector<double> rhos = {0.001, 0.01, 0.05, 0.1, 0.5, 1.0};
  const auto chi2 = DivergenceFamily::chi_square();
  const auto chi2_generic = chi_square_generic();
  const auto tv = DivergenceFamily::total_variation();
  const auto tv_generic = total_variation_generic();
  for (const double rho : rhos) {
    const LevelDistortion closed_chi2(chi2, rho);
    const LevelDistortion generic_chi2(chi2_generic, rho);
    const LevelDistortion closed_tv(tv, rho);
    const LevelDistortion generic_tv(tv_generic, rho);
    for (double level = 0.0; level <= 1.0; level += 0.04) {
      CHECK(std::abs(closed_chi2.worst_case_level(level) -
                     generic_chi2.worst_case_level(level)) <= 1e-8);
      CHECK(std::abs(closed_chi2.required_level(level) -
                     generic_chi2.required_level(level)) <= 1e-8);
      CHECK(std::abs(closed_tv.worst_case_level(level) -
                     generic_tv.worst_case_level(level)) <= 1e-8);
      CHECK(std::abs(closed_tv.required_level(level) -
                     generic_tv.required_level(level)) <= 1e-8);
    }
  }
}

TEST_CASE("kl values match an independent high-resolution oracle") {
  // Frozen from a 200-step interval-halving oracle on the binary divergence,
  // run at full double precision.
  const LevelDistortion fine(DivergenceFamily::kullback_leibler(), 0.01);
  CHECK(std::abs(fine.worst_case_level(0.25) - 0.19055907379956358) <= 1e-9);
  CHECK(std::abs(fine.worst_case_level(0.5) - 0.42940742972650575) <= 1e-9);
  CHECK(std::abs(fine.worst_case_level(0.75) - 0.6872169945687063) <= 1e-9);
  CHECK(std::abs(fine.required_level(0.25) - 0.314289985394418) <= 1e-9);
  CHECK(std::abs(fine.required_level(0.9) - 0.9370893701527417) <= 1e-9);

  const LevelDistortion coarse(DivergenceFamily::kullback_leibler(), 0.05);
  CHECK(std::abs(coarse.required_level(0.5) - 0.6542421650879229) <= 1e-9);
  // required_level(0) solves -log(1 - beta) = rho in closed form.
  CHECK(std::abs(coarse.required_level(0.0) - (1.0 - std::exp(-0.05))) <= 1e-9);
  // kl pins all mass inside the support: the endpoints stay fixed.
  CHECK(coarse.worst_case_level(1.0) == doctest::Approx(1.0));
  CHECK(coarse.worst_case_level(0.0) == doctest::Approx(0.0));
}

TEST_CASE("curve laws on a grid") {
  const std::vector<double> rhos = {0.01, 0.1, 0.5};
  for (const auto& family :
       {DivergenceFamily::chi_square(), DivergenceFamily::total_variation(),
        DivergenceFamily::kullback_leibler()}) {
    for (const double rho : rhos) {
      const LevelDistortion curve(family, rho);
      double previous_g = -1.0;
      double previous_inverse = -1.0;
      for (double level = 0.0; level <= 1.0 + 1e-12; level += 0.02) {
        const double beta = std::min(level, 1.0);
        const double g = curve.worst_case_level(beta);
        const double inverse = curve.required_level(beta);
        // Deflation / inflation.
        CHECK(g <= beta + 1e-12);
        CHECK(inverse >= beta - 1e-12);
        CHECK(g >= 0.0);
        CHECK(inverse <= 1.0);
        // Monotone in the level.
        CHECK(g >= previous_g - 1e-12);
        CHECK(inverse >= previous_inverse - 1e-12);
        previous_g = g;
        previous_inverse = inverse;
        // The returned points actually satisfy the divergence budget.
        if (g > 0.0) {
          CHECK(binary_divergence(family, g, beta) <= rho * (1.0 + 1e-9) + 1e-12);
        }
        if (inverse < 1.0) {
          CHECK(binary_divergence(family, beta, inverse) <= rho * (1.0 + 1e-9) + 1e-12);
        }
      }
    }
  }
}

TEST_CASE("wider balls distort more") {
  for (const auto& family :
       {DivergenceFamily::chi_square(), DivergenceFamily::total_variation(),
        DivergenceFamily::kullback_leibler()}) {
    const LevelDistortion narrow(family, 0.01);
    const LevelDistortion wide(family, 0.2);
    for (double level = 0.0; level <= 1.0; level += 0.05) {
      CHECK(narrow.worst_case_level(level) >= wide.worst_case_level(level) - 1e-12);
      CHECK(narrow.required_level(level) <= wide.required_level(level) + 1e-12);
    }
  }
}

TEST_CASE("the two curves form a Galois connection") {
  for (const auto& family :
       {DivergenceFamily::chi_square(), DivergenceFamily::total_variation(),
        DivergenceFamily::kullback_leibler()}) {
    for (const double rho : {0.01, 0.1}) {
      const LevelDistortion curve(family, rho);
      for (double beta = 0.0; beta <= 1.0 + 1e-12; beta += 0.04) {
        const double b = std::min(beta, 1.0);
        for (double tau = 0.0; tau <= 1.0 + 1e-12; tau += 0.04) {
          const double t = std::min(tau, 1.0);
          // g(beta) >= tau  <=>  g_inverse(tau) <= beta, tested with a slack
          // band so boundary ties do not flip the implication.
          if (curve.worst_case_level(b) >= t + 1e-6) {
            CHECK(curve.required_level(t) <= b + 1e-6);
          }
          if (curve.required_level(t) <= b - 1e-6) {
            CHECK(curve.worst_case_level(b) >= t - 1e-6);
          }
        }
      }
      // Round trips bracket the identity.
      for (double tau = 0.0; tau <= 1.0; tau += 0.05) {
        const double back = curve.worst_case_level(curve.required_level(tau));
        if (curve.required_level(tau) < 1.0) {
          CHECK(back >= tau - 1e-9);
        }
      }
    }
  }
}

TEST_CASE("multi-source level reduces through the minimum") {
  const LevelDistortion curve(DivergenceFamily::total_variation(), 0.1);
  const std::vector<double> levels = {0.9, 0.7, 0.85};
  CHECK(curve.worst_case_level(levels) ==
        doctest::Approx(curve.worst_case_level(0.7)).epsilon(1e-12));
  const std::vector<double> single = {0.42};
  CHECK(curve.worst_case_level(single) ==
        doctest::Approx(curve.worst_case_level(0.42)).epsilon(1e-12));
  const std::vector<double> empty;
  CHECK_THROWS_AS(curve.worst_case_level(empty), EmptyInput);
}
