#include <doctest.h>

#include <random>

#include "cstar/errors.hpp"
#include "cstar/modulus.hpp"
#include "support.hpp"

using namespace cstar;

TEST_CASE("max and min modulus of exp(z - 1/z) match 2 sinh") {
  const CStarMap f = testing::exp_map();
  for (double r : {0.3, 1.1, 2.0, 4.0, 8.0, 16.0}) {
    const ModulusSample s = sample_modulus(f, std::log(r));
    CHECK(s.log_M == doctest::Approx(std::abs(r - 1 / r)).epsilon(1e-12));
    CHECK(s.log_m == doctest::Approx(-std::abs(r - 1 / r)).epsilon(1e-12));
  }
  const ModulusSample two = sample_modulus(f, std::log(2.0));
  CHECK(two.log_M == doctest::Approx(1.5));
  CHECK(std::abs(two.theta_max) < 1e-6);
  CHECK(std::abs(std::abs(two.theta_min) - kPi) < 1e-6);
}

TEST_CASE("arnold maximum modulus matches the closed form") {
  for (double beta : {0.5, 2.0}) {
    const CStarMap f = arnold(0.0, beta);
    for (double r : {2.0, 4.0, 8.0}) {
      const double expect = std::log(r) + beta * (r - 1 / r) / 2;
      CHECK(std::abs(max_modulus(f, std::log(r)).log_value - expect) <= 1e-9);
    }
  }
}

TEST_CASE("extrema bound every sampled value") {
  const CStarMap f = parse_map("n=1; g=(0.4,0.3)z^2 + 1z; h=(0,0.8)w^3; rot=0.2");
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> t(-kPi, kPi);
  for (double L : {-1.0, -0.2, 0.4, 1.3}) {
    const CircleView v(f, L);
    const CircleExtremum hi = max_modulus(v), lo = min_modulus(v);
    CHECK(hi.n_probes >= kCoarseProbes);
    CHECK(v.log_modulus(hi.theta) == doctest::Approx(hi.log_value).epsilon(1e-14));
    for (int k = 0; k < 2000; ++k) {
      const double x = v.log_modulus(t(rng));
      CHECK(x <= hi.log_value + 1e-9);
      CHECK(x >= lo.log_value - 1e-9);
    }
  }
}

TEST_CASE("f(1/z) = 1/f(z) swaps maximum and minimum") {
  const CStarMap f = arnold(0.0, 1.0);
  for (double L : {0.5, 1.5}) {
    CHECK(min_modulus(f, -L).log_value == doctest::Approx(-max_modulus(f, L).log_value).epsilon(1e-12));
  }
}

TEST_CASE("relaxed moduli shift by log eps") {
  const CStarMap f = testing::exp_map();
  const double eps = 0.1;
  const double L = std::log(3.0);
  CHECK(relaxed_modulus(f, L, eps, Relaxed::mu) == doctest::Approx(std::log(eps) + 3 - 1.0 / 3));
  CHECK(relaxed_modulus(f, L, eps, Relaxed::nu) == doctest::Approx(-(3 - 1.0 / 3) - std::log(eps)));
  CHECK_THROWS_AS(relaxed_modulus(f, L, 1.5, Relaxed::mu), InvalidParameter);
}

TEST_CASE("iterate_radius follows the essential itinerary") {
  const CStarMap f = testing::exp_map();
  const auto seq = iterate_radius(f, EssentialItinerary::parse("(i0)"), 1.0, 4);
  REQUIRE(seq.log_R.size() >= 3);
  // lambda -> 2 sinh(lambda) on both sides by symmetry: log m(L) = -2 sinh(L).
  CHECK(seq.log_R[1] == doctest::Approx(-2 * std::sinh(1.0)));
  CHECK(seq.log_R[2] == doctest::Approx(2 * std::sinh(-seq.log_R[1]) * 1.0));
  const auto up = iterate_radius(f, EssentialItinerary::constant(Symbol::infinity), 1.0, 5);
  CHECK(up.truncation_reason == Truncation::horizon);
  CHECK(up.log_R.back() > f.horizon());
}

TEST_CASE("thresholds on the exp map") {
  const CStarMap f = testing::exp_map();
  const Thresholds th = find_thresholds(f, default_threshold_grid(f));
  CHECK(th.log_R_plus > 0);
  CHECK(th.log_R_minus == doctest::Approx(-th.log_R_plus));
  CHECK(th.log_R_plus >= th.log_R_f);
  // At the returned radius log M exceeds 2 log r by the margin.
  CHECK(2 * std::sinh(th.log_R_plus) > 2 * th.log_R_plus + 0.5);
}

TEST_CASE("growth properties hold for both test maps") {
  for (const CStarMap& f : {testing::exp_map(), arnold(0.0, 2.0)}) {
    const GrowthReport rep = verify_growth_properties(f, {1.5, 2, 3, 4, 5, 6, 7, 8, 16, 32}, {1.5, 2, 3}, {0.1, 0.5});
    CHECK(rep.passed());
    for (const char* name : {"convexity_M", "convexity_m", "power_M", "power_m", "relaxed_dominance"}) {
      const PropertyCheck* c = rep.find(name);
      REQUIRE(c != nullptr);
      CHECK(c->status == CheckStatus::pass);
    }
    CHECK(rep.find("relaxed_dominance")->samples > 0);
  }
}

TEST_CASE("growth checks report insufficient data for too few radii") {
  const GrowthReport rep = verify_growth_properties(testing::exp_map(), {2.0}, {2.0});
  const PropertyCheck* c = rep.find("convexity_M");
  REQUIRE(c != nullptr);
  CHECK(c->status == CheckStatus::insufficient_data);
}

TEST_CASE("relaxed iterates stay below the scaled mu sequence") {
  const CStarMap f = testing::exp_map();
  const RelaxedIterateReport rep = verify_relaxed_iterates(f, 0.1, 3.0, 6);
  CHECK(rep.verdict);
  CHECK(rep.truncated);
  REQUIRE(rep.iterates_M.size() >= 2);
  for (std::size_t k = 1; k < rep.iterates_M.size(); ++k) {
    const double l = rep.iterates_M[k - 1];
    CHECK(rep.iterates_M[k] == doctest::Approx(2 * std::sinh(l)).epsilon(1e-6));
  }
  const RelaxedIterateReport bad = verify_relaxed_iterates(f, 0.1, 0.1, 2);
  CHECK_FALSE(bad.verdict);
}
