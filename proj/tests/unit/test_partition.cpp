#include <doctest.h>

#include <random>

#include "cstar/errors.hpp"
#include "cstar/partition.hpp"
#include "support.hpp"

using namespace cstar;

TEST_CASE("partition of exp(z - 1/z) iterates 2 sinh") {
  const CStarMap f = testing::exp_map();
  const AnnularPartition p = build_partition(f, 1.0, -1.0, 3);
  REQUIRE(p.upper.size() == 4);
  REQUIRE(p.lower.size() == 4);
  double x = 1.0;
  for (int n = 0; n < 4; ++n) {
    CHECK(p.upper[n] == doctest::Approx(x).epsilon(1e-10));
    CHECK(p.lower[n] == doctest::Approx(-x).epsilon(1e-10));
    x = 2 * std::sinh(x);
  }
  CHECK(p.upper_truncation == Truncation::requested_depth);
}

TEST_CASE("partition stops at the first value beyond the horizon") {
  const CStarMap f = testing::exp_map();
  const AnnularPartition p = build_partition(f, 3.0, -3.0, 6);
  REQUIRE(p.upper.size() == 3);
  CHECK(p.upper[1] == doctest::Approx(2 * std::sinh(3.0)));
  CHECK(p.upper[2] > f.horizon());
  CHECK(p.upper_truncation == Truncation::horizon);
  CHECK(p.depth_plus() == 2);
}

TEST_CASE("partition rejects bad radii") {
  const CStarMap f = testing::exp_map();
  CHECK_THROWS_AS(build_partition(f, -1.0, -2.0, 2), InvalidParameter);
  CHECK_THROWS_AS(build_partition(parse_map("n=0; g=0.01z; h=-0.01w"), 1.0, -1.0, 2), NotExpanding);
}

TEST_CASE("annulus_index follows the band conventions") {
  const AnnularPartition p = build_partition(testing::exp_map(), 1.0, -1.0, 3);
  CHECK(annulus_index(p, 0.0).index == 0);
  CHECK(annulus_index(p, 1.0).index == 1);  // upper[0] belongs to A_1
  CHECK(annulus_index(p, -1.0).index == -1);
  CHECK(annulus_index(p, 0.5 * (p.upper[1] + p.upper[2])).index == 2);
  CHECK(annulus_index(p, p.upper[2]).index == 3);
  CHECK(annulus_index(p, p.lower[2]).index == -3);  // lower[n] belongs to A_{-n-1}
  CHECK(annulus_index(p, p.lower[2] + 1e-9).index == -2);
  const AnnulusIndex far = annulus_index(p, p.upper[3] + 1.0);
  CHECK(far.overflow);
  CHECK(far.index == 4);
  CHECK(annulus_index(p, p.lower[3] - 1.0).index == -4);
}

TEST_CASE("annulus_index is monotone in L") {
  const AnnularPartition p = build_partition(arnold(0.0, 2.0), 1.9, -1.9, 2);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(-50, 50);
  for (int k = 0; k < 500; ++k) {
    double a = d(rng), b = d(rng);
    if (a > b) std::swap(a, b);
    CHECK(annulus_index(p, a).index <= annulus_index(p, b).index);
  }
}

TEST_CASE("classify_orbit on the real axis") {
  const CStarMap f = testing::exp_map();
  const OrbitRecord up = classify_orbit(f, LogPoint(1.0, 0.0));
  CHECK(up.verdict == Verdict::escapes_to_infinity);
  CHECK(symbols_to_string(up.essential_symbols).find('0') == std::string::npos);

  // -e maps to a small positive real, whose orbit then tends to 0.
  const OrbitRecord down = classify_orbit(f, LogPoint(1.0, kPi));
  CHECK(down.verdict == Verdict::escapes_to_zero);
  CHECK(down.essential_symbols.front() == Symbol::infinity);
  CHECK(down.essential_symbols.back() == Symbol::zero);

  // The unit circle point 1 is fixed: f(1) = 1.
  const OrbitRecord fixed = classify_orbit(f, LogPoint(0.0, 0.0), {16, 50.0, 3});
  CHECK(fixed.verdict == Verdict::bounded_so_far);
  CHECK(fixed.checked_depth() == 16);
}

TEST_CASE("classify_orbit records annular indices with a partition") {
  const CStarMap f = testing::exp_map();
  const AnnularPartition p = build_partition(f, 1.0, -1.0, 4);
  const OrbitRecord r = classify_orbit(f, LogPoint(1.0, 0.0), {}, &p);
  REQUIRE(r.annular_indices.size() == r.samples.size());
  for (std::size_t k = 0; k < r.samples.size(); ++k) {
    CHECK(r.annular_indices[k] == annulus_index(p, r.samples[k].L).index);
  }
  // On the real axis the orbit is the partition boundary sequence itself.
  CHECK(r.annular_indices[0] == 1);
  CHECK(r.annular_indices[1] == 2);
}

TEST_CASE("forward_orbit stops at the horizon") {
  const auto orbit = forward_orbit(testing::exp_map(), LogPoint(2.0, 0.0), 10);
  CHECK(orbit.size() < 11);
  CHECK(orbit.size() >= 3);
  CHECK(orbit[1].L == doctest::Approx(2 * std::sinh(2.0)));
}

TEST_CASE("fast_escape_test on the real axis") {
  const CStarMap f = testing::exp_map();
  const auto e = EssentialItinerary::constant(Symbol::infinity);
  const FastEscapeResult on = fast_escape_test(f, LogPoint(1.2, 0.0), e, 1.2, 0, 2);
  CHECK(on.holds_on_prefix);
  CHECK(on.checked_depth == 2);
  const FastEscapeResult off = fast_escape_test(f, LogPoint(1.2, 1.0), e, 1.2, 0, 2);
  CHECK_FALSE(off.holds_on_prefix);
}

TEST_CASE("verdict names round-trip") {
  for (Verdict v : {Verdict::escapes_to_infinity, Verdict::escapes_to_zero, Verdict::escapes_mixed,
                    Verdict::bounded_so_far, Verdict::undetermined}) {
    CHECK(verdict_from_string(to_string(v)) == v);
  }
  CHECK_THROWS(verdict_from_string("sideways"));
}
