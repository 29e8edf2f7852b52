#include <doctest.h>

#include "cstar/errors.hpp"
#include "cstar/realize.hpp"
#include "support.hpp"

using namespace cstar;

namespace {

CoveringAnnuli exp_annuli(double log_R, double eps, int depth) {
  const CStarMap f = testing::exp_map();
  return build_covering_annuli(f, build_partition(f, log_R, -log_R, depth), eps, depth);
}

// Log-moduli of the orbit, iterated with log f(z) = z - 1/z directly.
std::vector<double> direct_orbit(LogPoint p, int steps) {
  std::vector<double> out{p.L};
  for (int k = 0; k < steps; ++k) {
    const auto w = testing::exp_map_log_image(p.L, p.theta);
    p = LogPoint(w.real(), w.imag());
    out.push_back(p.L);
  }
  return out;
}

}  // namespace

TEST_CASE("realize [1,2,3] and re-check the orbit independently") {
  const CoveringAnnuli a = exp_annuli(1.4, std::exp(-1.0), 3);
  RealizeOptions o;
  o.margin = 0.05;
  const RealizedOrbit r = realize_orbit(testing::exp_map(), a.annuli, {1, 2, 3}, o);
  CHECK(r.verified_depth == 2);
  CHECK_FALSE(r.truncated);
  CHECK(r.check.pass);
  const auto L = direct_orbit(r.point, 2);
  for (int k = 0; k <= 2; ++k) {
    const CoveringAnnulus* b = a.find(k + 1);
    CHECK(L[k] > b->inner_log_r);
    CHECK(L[k] < b->outer_log_r);
    CHECK(L[k] == doctest::Approx(r.check.orbit[k].L).epsilon(1e-9));
  }
  REQUIRE(r.cell_trace.size() == 2);
  CHECK(r.cell_trace[0].cells_reaching >= r.cell_trace[1].cells_reaching);
}

TEST_CASE("realize the mirrored and a returning itinerary") {
  const CoveringAnnuli a = exp_annuli(1.4, std::exp(-1.0), 3);
  RealizeOptions o;
  o.margin = 0.05;
  CHECK(realize_orbit(testing::exp_map(), a.annuli, {-1, -2, -3}, o).check.pass);
  const RealizedOrbit r = realize_orbit(testing::exp_map(), a.annuli, {1, 2, 1, 2, 1}, o);
  CHECK(r.verified_depth == 4);
  CHECK(r.check.min_depth() > 0);
}

TEST_CASE("verify_orbit flags a point outside the bands") {
  const CoveringAnnuli a = exp_annuli(1.4, std::exp(-1.0), 3);
  const OrbitCheck c = verify_orbit(testing::exp_map(), a.annuli, {1, 2}, LogPoint(a.find(1)->core_log_r, 2.0));
  CHECK_FALSE(c.pass);
  CHECK(c.band_depth[0] > 0);
  CHECK(c.band_depth[1] < 0);
}

TEST_CASE("a single-band itinerary returns the core point") {
  const CoveringAnnuli a = exp_annuli(1.4, std::exp(-1.0), 3);
  const RealizedOrbit r = realize_orbit(testing::exp_map(), a.annuli, {2});
  CHECK(r.point.L == a.find(2)->core_log_r);
  CHECK(r.verified_depth == 0);
  CHECK(r.check.pass);
}

TEST_CASE("bands beyond the horizon truncate the search") {
  const CoveringAnnuli a = exp_annuli(3.0, std::exp(-1.0), 3);
  const RealizedOrbit r = realize_orbit(testing::exp_map(), a.annuli, {1, 2}, {});
  CHECK(r.verified_depth == 1);
  CHECK_FALSE(r.truncated);
}

TEST_CASE("realize_orbit rejects bad input and reports exhaustion") {
  const CoveringAnnuli a = exp_annuli(1.4, std::exp(-1.0), 3);
  CHECK_THROWS_AS(realize_orbit(testing::exp_map(), a.annuli, {}), InvalidParameter);
  CHECK_THROWS_AS(realize_orbit(testing::exp_map(), a.annuli, {1, 7}), InvalidParameter);
  RealizeOptions o;
  o.margin = 2.0;
  CHECK_THROWS_AS(realize_orbit(testing::exp_map(), a.annuli, {1, 2}, o), InvalidParameter);
  RealizeOptions tiny;
  tiny.max_cells = 10;
  tiny.grid = 2;
  CHECK_THROWS_AS(realize_orbit(testing::exp_map(), a.annuli, {1, 2, 3}, tiny), NoCellSurvives);
}

TEST_CASE("construct_orbit certifies every transition first") {
  const CoveringAnnuli a = exp_annuli(1.4, std::exp(-1.0), 3);
  RealizeOptions o;
  o.margin = 0.05;
  const ConstructResult r = construct_orbit(testing::exp_map(), a.annuli, {1, 2, 1, 2}, kDefaultDelta, 2, 7, o);
  CHECK(r.certificates.size() == 2);
  for (const auto& c : r.certificates) CHECK(c.pass());
  CHECK(r.orbit.check.pass);
  CHECK_THROWS_AS(construct_orbit(testing::exp_map(), a.annuli, {0, 1}, kDefaultDelta, 0, 7, o), Unrealizable);
}
