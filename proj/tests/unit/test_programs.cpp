#include <doctest.h>

#include "cstar/errors.hpp"
#include "cstar/programs.hpp"
#include "support.hpp"

using namespace cstar;

namespace {

struct Setup {
  CStarMap f = testing::exp_map();
  AnnularPartition p;
  CoveringAnnuli a;
  CoverageTable t;
  Setup(double log_R, double delta, int depth) {
    p = build_partition(f, log_R, -log_R, depth);
    a = build_covering_annuli(f, p, choose_eps(delta), depth);
    t = coverage_table(f, a, delta);
  }
};

}  // namespace

TEST_CASE("program generators") {
  CHECK(fast_program(2, 4).prefix == std::vector<int>{2, 3, 4, 5});
  const AnnularItinerary per = periodic_program({2, 3});
  CHECK(per.take(5) == std::vector<int>{2, 3, 2, 3, 2});
  CHECK(per.at(1001) == 3);
  CHECK(bounded_program(1, 6).prefix == std::vector<int>{1, 2, 1, 2, 1, 2});
  CHECK(bounded_program(1, 5, "001").prefix == std::vector<int>{1, 1, 2, 1, 1});
  CHECK(unbounded_program(1, 9).prefix == std::vector<int>{1, 2, 1, 2, 3, 1, 2, 3, 4});
  CHECK(unbounded_program(-1, 5).prefix == std::vector<int>{-1, -2, -1, -2, -3});
  CHECK(custom_program({1, 2, 3}).to_string() == "1,2,3");
  CHECK_THROWS_AS(bounded_program(1, 4, "012"), InvalidParameter);
  CHECK_THROWS_AS(fast_program(1, 3).at(3), InvalidParameter);
}

TEST_CASE("parse_program") {
  CHECK(parse_program("1,2,3").kind == ProgramKind::custom);
  const ProgramSpec b = parse_program("bounded:1,12,011");
  CHECK(b.kind == ProgramKind::bounded);
  CHECK(b.numbers == std::vector<long long>{1, 12});
  CHECK(b.bits == "011");
  CHECK(parse_program("periodic:2,3").numbers == std::vector<long long>{2, 3});
  CHECK(parse_program("essential:(i0)").essential == "(i0)");
  CHECK_THROWS(parse_program("sideways:1"));
  CHECK_THROWS(parse_program("1,,2"));
}

TEST_CASE("validate_program against certified coverings") {
  Setup s(1.4, kDefaultDelta, 3);
  CHECK_NOTHROW(validate_program(custom_program({1, 2, 3}), s.t));
  CHECK_NOTHROW(validate_program(custom_program({-1, -2, -3}), s.t));
  CHECK_NOTHROW(validate_program(periodic_program({1, 2}), s.t));
  CHECK_THROWS_AS(validate_program(custom_program({0, 1}), s.t), Unrealizable);
  // The wrap-around 3 -> 1 of this cycle is checked as well.
  CHECK_THROWS_AS(validate_program(periodic_program({1, 2, 3}), s.t), Unrealizable);
}

TEST_CASE("slow program dwell counts follow floor(X) + 1") {
  Setup s(1.0, 4 * kPi * kPi, 3);
  const AnnularItinerary it = slow_program(s.f, s.a, [](double t) { return t; }, 3, 1000);
  REQUIRE(it.dwell.size() == 3);
  std::uint64_t prev = 0;
  for (const Dwell& d : it.dwell) {
    // Independent threshold: log M at the core is 2 sinh(core).
    const double X = 2 * std::sinh(s.a.find(d.index)->core_log_r);
    if (X < 1e18) {
      REQUIRE(d.leave_at);
      CHECK(*d.leave_at == static_cast<std::uint64_t>(std::floor(X)) + 1);
      REQUIRE(d.count);
      CHECK(*d.count == *d.leave_at - prev);
      CHECK(d.emitted == std::min<std::uint64_t>(*d.count, 1000));
      prev = *d.leave_at;
    } else {
      CHECK_FALSE(d.count);
      CHECK(d.count_approx == doctest::Approx(X).epsilon(1e-9));
    }
  }
  CHECK(it.dwell[0].count == 7u);
  CHECK(it.dwell[1].count == 294u);
  CHECK(it.truncated);
}
