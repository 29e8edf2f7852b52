#include <doctest.h>

#include <sstream>

#include "cstar/errors.hpp"
#include "cstar/raster.hpp"
#include "support.hpp"

using namespace cstar;

namespace {

ClassGrid synthetic(int w, int h, const std::vector<int>& ids) {
  ClassGrid g;
  g.width = w;
  g.height = h;
  g.ids = ids;
  for (int id : ids) {
    LegendEntry e;
    e.class_id = id;
    e.verdict = id == 1 ? Verdict::escapes_to_infinity : Verdict::bounded_so_far;
    g.legend[id] = e;
  }
  return g;
}

bool is_escape(const LegendEntry& e) { return e.verdict == Verdict::escapes_to_infinity; }

}  // namespace

TEST_CASE("pixel_of inverts point_of on every pixel") {
  RenderWindow w;
  w.L_min = -2.5;
  w.L_max = 7.25;
  w.theta_min = -1.0;
  w.theta_max = 2.9;
  w.width = 97;
  w.height = 61;
  for (int i = 0; i < w.height; ++i) {
    for (int j = 0; j < w.width; ++j) {
      CHECK(pixel_of(w, point_of(w, i, j)) == std::make_pair(i, j));
    }
  }
  const RenderWindow full;
  for (int i = 0; i < full.height; i += 17) {
    for (int j = 0; j < full.width; ++j) CHECK(pixel_of(full, point_of(full, i, j)) == std::make_pair(i, j));
  }
  // Row 0 is at the top of the window.
  CHECK(point_of(full, 0, 0).L > point_of(full, 1, 0).L);
}

TEST_CASE("class ids encode verdict and prefix in base 3") {
  CHECK(class_id(Verdict::escapes_to_infinity, "000000") == 0);
  CHECK(class_id(Verdict::escapes_to_infinity, "0000i0") == 3);
  CHECK(class_id(Verdict::escapes_to_zero, "00") == 9);
  CHECK(class_id(Verdict::escapes_mixed, "i-") == 2 * 9 + 1 * 3 + 2);
  OrbitRecord r;
  r.verdict = Verdict::escapes_to_infinity;
  r.essential_symbols = {Symbol::zero, Symbol::infinity};
  CHECK(class_prefix(r, 4) == "0iii");
  r.verdict = Verdict::undetermined;
  CHECK(class_prefix(r, 4) == "0i--");
  CHECK(class_prefix(r, 1) == "0");
  CHECK(class_color(Verdict::bounded_so_far, "ii", 1)[0] == class_color(Verdict::bounded_so_far, "ii", 1)[2]);
}

TEST_CASE("component probe on synthetic grids") {
  SUBCASE("one class everywhere") {
    const ComponentReport r = component_probe(synthetic(5, 4, std::vector<int>(20, 1)), is_escape);
    REQUIRE(r.components.size() == 1);
    CHECK(r.components[0].pixels == 20);
    CHECK(r.touching_both() == 1);
  }
  SUBCASE("checkerboard") {
    std::vector<int> ids;
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 6; ++j) ids.push_back((i + j) % 2 ? 1 : 2);
    }
    const ComponentReport r = component_probe(synthetic(6, 6, ids), is_escape);
    CHECK(r.components.size() == 18);
    CHECK(r.touching_both() == 0);
    CHECK(r.touching_L_max() == 3);
    CHECK(r.touching_L_min() == 3);
  }
  SUBCASE("two vertical stripes and an island") {
    // 1 1 2 1
    // 1 2 2 1
    // 1 2 1 2
    const ComponentReport r =
        component_probe(synthetic(4, 3, {1, 1, 2, 1, 1, 2, 2, 1, 1, 2, 1, 2}), is_escape);
    REQUIRE(r.components.size() == 3);
    CHECK(r.components[0].pixels == 4);
    CHECK(r.components[0].touches_L_max);
    CHECK(r.components[0].touches_L_min);
    CHECK(r.components[1].pixels == 2);
    CHECK(r.components[1].first_col == 3);
    CHECK_FALSE(r.components[1].touches_L_min);
    CHECK(r.components[2].pixels == 1);
    CHECK(r.components[2].first_row == 2);
  }
}

TEST_CASE("render is independent of the thread count") {
  const CStarMap f = testing::exp_map();
  RenderWindow w;
  w.width = 48;
  w.height = 40;
  RenderOptions one, many;
  many.threads = 7;
  const ClassGrid a = render_classification(f, w, one), b = render_classification(f, w, many);
  CHECK(a.ids == b.ids);
  CHECK(encode_ppm(a) == encode_ppm(b));
  CHECK(legend_csv(a) == legend_csv(b));
}

TEST_CASE("render output formats") {
  const CStarMap f = testing::exp_map();
  RenderWindow w;
  w.width = 8;
  w.height = 4;
  const ClassGrid g = render_classification(f, w);
  const std::string ppm = encode_ppm(g);
  CHECK(ppm.rfind("P6\n8 4\n255\n", 0) == 0);
  CHECK(ppm.size() == std::string("P6\n8 4\n255\n").size() + 8 * 4 * 3);
  // The first pixel's colour is its legend colour.
  const LegendEntry& e = g.legend.at(g.at(0, 0));
  const std::size_t off = std::string("P6\n8 4\n255\n").size();
  CHECK(static_cast<std::uint8_t>(ppm[off]) == e.r);
  CHECK(static_cast<std::uint8_t>(ppm[off + 1]) == e.g);
  CHECK(static_cast<std::uint8_t>(ppm[off + 2]) == e.b);
  const std::string csv = legend_csv(g);
  CHECK(csv.rfind("class_id,verdict,prefix,r,g,b\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(g.legend.size()) + 1);
}

TEST_CASE("render validates the window") {
  const CStarMap f = testing::exp_map();
  RenderWindow w;
  w.L_min = 2;
  w.L_max = 1;
  CHECK_THROWS_AS(render_classification(f, w), InvalidParameter);
  RenderWindow big;
  big.width = 5000;
  big.height = 5000;
  CHECK_THROWS_AS(render_classification(f, big), PixelCapExceeded);
}

TEST_CASE("export_modulus_csv") {
  const CStarMap f = testing::exp_map();
  const std::string header = "log_r,log_M,theta_max,log_m,theta_min,n_probes,log_mu,log_nu,beyond_horizon\n";
  CHECK(export_modulus_csv(f, {}, 0.1) == header);
  const std::string csv = export_modulus_csv(f, {std::log(2.0), 400.0}, 0.1);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  std::vector<std::string> cols;
  std::stringstream ss(line);
  for (std::string c; std::getline(ss, c, ',');) cols.push_back(c);
  REQUIRE(cols.size() == 9);
  CHECK(std::stod(cols[1]) == doctest::Approx(1.5));
  CHECK(std::stod(cols[3]) == doctest::Approx(-1.5));
  CHECK(std::stod(cols[6]) == doctest::Approx(1.5 + std::log(0.1)));
  CHECK(cols[8] == "0");
  std::getline(in, line);
  CHECK(line == "400,,,,,,,,1");
  CHECK(format_double(0.1) == "0.10000000000000001");
}
