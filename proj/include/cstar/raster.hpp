#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cstar/map.hpp"
#include "cstar/partition.hpp"

namespace cstar {

inline constexpr long long kDefaultPixelCap = 1LL << 24;

// Log-polar window: rows run from L_max (row 0) down to L_min, columns from
// theta_min to theta_max.
struct RenderWindow {
  double L_min = -6.0;
  double L_max = 6.0;
  double theta_min = -kPi;
  double theta_max = kPi;
  int width = 256;
  int height = 256;
  int budget = 64;
  int palette_id = 0;
};

struct RenderOptions {
  int prefix_length = 6;
  double theta_escape = 50.0;
  int threads = 1;
  long long pixel_cap = kDefaultPixelCap;
};

void validate_window(const RenderWindow& w, long long pixel_cap = kDefaultPixelCap);

// Centre of pixel (row, col), and its inverse.
LogPoint point_of(const RenderWindow& w, int row, int col);
std::pair<int, int> pixel_of(const RenderWindow& w, const LogPoint& p);

struct LegendEntry {
  int class_id = 0;
  Verdict verdict = Verdict::undetermined;
  std::string prefix;
  std::uint8_t r = 0, g = 0, b = 0;
};

struct ClassGrid {
  int width = 0;
  int height = 0;
  std::vector<int> ids;  // row-major, row 0 at L_max
  std::map<int, LegendEntry> legend;

  int at(int row, int col) const { return ids[static_cast<std::size_t>(row) * width + col]; }
};

// Class id = verdict * 3^p + base-3 digits of the essential prefix of length p
// ('0' -> 0, 'i' -> 1, '-' -> 2). Orbits shorter than p are padded with the
// escape symbol for one-sided escapes and '-' otherwise.
int class_id(Verdict v, const std::string& prefix);
std::string class_prefix(const OrbitRecord& rec, int p);
std::array<std::uint8_t, 3> class_color(Verdict v, const std::string& prefix, int palette_id);

// Classifies every pixel centre with classify_orbit. Rows are distributed over
// options.threads workers; the output does not depend on the thread count.
ClassGrid render_classification(const CStarMap& map, const RenderWindow& window, const RenderOptions& options = {});

std::string encode_ppm(const ClassGrid& grid);
std::string legend_csv(const ClassGrid& grid);

struct Component {
  long long pixels = 0;
  int first_row = 0;
  int first_col = 0;
  bool touches_L_min = false;  // bottom row
  bool touches_L_max = false;  // top row
};

struct ComponentReport {
  std::vector<Component> components;  // ordered by first pixel, row-major
  int touching_L_max() const;
  int touching_L_min() const;
  int touching_both() const;
};

// 4-connected components of the pixels whose class passes the filter.
ComponentReport component_probe(const ClassGrid& grid, const std::function<bool(const LegendEntry&)>& filter);

// Modulus table with relaxed columns: log_r, log_M, theta_max, log_m,
// theta_min, n_probes, log_mu, log_nu, beyond_horizon. Rows beyond the
// horizon keep log_r, set the flag and leave the other fields empty.
std::string export_modulus_csv(const CStarMap& map, const std::vector<double>& log_r, double eps,
                               double tol = kModulusTol);

// 17 significant digits, as used in every CSV field.
std::string format_double(double x);

}  // namespace cstar
