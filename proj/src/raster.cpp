#include "cstar/raster.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <thread>

#include "cstar/covering.hpp"
#include "cstar/errors.hpp"

namespace cstar {

namespace {

int verdict_index(Verdict v) { return static_cast<int>(v); }

int pow3(int p) {
  int r = 1;
  for (int k = 0; k < p; ++k) r *= 3;
  return r;
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void validate_window(const RenderWindow& w, long long pixel_cap) {
  if (!(w.L_min < w.L_max) || !std::isfinite(w.L_min) || !std::isfinite(w.L_max)) {
    throw InvalidParameter("window needs L_min < L_max");
  }
  if (!(w.theta_min < w.theta_max) || w.theta_max - w.theta_min > kTwoPi * (1.0 + 1e-12)) {
    throw InvalidParameter("theta window must be nonempty and within one full turn");
  }
  if (w.width < 1 || w.height < 1) throw InvalidParameter("width and height must be positive");
  if (w.budget < 1) throw InvalidParameter("budget must be at least 1");
  if (w.palette_id < 0 || w.palette_id > 1) throw InvalidParameter("palette_id must be 0 or 1");
  if (static_cast<long long>(w.width) * w.height > pixel_cap) {
    throw PixelCapExceeded(std::to_string(w.width) + "x" + std::to_string(w.height) + " exceeds the pixel cap of " +
                           std::to_string(pixel_cap));
  }
}

LogPoint point_of(const RenderWindow& w, int row, int col) {
  const double L = w.L_max - (row + 0.5) * ((w.L_max - w.L_min) / w.height);
  const double theta = w.theta_min + (col + 0.5) * ((w.theta_max - w.theta_min) / w.width);
  return LogPoint(L, theta);
}

std::pair<int, int> pixel_of(const RenderWindow& w, const LogPoint& p) {
  // Undo the normalization of LogPoint into [-pi, pi).
  double theta = p.theta;
  while (theta < w.theta_min) theta += kTwoPi;
  while (theta >= w.theta_min + kTwoPi) theta -= kTwoPi;
  const int row = static_cast<int>(std::floor((w.L_max - p.L) / ((w.L_max - w.L_min) / w.height)));
  const int col = static_cast<int>(std::floor((theta - w.theta_min) / ((w.theta_max - w.theta_min) / w.width)));
  return {row, col};
}

int class_id(Verdict v, const std::string& prefix) {
  int id = 0;
  for (char c : prefix) id = 3 * id + (c == '0' ? 0 : c == 'i' ? 1 : 2);
  return verdict_index(v) * pow3(static_cast<int>(prefix.size())) + id;
}

std::string class_prefix(const OrbitRecord& rec, int p) {
  std::string s;
  for (std::size_t k = 0; k < rec.essential_symbols.size() && static_cast<int>(s.size()) < p; ++k) {
    s += symbol_char(rec.essential_symbols[k]);
  }
  const char pad = rec.verdict == Verdict::escapes_to_infinity ? 'i' : rec.verdict == Verdict::escapes_to_zero ? '0' : '-';
  s.resize(static_cast<std::size_t>(p), pad);
  return s;
}

std::array<std::uint8_t, 3> class_color(Verdict v, const std::string& prefix, int palette_id) {
  static constexpr std::uint8_t base[5][3] = {
      {220, 60, 40},    // escapes_to_infinity
      {40, 90, 220},    // escapes_to_zero
      {60, 180, 80},    // escapes_mixed
      {16, 16, 16},     // bounded_so_far
      {140, 140, 140},  // undetermined
  };
  const auto& c = base[verdict_index(v)];
  if (palette_id == 1) {
    const std::uint8_t grey = static_cast<std::uint8_t>((c[0] * 30 + c[1] * 59 + c[2] * 11) / 100);
    return {grey, grey, grey};
  }
  std::uint64_t st = static_cast<std::uint64_t>(class_id(v, prefix));
  const double shade = 0.65 + 0.35 * unit_double(st);
  return {static_cast<std::uint8_t>(c[0] * shade), static_cast<std::uint8_t>(c[1] * shade),
          static_cast<std::uint8_t>(c[2] * shade)};
}

ClassGrid render_classification(const CStarMap& map, const RenderWindow& window, const RenderOptions& options) {
  validate_window(window, options.pixel_cap);
  if (options.prefix_length < 1 || options.prefix_length > 12) throw InvalidParameter("prefix length must be in 1..12");
  ClassGrid grid;
  grid.width = window.width;
  grid.height = window.height;
  grid.ids.assign(static_cast<std::size_t>(window.width) * window.height, 0);

  ClassifyOptions copt;
  copt.budget = window.budget;
  copt.theta_escape = options.theta_escape;

  // Each worker fills whole rows of its own legend; legends merge afterwards
  // in row order, so the result is independent of scheduling.
  std::vector<std::map<int, LegendEntry>> row_legend(window.height);
  std::atomic<int> next_row{0};
  auto work = [&] {
    for (int row = next_row++; row < window.height; row = next_row++) {
      for (int col = 0; col < window.width; ++col) {
        const OrbitRecord rec = classify_orbit(map, point_of(window, row, col), copt);
        const std::string prefix = class_prefix(rec, options.prefix_length);
        const int id = class_id(rec.verdict, prefix);
        grid.ids[static_cast<std::size_t>(row) * window.width + col] = id;
        if (!row_legend[row].count(id)) {
          const auto rgb = class_color(rec.verdict, prefix, window.palette_id);
          row_legend[row][id] = {id, rec.verdict, prefix, rgb[0], rgb[1], rgb[2]};
        }
      }
    }
  };
  const int threads = std::clamp(options.threads, 1, std::max(1, window.height));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (const auto& rl : row_legend) grid.legend.insert(rl.begin(), rl.end());
  return grid;
}

std::string encode_ppm(const ClassGrid& grid) {
  std::string out = "P6\n" + std::to_string(grid.width) + " " + std::to_string(grid.height) + "\n255\n";
  out.reserve(out.size() + grid.ids.size() * 3);
  for (int id : grid.ids) {
    const LegendEntry& e = grid.legend.at(id);
    out.push_back(static_cast<char>(e.r));
    out.push_back(static_cast<char>(e.g));
    out.push_back(static_cast<char>(e.b));
  }
  return out;
}

std::string legend_csv(const ClassGrid& grid) {
  std::string out = "class_id,verdict,prefix,r,g,b\n";
  for (const auto& [id, e] : grid.legend) {
    out += std::to_string(id) + "," + to_string(e.verdict) + "," + e.prefix + "," + std::to_string(e.r) + "," +
           std::to_string(e.g) + "," + std::to_string(e.b) + "\n";
  }
  return out;
}

int ComponentReport::touching_L_max() const {
  return static_cast<int>(std::count_if(components.begin(), components.end(), [](const Component& c) { return c.touches_L_max; }));
}

int ComponentReport::touching_L_min() const {
  return static_cast<int>(std::count_if(components.begin(), components.end(), [](const Component& c) { return c.touches_L_min; }));
}

int ComponentReport::touching_both() const {
  return static_cast<int>(std::count_if(components.begin(), components.end(),
                                        [](const Component& c) { return c.touches_L_min && c.touches_L_max; }));
}

ComponentReport component_probe(const ClassGrid& grid, const std::function<bool(const LegendEntry&)>& filter) {
  const int W = grid.width, H = grid.height;
  std::vector<char> keep(grid.ids.size());
  for (std::size_t k = 0; k < grid.ids.size(); ++k) keep[k] = filter(grid.legend.at(grid.ids[k])) ? 1 : 0;
  std::vector<int> label(grid.ids.size(), -1);
  ComponentReport report;
  std::vector<int> queue;
  for (int start = 0; start < W * H; ++start) {
    if (!keep[start] || label[start] >= 0) continue;
    const int id = static_cast<int>(report.components.size());
    Component comp;
    comp.first_row = start / W;
    comp.first_col = start % W;
    queue.assign(1, start);
    label[start] = id;
    for (std::size_t q = 0; q < queue.size(); ++q) {
      const int p = queue[q];
      const int r = p / W, c = p % W;
      ++comp.pixels;
      comp.touches_L_max |= r == 0;
      comp.touches_L_min |= r == H - 1;
      const int nbr[4][2] = {{r - 1, c}, {r + 1, c}, {r, c - 1}, {r, c + 1}};
      for (const auto& n : nbr) {
        if (n[0] < 0 || n[0] >= H || n[1] < 0 || n[1] >= W) continue;
        const int k = n[0] * W + n[1];
        if (keep[k] && label[k] < 0) {
          label[k] = id;
          queue.push_back(k);
        }
      }
    }
    report.components.push_back(comp);
  }
  return report;
}

std::string export_modulus_csv(const CStarMap& map, const std::vector<double>& log_r, double eps, double tol) {
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidParameter("eps must lie in (0, 1)");
  std::string out = "log_r,log_M,theta_max,log_m,theta_min,n_probes,log_mu,log_nu,beyond_horizon\n";
  const double le = std::log(eps);
  for (double t : log_r) {
    try {
      const ModulusSample s = sample_modulus(map, t, tol);
      out += format_double(t) + "," + format_double(s.log_M) + "," + format_double(s.theta_max) + "," +
             format_double(s.log_m) + "," + format_double(s.theta_min) + "," + std::to_string(s.n_probes) + "," +
             format_double(le + s.log_M) + "," + format_double(s.log_m - le) + ",0\n";
    } catch (const HorizonExceeded&) {
      out += format_double(t) + ",,,,,,,,1\n";
    }
  }
  return out;
}

}  // namespace cstar
