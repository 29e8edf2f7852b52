#include "cstar/realize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cstar/errors.hpp"
#include "cstar/partition.hpp"

namespace cstar {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// log|f^j(z)| for j = 1..k; an orbit that leaves the horizon is continued as
// +-inf so that it fails every later band.
std::vector<double> orbit_moduli(const CStarMap& map, const LogPoint& z, int k) {
  std::vector<double> out;
  LogPoint p = z;
  for (int j = 1; j <= k; ++j) {
    double L;
    try {
      p = eval(map, p);
      L = p.L;
    } catch (const HorizonExceeded&) {
      L = std::signbit(p.L) ? -kInf : kInf;
    } catch (const NonFinite&) {
      L = kInf;
    }
    out.push_back(L);
    if (std::isinf(L)) {
      out.resize(k, L);
      break;
    }
  }
  return out;
}

struct Band {
  double lo, hi, mid, half;
};

// Largest |z f'/f| over inner <= log|z| <= outer; the bound is convex in L.
double derivative_bound_over(const CStarMap& map, double lo, double hi) {
  if (!(std::max(std::abs(lo), std::abs(hi)) <= map.horizon())) return kInf;
  return std::max(CircleView(map, lo).derivative_bound(), CircleView(map, hi).derivative_bound());
}

struct Scored {
  Cell cell;
  bool out = false;
  bool inside = false;
  int pruned_at = 0;       // band where the cell was discarded
  int center_levels = 0;   // leading bands reached by the centre's orbit
  double distance = 0.0;   // normalized miss of the centre at the next band
};

Scored classify(const CStarMap& map, const Cell& c, const std::vector<Band>& bands) {
  const int N = static_cast<int>(bands.size()) - 1;
  Scored s{c};
  std::vector<double> lo(N, kInf), hi(N, -kInf);
  const double Ls[3] = {c.L0, 0.5 * (c.L0 + c.L1), c.L1};
  const double Ts[3] = {c.theta0, 0.5 * (c.theta0 + c.theta1), c.theta1};
  std::vector<double> centre;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      const auto m = orbit_moduli(map, LogPoint(Ls[a], Ts[b]), N);
      for (int j = 0; j < N; ++j) {
        lo[j] = std::min(lo[j], m[j]);
        hi[j] = std::max(hi[j], m[j]);
      }
      if (a == 1 && b == 1) centre = m;
    }
  }

  for (int j = 0; j < N; ++j) {
    const Band& band = bands[j + 1];
    if (s.center_levels == j && band.lo <= centre[j] && centre[j] <= band.hi) {
      ++s.center_levels;
    } else if (s.center_levels == j) {
      const double d = std::abs(centre[j] - band.mid) / band.half;
      s.distance = std::isfinite(d) ? d : 1e300;
    }
  }

  // Widen the sampled ranges by (derivative bound) x (cell size).
  const double h = 0.5 * c.diameter();
  double lip = 1.0;
  double prev_lo = c.L0, prev_hi = c.L1;
  s.inside = true;
  for (int j = 0; j < N; ++j) {
    lip *= derivative_bound_over(map, prev_lo, prev_hi);
    const double r = std::isfinite(lip) ? lip * h : kInf;
    const double wlo = lo[j] - r, whi = hi[j] + r;
    const Band& band = bands[j + 1];
    if (hi[j] + r < band.lo || lo[j] - r > band.hi) {
      s.out = true;
      s.inside = false;
      s.pruned_at = j + 1;
      return s;
    }
    if (!(band.lo <= wlo && whi <= band.hi)) s.inside = false;
    prev_lo = std::max(wlo, -map.horizon() - 1.0);
    prev_hi = std::min(whi, map.horizon() + 1.0);
  }
  return s;
}

bool better(const Scored& a, const Scored& b) {
  if (a.center_levels != b.center_levels) return a.center_levels > b.center_levels;
  if (a.distance != b.distance) return a.distance < b.distance;
  if (a.cell.L0 != b.cell.L0) return a.cell.L0 < b.cell.L0;
  return a.cell.theta0 < b.cell.theta0;
}

std::vector<Cell> quadrisect(const Cell& c) {
  const double Lm = 0.5 * (c.L0 + c.L1), tm = 0.5 * (c.theta0 + c.theta1);
  return {{c.L0, Lm, c.theta0, tm}, {c.L0, Lm, tm, c.theta1}, {Lm, c.L1, c.theta0, tm}, {Lm, c.L1, tm, c.theta1}};
}

const CoveringAnnulus& lookup(const std::vector<CoveringAnnulus>& annuli, int index) {
  for (const auto& a : annuli) {
    if (a.index == index) return a;
  }
  throw InvalidParameter("no covering annulus with index " + std::to_string(index));
}

}  // namespace

double OrbitCheck::min_depth() const {
  double m = kInf;
  for (double d : band_depth) m = std::min(m, d);
  return m;
}

OrbitCheck verify_orbit(const CStarMap& map, const std::vector<CoveringAnnulus>& annuli,
                        const std::vector<int>& itinerary, const LogPoint& point) {
  OrbitCheck check;
  if (itinerary.empty()) return check;
  check.orbit = forward_orbit(map, point, static_cast<int>(itinerary.size()) - 1);
  check.pass = check.orbit.size() == itinerary.size();
  for (std::size_t k = 0; k < check.orbit.size(); ++k) {
    const double d = lookup(annuli, itinerary[k]).depth_of(check.orbit[k].L);
    check.band_depth.push_back(d);
    if (!(d > 0.0)) check.pass = false;
  }
  return check;
}

RealizedOrbit realize_orbit(const CStarMap& map, const std::vector<CoveringAnnulus>& annuli,
                            const std::vector<int>& itinerary, const RealizeOptions& options) {
  if (itinerary.empty()) throw InvalidParameter("itinerary must be nonempty");
  if (options.grid < 1 || options.max_cells < 1) throw InvalidParameter("grid and max_cells must be positive");
  if (!(options.margin >= 0.0) || !(options.tol > 0.0)) throw InvalidParameter("margin and tol must be positive");

  RealizedOrbit result;
  // Every band but the last must be a source inside the horizon.
  int N = 0;
  std::vector<Band> bands;
  for (std::size_t k = 0; k < itinerary.size(); ++k) {
    const CoveringAnnulus& a = lookup(annuli, itinerary[k]);
    const Band b{a.inner_log_r + options.margin, a.outer_log_r - options.margin, a.core_log_r,
                 0.5 * (a.outer_log_r - a.inner_log_r) - options.margin};
    if (!(b.lo < b.hi)) throw InvalidParameter("margin leaves B_" + std::to_string(a.index) + " empty");
    bands.push_back(b);
    N = static_cast<int>(k);
    if (k + 1 < itinerary.size() && std::max(std::abs(a.inner_log_r), std::abs(a.outer_log_r)) > map.horizon()) {
      result.truncated = true;
      break;
    }
  }
  result.itinerary.assign(itinerary.begin(), itinerary.begin() + N + 1);

  if (N == 0) {
    result.point = LogPoint(lookup(annuli, itinerary[0]).core_log_r, 0.0);
    result.check = verify_orbit(map, annuli, result.itinerary, result.point);
    return result;
  }

  const double dL = (bands[0].hi - bands[0].lo) / options.grid, dT = kTwoPi / options.grid;
  std::vector<Scored> roots;
  for (int i = 0; i < options.grid; ++i) {
    for (int j = 0; j < options.grid; ++j) {
      const Cell c{bands[0].lo + i * dL, i + 1 == options.grid ? bands[0].hi : bands[0].lo + (i + 1) * dL,
                   -kPi + j * dT, j + 1 == options.grid ? kPi : -kPi + (j + 1) * dT};
      roots.push_back(classify(map, c, bands));
    }
  }
  for (int k = 1; k <= N; ++k) result.cell_trace.push_back({k, 0, 0});
  auto tally = [&](const Scored& s) {
    ++result.cells_examined;
    const int reached = s.out ? s.pruned_at : N;
    for (int k = 1; k <= reached; ++k) ++result.cell_trace[k - 1].cells_reaching;
    if (s.out) ++result.cell_trace[s.pruned_at - 1].cells_pruned;
  };
  for (const Scored& s : roots) tally(s);

  // Depth-first, most promising cell first; the stack holds classified cells.
  std::sort(roots.begin(), roots.end(), better);
  std::vector<Scored> stack;
  for (auto it = roots.rbegin(); it != roots.rend(); ++it) {
    if (!it->out) stack.push_back(*it);
  }
  while (!stack.empty()) {
    const Scored s = stack.back();
    stack.pop_back();
    const bool tiny = s.cell.diameter() <= options.tol;
    if (s.inside || (tiny && s.center_levels == N)) {
      OrbitCheck check = verify_orbit(map, annuli, result.itinerary, s.cell.center());
      if (check.pass) {
        result.point = s.cell.center();
        result.check = std::move(check);
        result.verified_depth = N;
        result.final_cell = s.cell;
        return result;
      }
    }
    if (tiny) continue;
    if (result.cells_examined >= options.max_cells) {
      throw NoCellSurvives("search budget of " + std::to_string(options.max_cells) + " cells exhausted");
    }
    std::vector<Scored> kids;
    for (const Cell& c : quadrisect(s.cell)) {
      kids.push_back(classify(map, c, bands));
      tally(kids.back());
    }
    std::sort(kids.begin(), kids.end(), better);
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) {
      if (!it->out) stack.push_back(*it);
    }
  }
  int worst = 1;
  for (const auto& t : result.cell_trace) {
    if (t.cells_pruned > result.cell_trace[worst - 1].cells_pruned) worst = t.round;
  }
  throw NoCellSurvives("no cell reaches B_" + std::to_string(result.itinerary[worst]) + " (band " +
                       std::to_string(worst) + ")");
}

ConstructResult construct_orbit(const CStarMap& map, const std::vector<CoveringAnnulus>& annuli,
                                const std::vector<int>& itinerary, double delta, int oracle_targets,
                                std::uint64_t seed, const RealizeOptions& options) {
  ConstructResult out;
  for (std::size_t k = 0; k + 1 < itinerary.size(); ++k) {
    const bool seen = std::any_of(out.certificates.begin(), out.certificates.end(), [&](const auto& c) {
      return c.from_index == itinerary[k] && c.to_index == itinerary[k + 1];
    });
    if (seen) continue;
    const CoveringAnnulus& from = lookup(annuli, itinerary[k]);
    const CoveringAnnulus& to = lookup(annuli, itinerary[k + 1]);
    if (std::abs(from.core_log_r) > map.horizon()) break;
    CoveringCertificate c = certify_covering(map, from, to, delta, oracle_targets, seed);
    const bool ok = c.pass();
    out.certificates.push_back(std::move(c));
    if (!ok) {
      throw Unrealizable("covering B_" + std::to_string(from.index) + " -> B_" + std::to_string(to.index) +
                         " is not certified");
    }
  }
  out.orbit = realize_orbit(map, annuli, itinerary, options);
  return out;
}

}  // namespace cstar
