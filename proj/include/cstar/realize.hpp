#pragma once

#include <cstdint>
#include <vector>

#include "cstar/covering.hpp"
#include "cstar/map.hpp"

namespace cstar {

struct RealizeOptions {
  int grid = 16;         // initial cells per side over B_{s_0}
  double margin = 0.1;   // bands are shrunk by this much (log scale) while shooting
  double tol = 1e-13;    // cells are not split below this diameter
  long max_cells = 400000;  // evaluation budget for the search
};

// Cell [L0, L1] x [theta0, theta1] in log-polar coordinates.
struct Cell {
  double L0 = 0.0, L1 = 0.0, theta0 = 0.0, theta1 = 0.0;

  double diameter() const { return std::hypot(L1 - L0, theta1 - theta0); }
  LogPoint center() const { return LogPoint(0.5 * (L0 + L1), 0.5 * (theta0 + theta1)); }
};

// Per-level bookkeeping of the search: how many cells were tested against
// band k and how many were discarded there.
struct RoundTrace {
  int round = 0;
  long cells_reaching = 0;
  long cells_pruned = 0;
};

struct OrbitCheck {
  bool pass = false;
  std::vector<LogPoint> orbit;     // f^k(point), k = 0..depth, computed fresh
  std::vector<double> band_depth;  // distance inside B_{s_k}; negative outside
  double min_depth() const;
};

struct RealizedOrbit {
  LogPoint point;
  int verified_depth = 0;
  bool truncated = false;  // the itinerary reached a band beyond the horizon
  std::vector<int> itinerary;
  OrbitCheck check;
  Cell final_cell;
  long cells_examined = 0;
  std::vector<RoundTrace> cell_trace;
};

// Forward re-verification: every f^k(point), k <= itinerary length - 1, lies
// strictly inside the annulus with index itinerary[k].
OrbitCheck verify_orbit(const CStarMap& map, const std::vector<CoveringAnnulus>& annuli,
                        const std::vector<int>& itinerary, const LogPoint& point);

// Subdivision shooting for a point whose orbit visits B_{s_0}, ..., B_{s_N}.
// Cells over the shrunk B_{s_0} are split depth-first. A cell is discarded at
// band k when the log-moduli of its 3x3 stencil under f^k, widened by a
// derivative bound times the cell size, miss the shrunk band; it is accepted
// when the widened ranges sit inside every band. Sample-based, not interval
// certified. Throws NoCellSurvives.
RealizedOrbit realize_orbit(const CStarMap& map, const std::vector<CoveringAnnulus>& annuli,
                            const std::vector<int>& itinerary, const RealizeOptions& options = {});

struct ConstructResult {
  RealizedOrbit orbit;
  std::vector<CoveringCertificate> certificates;  // consecutive distinct pairs
};

// Certifies every consecutive pair of the itinerary first (Unrealizable when
// one fails), then realizes it.
ConstructResult construct_orbit(const CStarMap& map, const std::vector<CoveringAnnulus>& annuli,
                                const std::vector<int>& itinerary, double delta, int oracle_targets,
                                std::uint64_t seed, const RealizeOptions& options = {});

}  // namespace cstar
