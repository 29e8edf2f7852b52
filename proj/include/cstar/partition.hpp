#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cstar/itinerary.hpp"
#include "cstar/log_point.hpp"
#include "cstar/map.hpp"
#include "cstar/modulus.hpp"

namespace cstar {

// Band boundaries of the annular partition, as log-radii:
//   A_n  (n > 0): upper[n-1] <= L <  upper[n]   upper[n] = log M^n(R+)
//   A_0        : lower[0]   <  L <  upper[0]
//   A_n  (n < 0): lower[-n]  <  L <= lower[-n-1] lower[n] = log m^n(R-)
struct AnnularPartition {
  double log_R_plus = 0.0;
  double log_R_minus = 0.0;
  std::vector<double> upper;
  std::vector<double> lower;
  Truncation upper_truncation = Truncation::requested_depth;
  Truncation lower_truncation = Truncation::requested_depth;

  int depth_plus() const { return static_cast<int>(upper.size()) - 1; }
  int depth_minus() const { return static_cast<int>(lower.size()) - 1; }
};

AnnularPartition build_partition(const CStarMap& map, double log_R_plus, double log_R_minus,
                                 int depth, double tol = kModulusTol);

struct AnnulusIndex {
  int index = 0;
  bool overflow = false;  // beyond the tabulated depth; index saturated at +-(depth+1)
};

AnnulusIndex annulus_index(const AnnularPartition& partition, double L);

enum class Verdict { escapes_to_infinity, escapes_to_zero, escapes_mixed, bounded_so_far, undetermined };

std::string to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

struct OrbitRecord {
  LogPoint start;
  std::vector<LogPoint> samples;  // samples[0] == start
  std::vector<Symbol> essential_symbols;
  std::vector<int> annular_indices;  // empty unless a partition was supplied
  Verdict verdict = Verdict::undetermined;
  bool horizon_hit = false;

  int checked_depth() const { return static_cast<int>(samples.size()) - 1; }
};

struct ClassifyOptions {
  int budget = 64;
  double theta_escape = 50.0;  // |L| above this counts as deep escape
  int trailing_run = 3;
};

// Finite-horizon classification of the orbit of z0. Iteration stops at the
// budget, at the horizon, or after trailing_run consecutive deep-escape
// samples; the verdict is read off the last trailing_run samples.
OrbitRecord classify_orbit(const CStarMap& map, const LogPoint& z0, const ClassifyOptions& options = {},
                           const AnnularPartition* partition = nullptr);

// Iterates z0 until `count` images are computed or the horizon stops it.
std::vector<LogPoint> forward_orbit(const CStarMap& map, const LogPoint& z0, int count);

struct FastEscapeStep {
  int n = 0;
  double orbit_L = 0.0;
  double log_R = 0.0;
  Symbol symbol = Symbol::infinity;
  bool pass = false;
};

struct FastEscapeResult {
  bool holds_on_prefix = true;
  int checked_depth = -1;
  std::vector<FastEscapeStep> trace;
};

// |f^{n+ell}(z)| >= R_n where e_n = inf and <= R_n where e_n = 0, for n up
// to depth or the first horizon. Comparisons are non-strict up to log_slack.
FastEscapeResult fast_escape_test(const CStarMap& map, const LogPoint& z0, const EssentialItinerary& e,
                                  double log_R0, int ell, int depth, double tol = kModulusTol);

}  // namespace cstar
