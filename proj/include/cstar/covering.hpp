#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cstar/itinerary.hpp"
#include "cstar/log_point.hpp"
#include "cstar/map.hpp"
#include "cstar/modulus.hpp"
#include "cstar/partition.hpp"

namespace cstar {

inline constexpr double kDefaultDelta = 2.0 * kPi * kPi;
inline constexpr std::uint64_t kDefaultSeed = 0x5eed5eed5eed5eedULL;

// eps = exp(-2 pi^2 / delta): the core circle of A(eps, 1/eps) then has
// hyperbolic length delta / 2.
double choose_eps(double delta);

// Hyperbolic length pi^2 / log(1/eps) of the core circle of A(eps, 1/eps).
double core_circle_length(double eps);

// Closed annulus inner <= log|z| <= outer around a core circle. For n != 0
// inner = core + log eps and outer = core - log eps; B_0 is the closure of
// the central band A_0.
struct CoveringAnnulus {
  int index = 0;
  double core_log_r = 0.0;
  double eps = 0.0;
  double inner_log_r = 0.0;
  double outer_log_r = 0.0;

  bool contains(double L) const { return inner_log_r <= L && L <= outer_log_r; }
  // Signed distance from L to the nearer boundary; positive inside.
  double depth_of(double L) const { return std::min(L - inner_log_r, outer_log_r - L); }
};

struct ChainFailure {
  int level = 0;
  std::string inequality;
};

struct CoveringAnnuli {
  double eps = 0.0;
  std::vector<CoveringAnnulus> annuli;  // sorted by index, failing levels excluded
  std::vector<ChainFailure> failures;
  bool truncated_plus = false;  // ran out of partition levels or hit the horizon
  bool truncated_minus = false;

  const CoveringAnnulus* find(int index) const;
};

// Builds B_0 and B_n for 0 < |n| <= depth with cores mu^n(R+) and nu^n(R-),
// checking at each level n > 0
//   M^{n-1}(R+) < eps mu^n(R+) < mu^n(R+) < mu^n(R+)/eps <= M^n(R+)
// (equality on the right is exact at |n| = 1) and the mirrored chain below.
CoveringAnnuli build_covering_annuli(const CStarMap& map, const AnnularPartition& partition, double eps,
                                     int depth, double tol = kModulusTol);

// Throws ChainViolation for the first failing level, if any.
void require_chain(const CoveringAnnuli& annuli);

struct LengthCheck {
  double value = 0.0;
  double delta = 0.0;
  bool pass = false;
};

struct OracleReport {
  int targets_tested = 0;
  long long min_preimage_count = 0;
  int inconclusive = 0;
  std::vector<long long> counts;  // one per conclusive target
  bool pass() const { return targets_tested > 0 && inconclusive == 0 && min_preimage_count >= 1; }
};

struct CoveringCertificate {
  int from_index = 0;
  int to_index = 0;
  LengthCheck length_check;
  LogPoint z1;  // minimum of |f| on the core circle of B_from
  LogPoint z2;  // maximum of |f| on the core circle of B_from
  double log_f_z1 = 0.0;
  double log_f_z2 = 0.0;
  bool straddle_pass = false;
  bool doubling_pass = false;
  std::optional<OracleReport> oracle;

  bool pass() const { return length_check.pass && straddle_pass && doubling_pass; }
};

// Checks that f(B_from) contains B_to: short core circle, |f| below B_to on
// one side and above it on the other, and |f(z2)| >= 2|f(z1)|. With
// oracle_targets > 0 the preimages of that many targets in B_to are counted
// by the argument principle over the boundary of B_from.
CoveringCertificate certify_covering(const CStarMap& map, const CoveringAnnulus& from, const CoveringAnnulus& to,
                                     double delta, int oracle_targets = 0, std::uint64_t seed = kDefaultSeed,
                                     double tol = kModulusTol);

// Number of turns of f(e^{L+i theta}) - w around 0 as theta runs over one
// turn, for w = exp(log_w + i arg_w). Computed in log space so that it works
// far beyond double range. Throws OracleInconclusive if it cannot settle.
long long circle_winding(const CStarMap& map, double L, double log_w, double arg_w);

// Zeros of f - w in inner < log|z| < outer.
long long count_preimages(const CStarMap& map, double inner_log_r, double outer_log_r, double log_w,
                          double arg_w);

// splitmix64 step: state += 0x9e3779b97f4a7c15, then two xor-shift-multiply
// rounds (0xbf58476d1ce4e5b9, 0x94d049bb133111eb).
std::uint64_t splitmix64(std::uint64_t& state);
double unit_double(std::uint64_t& state);  // uniform in [0, 1), 53 bits

struct CoverageRow {
  int from_index = 0;
  bool length_pass = false;
  std::vector<int> covered;  // certified target indices, ascending
  std::optional<int> k_low;  // extreme covered indices
  std::optional<int> k_high;
};

struct CoverageTable {
  double delta = 0.0;
  std::vector<CoverageRow> rows;                    // sources within the horizon
  std::vector<CoveringCertificate> certificates;    // every tested pair
  bool monotone = true;    // |k_m| >= |k_n| whenever |m| > |n| (same sign, n != 0)
  std::string monotone_detail;

  const CoverageRow* row(int from_index) const;
  bool covers(int from_index, int to_index) const;
};

// Certifies every source annulus that lies inside the horizon against every
// tabulated annulus.
CoverageTable coverage_table(const CStarMap& map, const CoveringAnnuli& annuli, double delta,
                             double tol = kModulusTol);

// Partition radii together with the covering annuli they produce.
struct CoveringSetup {
  double log_R_plus = 0.0;
  double log_R_minus = 0.0;
  AnnularPartition partition;
  CoveringAnnuli annuli;
};

// Builds the partition and covering annuli to the depth that `indices`
// needs. Radii given as nullopt are scanned outward from the start values in
// steps of `step` (at most `max_steps`) until every needed index has an
// annulus with an intact chain. Throws ChainViolation when no tried radius
// works and HorizonExceeded when a needed index lies beyond the horizon.
CoveringSetup select_covering(const CStarMap& map, double eps, const std::vector<int>& indices,
                              std::optional<double> log_R_plus, std::optional<double> log_R_minus,
                              double start_plus, double start_minus, double step = 0.05, int max_steps = 400,
                              double tol = kModulusTol);

// Annuli around the mixed sequence R~_0 = mu(R_0) or nu(R_0) by e_0, then
// R~_n = mu(R~_{n-1}) or nu(R~_{n-1}) by e_n, each of half-width -log eps.
struct MixedStep {
  int n = 0;
  Symbol symbol = Symbol::infinity;
  double log_R = 0.0;  // R_n from iterate_radius
  double bound = 0.0;  // 2 log eps + log M(R~_{n-1}), or log m(R~_{n-1}) - 2 log eps
  bool inequality_pass = false;
  bool contained = false;  // B_n on the correct side of R_n
};

struct MixedAnnuli {
  EssentialItinerary e;
  double eps = 0.0;
  double log_R0 = 0.0;
  std::vector<CoveringAnnulus> annuli;  // annuli[n].index == n
  std::vector<MixedStep> steps;         // n = 1..; stops at the first violation
  std::optional<int> violation;
  bool truncated = false;

  int depth_reached() const { return static_cast<int>(steps.size()) - (violation ? 1 : 0); }
};

// Never throws on inequality failure; the failing index is recorded.
MixedAnnuli build_mixed_annuli(const CStarMap& map, const EssentialItinerary& e, double eps, double log_R0,
                               int depth, double tol = kModulusTol);

// As build_mixed_annuli but throws InequalityViolation on failure.
MixedAnnuli mixed_fast_annuli(const CStarMap& map, const EssentialItinerary& e, double eps, double log_R0,
                              int depth, double tol = kModulusTol);

// Scans |log R_0| outward from `start` in steps of `step` until the mixed
// inequalities hold to the requested depth. Throws ThresholdNotFound.
MixedAnnuli scan_mixed_annuli(const CStarMap& map, const EssentialItinerary& e, double eps, int depth,
                              double start, double step = 0.05, double tol = kModulusTol);

}  // namespace cstar
