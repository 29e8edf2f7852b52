#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "cstar/itinerary.hpp"
#include "cstar/map.hpp"

namespace cstar {

inline constexpr int kCoarseProbes = 1024;
inline constexpr double kModulusTol = 1e-10;

// Slack used when two log-moduli that agree in exact arithmetic are compared
// after independent rounding.
inline double log_slack(double x, double tol = kModulusTol) {
  return tol + 1e-12 * std::max(1.0, std::abs(x));
}

struct CircleExtremum {
  double log_value = 0.0;
  double theta = 0.0;
  int n_probes = 0;
};

// One row of the modulus table: max and min of log|f| on |z| = e^{log_r}.
struct ModulusSample {
  double log_r = 0.0;
  double log_M = 0.0;
  double theta_max = 0.0;
  double log_m = 0.0;
  double theta_min = 0.0;
  int n_probes = 0;
};

// Coarse scan over kCoarseProbes equispaced angles, then golden-section
// refinement of every local-extremum bracket.
CircleExtremum max_modulus(const CStarMap& map, double log_r, double tol = kModulusTol);
CircleExtremum min_modulus(const CStarMap& map, double log_r, double tol = kModulusTol);
CircleExtremum max_modulus(const CircleView& view, double tol = kModulusTol);
CircleExtremum min_modulus(const CircleView& view, double tol = kModulusTol);
ModulusSample sample_modulus(const CStarMap& map, double log_r, double tol = kModulusTol);

enum class Relaxed { mu, nu };

// log(eps M(r)) for mu, log(m(r)/eps) for nu. Requires 0 < eps < 1.
double relaxed_modulus(const CStarMap& map, double log_r, double eps, Relaxed kind,
                       double tol = kModulusTol);

enum class Truncation { requested_depth, horizon };

std::string to_string(Truncation t);

// lambda_0 = log R_0 and lambda_{n+1} = log M(e^{lambda_n}) or log m(e^{lambda_n})
// according to e_{n+1}.
struct RadiusSequence {
  EssentialItinerary e;
  std::vector<double> log_R;
  int truncated_at = 0;
  Truncation truncation_reason = Truncation::requested_depth;
};

RadiusSequence iterate_radius(const CStarMap& map, const EssentialItinerary& e, double log_R0,
                              int depth, double tol = kModulusTol);

// Iterates of the relaxed maps: lambda -> log eps + log M(lambda) (mu) or
// lambda -> log m(lambda) - log eps (nu). Stops at the horizon.
std::vector<double> iterate_relaxed(const CStarMap& map, double log_r, double eps, Relaxed kind,
                                    int depth, double tol = kModulusTol);

struct Thresholds {
  double log_R_f = 0.0;
  double log_R_plus = 0.0;
  double log_R_minus = 0.0;
  double tested_min = 0.0;  // smallest tested log-radius
  double tested_max = 0.0;  // largest tested log-radius
};

// Geometric grid of log-radii on both sides of the unit circle, clipped to
// the map's horizon.
std::vector<double> default_threshold_grid(const CStarMap& map);

// Grid-certified growth thresholds: log_R_f is the smallest |log r| on the
// grid beyond which log M > 2|log r| and log m < -2|log r| at every tested
// radius; log_R_plus/log_R_minus additionally require a margin of 0.5.
Thresholds find_thresholds(const CStarMap& map, const std::vector<double>& grid,
                           double tol = kModulusTol);

enum class CheckStatus { pass, fail, insufficient_data };

std::string to_string(CheckStatus s);

struct PropertyCheck {
  std::string name;
  CheckStatus status = CheckStatus::insufficient_data;
  double worst_margin = 0.0;  // smallest observed slack; negative on failure
  int samples = 0;
  std::string detail;
};

struct GrowthReport {
  std::vector<PropertyCheck> checks;
  std::optional<double> log_R_f;

  bool passed() const;  // no check failed
  const PropertyCheck* find(const std::string& name) const;
};

// Checks the growth properties of M and m at the given radii (not log-radii):
//   growth_rate  log M/log r increasing (log m/log r decreasing) outward
//   convexity    log M and -log m convex in log r (second differences)
//   power        log M(r^k) >= k log M(r), log m(r^k) <= k log m(r)
//   ratio        log M(kr) - log M(r) increasing, dual for m
//   relaxed_dominance  mu^n(r) >= M^n(eps r), nu^n(r) <= m^n(eps r)
GrowthReport verify_growth_properties(const CStarMap& map, const std::vector<double>& radii,
                                      const std::vector<double>& ks,
                                      const std::vector<double>& eps_grid = {},
                                      double tol = 1e-9);

struct RelaxedIterateStep {
  int n = 0;
  double lhs = 0.0;  // log M^{n-1}(r) (resp. log m^{n-1}(r))
  double rhs = 0.0;  // log eps + log mu^n(r) (resp. log nu^n(r) - log eps)
  bool pass = false;
};

struct RelaxedIterateReport {
  double log_r = 0.0;
  double eps = 0.0;
  bool verdict = true;
  bool truncated = false;
  int checked_depth = 0;
  std::vector<double> iterates_M;   // log M^k(r)
  std::vector<double> iterates_mu;  // log mu^k(r)
  std::vector<double> iterates_m;   // log m^k(1/r)
  std::vector<double> iterates_nu;  // log nu^k(1/r)
  std::vector<RelaxedIterateStep> upper;
  std::vector<RelaxedIterateStep> lower;
};

// For n = 1..depth: M^{n-1}(r) < eps mu^n(r), and at the mirrored radius
// 1/r: m^{n-1} > nu^n / eps. Steps beyond the horizon are dropped and the
// report is marked truncated.
RelaxedIterateReport verify_relaxed_iterates(const CStarMap& map, double eps, double log_r,
                                             int depth, double tol = kModulusTol);

}  // namespace cstar
