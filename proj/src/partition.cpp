#include "cstar/partition.hpp"

#include <algorithm>
#include <cmath>

#include "cstar/errors.hpp"

namespace cstar {

AnnularPartition build_partition(const CStarMap& map, double log_R_plus, double log_R_minus, int depth,
                                 double tol) {
  if (!(log_R_minus < 0.0 && 0.0 < log_R_plus)) {
    throw InvalidParameter("partition needs log_R_minus < 0 < log_R_plus");
  }
  if (depth < 0) throw InvalidParameter("depth must be non-negative");
  AnnularPartition p;
  p.log_R_plus = log_R_plus;
  p.log_R_minus = log_R_minus;
  const auto up = iterate_radius(map, EssentialItinerary::constant(Symbol::infinity), log_R_plus, depth, tol);
  const auto down = iterate_radius(map, EssentialItinerary::constant(Symbol::zero), log_R_minus, depth, tol);
  p.upper = up.log_R;
  p.lower = down.log_R;
  p.upper_truncation = up.truncation_reason;
  p.lower_truncation = down.truncation_reason;
  for (std::size_t n = 1; n < p.upper.size(); ++n) {
    if (!(p.upper[n] > p.upper[n - 1])) {
      throw NotExpanding("M does not expand at level " + std::to_string(n - 1) + "; raise log_R_plus");
    }
  }
  for (std::size_t n = 1; n < p.lower.size(); ++n) {
    if (!(p.lower[n] < p.lower[n - 1])) {
      throw NotExpanding("m does not contract at level " + std::to_string(n - 1) + "; lower log_R_minus");
    }
  }
  return p;
}

AnnulusIndex annulus_index(const AnnularPartition& p, double L) {
  if (L >= p.upper.front()) {
    // first n with L < upper[n]
    const auto it = std::upper_bound(p.upper.begin(), p.upper.end(), L);
    if (it == p.upper.end()) return {p.depth_plus() + 1, true};
    return {static_cast<int>(it - p.upper.begin()), false};
  }
  if (L > p.lower.front()) return {0, false};
  // lower is strictly decreasing; first n with L > lower[n]
  for (std::size_t n = 1; n < p.lower.size(); ++n) {
    if (L > p.lower[n]) return {-static_cast<int>(n), false};
  }
  return {-(p.depth_minus() + 1), true};
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::escapes_to_infinity:
      return "escapes_to_infinity";
    case Verdict::escapes_to_zero:
      return "escapes_to_zero";
    case Verdict::escapes_mixed:
      return "escapes_mixed";
    case Verdict::bounded_so_far:
      return "bounded_so_far";
    default:
      return "undetermined";
  }
}

Verdict verdict_from_string(const std::string& s) {
  for (Verdict v : {Verdict::escapes_to_infinity, Verdict::escapes_to_zero, Verdict::escapes_mixed,
                    Verdict::bounded_so_far, Verdict::undetermined}) {
    if (to_string(v) == s) return v;
  }
  throw InvalidParameter("unknown verdict '" + s + "'");
}

std::vector<LogPoint> forward_orbit(const CStarMap& map, const LogPoint& z0, int count) {
  std::vector<LogPoint> orbit{z0};
  for (int k = 0; k < count; ++k) {
    try {
      orbit.push_back(eval(map, orbit.back()));
    } catch (const HorizonExceeded&) {
      break;
    }
  }
  return orbit;
}

OrbitRecord classify_orbit(const CStarMap& map, const LogPoint& z0, const ClassifyOptions& options,
                           const AnnularPartition* partition) {
  if (options.budget < 1) throw InvalidParameter("budget must be at least 1");
  if (!(options.theta_escape > 0.0)) throw InvalidParameter("theta_escape must be positive");
  const int run = std::max(options.trailing_run, 1);

  OrbitRecord rec;
  rec.start = z0;
  rec.samples.push_back(z0);
  bool exited = false, failed = false;
  int deep_run = std::abs(z0.L) > options.theta_escape ? 1 : 0;
  for (int k = 0; k < options.budget; ++k) {
    if (deep_run >= run) {
      exited = true;
      break;
    }
    try {
      rec.samples.push_back(eval(map, rec.samples.back()));
    } catch (const HorizonExceeded&) {
      rec.horizon_hit = true;
      exited = true;
      break;
    } catch (const NonFinite&) {
      failed = true;
      break;
    }
    deep_run = std::abs(rec.samples.back().L) > options.theta_escape ? deep_run + 1 : 0;
  }
  if (!exited && deep_run >= run) exited = true;

  for (const LogPoint& s : rec.samples) rec.essential_symbols.push_back(symbol_of(s.L));
  if (partition) {
    for (const LogPoint& s : rec.samples) rec.annular_indices.push_back(annulus_index(*partition, s.L).index);
  }

  if (failed) {
    rec.verdict = Verdict::undetermined;
  } else if (exited) {
    const std::size_t n = rec.samples.size();
    const std::size_t from = n > static_cast<std::size_t>(run) ? n - run : 0;
    bool any_inf = false, any_zero = false;
    for (std::size_t i = from; i < n; ++i) {
      (rec.essential_symbols[i] == Symbol::infinity ? any_inf : any_zero) = true;
    }
    if (any_inf && any_zero) {
      rec.verdict = Verdict::escapes_mixed;
    } else {
      rec.verdict = any_inf ? Verdict::escapes_to_infinity : Verdict::escapes_to_zero;
    }
  } else if (std::abs(rec.samples.back().L) <= options.theta_escape) {
    rec.verdict = Verdict::bounded_so_far;
  } else {
    rec.verdict = Verdict::undetermined;
  }
  return rec;
}

FastEscapeResult fast_escape_test(const CStarMap& map, const LogPoint& z0, const EssentialItinerary& e,
                                  double log_R0, int ell, int depth, double tol) {
  if (depth < 1) throw InvalidParameter("depth must be at least 1");
  if (ell < 0) throw InvalidParameter("ell must be non-negative");
  const RadiusSequence radii = iterate_radius(map, e, log_R0, depth, tol);
  const std::vector<LogPoint> orbit = forward_orbit(map, z0, depth + ell);

  FastEscapeResult result;
  for (int n = 0; n <= depth; ++n) {
    const std::size_t oi = static_cast<std::size_t>(n + ell);
    if (oi >= orbit.size() || static_cast<std::size_t>(n) >= radii.log_R.size()) break;
    FastEscapeStep step{n, orbit[oi].L, radii.log_R[n], e.at(static_cast<std::size_t>(n)), false};
    const double slack = log_slack(step.log_R, tol);
    step.pass = step.symbol == Symbol::infinity ? step.orbit_L >= step.log_R - slack
                                                : step.orbit_L <= step.log_R + slack;
    result.trace.push_back(step);
    result.checked_depth = n;
    if (!step.pass) {
      result.holds_on_prefix = false;
      break;
    }
  }
  return result;
}

}  // namespace cstar
