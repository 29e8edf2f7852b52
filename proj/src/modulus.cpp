#include "cstar/modulus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "cstar/errors.hpp"

namespace cstar {

namespace {

constexpr double kInvPhi = 0.6180339887498948482;  // 1/golden ratio

struct Best {
  double value = -std::numeric_limits<double>::infinity();
  double theta = 0.0;
  void offer(double v, double th) {
    if (v > value) {
      value = v;
      theta = th;
    }
  }
};

// Maximizes sign * log|f| over the circle.
CircleExtremum search(const CircleView& view, double sign, double tol) {
  if (!(tol > 0.0)) throw InvalidParameter("modulus tolerance must be positive");
  int probes = 0;
  auto value = [&](double th) {
    ++probes;
    return sign * view.log_modulus(th);
  };

  const int K = kCoarseProbes;
  const double step = kTwoPi / K;
  std::vector<double> coarse(K);
  Best best;
  for (int k = 0; k < K; ++k) {
    const double th = -kPi + step * k;
    coarse[k] = value(th);
    best.offer(coarse[k], th);
  }

  // Strict local maxima of the coarse scan (plateaus are skipped).
  std::vector<int> brackets;
  for (int k = 0; k < K; ++k) {
    const double left = coarse[(k + K - 1) % K];
    const double right = coarse[(k + 1) % K];
    if (coarse[k] >= left && coarse[k] >= right && (coarse[k] > left || coarse[k] > right)) {
      brackets.push_back(k);
    }
  }
  // A real trigonometric polynomial of degree d has at most 2d local maxima;
  // anything beyond a generous cap is rounding noise on a flat circle.
  const std::size_t cap = 64;
  if (brackets.size() > cap) {
    std::stable_sort(brackets.begin(), brackets.end(),
                     [&](int a, int b) { return coarse[a] > coarse[b]; });
    brackets.resize(cap);
    std::sort(brackets.begin(), brackets.end());
  }

  const double curvature = view.curvature_bound();
  const double width_stop =
      curvature > 0.0 ? std::max(std::sqrt(2.0 * tol / curvature), 1e-13) : 1e-13;
  for (int k : brackets) {
    double a = -kPi + step * (k - 1);
    double b = -kPi + step * (k + 1);
    double c = b - (b - a) * kInvPhi;
    double d = a + (b - a) * kInvPhi;
    double fc = value(c);
    double fd = value(d);
    best.offer(fc, c);
    best.offer(fd, d);
    for (int it = 0; it < 100 && (b - a) > width_stop; ++it) {
      if (fc > fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - (b - a) * kInvPhi;
        fc = value(c);
        best.offer(fc, c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + (b - a) * kInvPhi;
        fd = value(d);
        best.offer(fd, d);
      }
    }
  }
  return CircleExtremum{sign * best.value, normalize_angle(best.theta), probes};
}

void check_eps(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidParameter("eps must lie in (0, 1)");
}

}  // namespace

CircleExtremum max_modulus(const CircleView& view, double tol) { return search(view, 1.0, tol); }
CircleExtremum min_modulus(const CircleView& view, double tol) { return search(view, -1.0, tol); }

CircleExtremum max_modulus(const CStarMap& map, double log_r, double tol) {
  return max_modulus(CircleView(map, log_r), tol);
}

CircleExtremum min_modulus(const CStarMap& map, double log_r, double tol) {
  return min_modulus(CircleView(map, log_r), tol);
}

ModulusSample sample_modulus(const CStarMap& map, double log_r, double tol) {
  const CircleView view(map, log_r);
  const CircleExtremum hi = max_modulus(view, tol);
  const CircleExtremum lo = min_modulus(view, tol);
  return ModulusSample{log_r, hi.log_value, hi.theta, lo.log_value, lo.theta,
                       hi.n_probes + lo.n_probes};
}

double relaxed_modulus(const CStarMap& map, double log_r, double eps, Relaxed kind, double tol) {
  check_eps(eps);
  if (kind == Relaxed::mu) return std::log(eps) + max_modulus(map, log_r, tol).log_value;
  return min_modulus(map, log_r, tol).log_value - std::log(eps);
}

std::string to_string(Truncation t) {
  return t == Truncation::horizon ? "horizon" : "requested_depth";
}

RadiusSequence iterate_radius(const CStarMap& map, const EssentialItinerary& e, double log_R0,
                              int depth, double tol) {
  if (depth < 0) throw InvalidParameter("depth must be non-negative");
  RadiusSequence seq{e, {log_R0}, 0, Truncation::requested_depth};
  for (int n = 0; n < depth; ++n) {
    const double lambda = seq.log_R.back();
    if (std::abs(lambda) > map.horizon()) {
      seq.truncation_reason = Truncation::horizon;
      break;
    }
    try {
      const bool up = e.at(static_cast<std::size_t>(n) + 1) == Symbol::infinity;
      seq.log_R.push_back(up ? max_modulus(map, lambda, tol).log_value
                             : min_modulus(map, lambda, tol).log_value);
    } catch (const HorizonExceeded&) {
      seq.truncation_reason = Truncation::horizon;
      break;
    }
  }
  seq.truncated_at = static_cast<int>(seq.log_R.size()) - 1;
  return seq;
}

std::vector<double> iterate_relaxed(const CStarMap& map, double log_r, double eps, Relaxed kind,
                                    int depth, double tol) {
  check_eps(eps);
  std::vector<double> out{log_r};
  for (int k = 0; k < depth; ++k) {
    if (std::abs(out.back()) > map.horizon()) break;
    try {
      out.push_back(relaxed_modulus(map, out.back(), eps, kind, tol));
    } catch (const HorizonExceeded&) {
      break;
    }
  }
  return out;
}

std::vector<double> default_threshold_grid(const CStarMap& map) {
  std::vector<double> pos;
  const double limit = std::min(64.0, map.horizon());
  for (double t = 0.05; t <= limit; t *= 1.05) pos.push_back(t);
  std::vector<double> grid;
  for (auto it = pos.rbegin(); it != pos.rend(); ++it) grid.push_back(-*it);
  grid.insert(grid.end(), pos.begin(), pos.end());
  return grid;
}

Thresholds find_thresholds(const CStarMap& map, const std::vector<double>& grid, double tol) {
  std::map<double, double> margin;  // log_r -> min(log M, -log m) - 2|log r|
  for (double t : grid) {
    if (t == 0.0 || std::abs(t) > map.horizon()) continue;
    const ModulusSample s = sample_modulus(map, t, tol);
    margin[t] = std::min(s.log_M, -s.log_m) - 2.0 * std::abs(t);
  }
  bool has_pos = false, has_neg = false;
  for (const auto& [t, _] : margin) (t > 0 ? has_pos : has_neg) = true;
  if (margin.size() < 2 || !has_pos || !has_neg) {
    throw ThresholdNotFound("scan needs tested radii on both sides of the unit circle");
  }

  std::vector<double> candidates;
  for (const auto& [t, _] : margin) candidates.push_back(std::abs(t));
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  auto qualifies = [&](double c, double need) {
    bool pos_side = false, neg_side = false;
    for (const auto& [t, m] : margin) {
      if (std::abs(t) < c) continue;
      if (!(m > need)) return false;
      (t > 0 ? pos_side : neg_side) = true;
    }
    return pos_side && neg_side;
  };

  std::optional<double> r_f;
  for (double c : candidates) {
    if (qualifies(c, 0.0)) {
      r_f = c;
      break;
    }
  }
  if (!r_f) throw ThresholdNotFound("growth condition fails at the outermost tested radii");

  std::optional<double> plus, minus;
  for (const auto& [t, m] : margin) {
    if (t <= 0 || t < *r_f) continue;
    bool all = true;
    for (auto it = margin.find(t); it != margin.end(); ++it) all = all && it->second >= 0.5;
    if (all) {
      plus = t;
      break;
    }
  }
  for (auto it = margin.rbegin(); it != margin.rend(); ++it) {
    const double t = it->first;
    if (t >= 0 || t > -*r_f) continue;
    bool all = true;
    for (auto jt = it; jt != margin.rend(); ++jt) all = all && jt->second >= 0.5;
    if (all) {
      minus = t;
      break;
    }
  }
  if (!plus || !minus) throw ThresholdNotFound("no tested radius satisfies the 0.5 margin");

  return Thresholds{*r_f, *plus, *minus, margin.begin()->first, margin.rbegin()->first};
}

std::string to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass:
      return "pass";
    case CheckStatus::fail:
      return "fail";
    default:
      return "insufficient_data";
  }
}

bool GrowthReport::passed() const {
  return std::none_of(checks.begin(), checks.end(),
                      [](const PropertyCheck& c) { return c.status == CheckStatus::fail; });
}

const PropertyCheck* GrowthReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

namespace {

// Accumulates the slack of a family of inequalities "slack >= -tolerance".
class CheckBuilder {
 public:
  CheckBuilder(std::string name, double tolerance) : tolerance_(tolerance) { check_.name = std::move(name); }

  void observe(double slack, const std::string& where) {
    ++check_.samples;
    if (check_.samples == 1 || slack < check_.worst_margin) {
      check_.worst_margin = slack;
      worst_where_ = where;
    }
  }

  PropertyCheck finish() {
    if (check_.samples == 0) {
      check_.status = CheckStatus::insufficient_data;
      check_.detail = "no admissible samples";
    } else {
      check_.status = check_.worst_margin >= -tolerance_ ? CheckStatus::pass : CheckStatus::fail;
      check_.detail = "worst at " + worst_where_;
    }
    return check_;
  }

 private:
  PropertyCheck check_;
  double tolerance_;
  std::string worst_where_;
};

std::string at_log_r(double t) {
  std::ostringstream s;
  s << "log_r=" << t;
  return s.str();
}

}  // namespace

GrowthReport verify_growth_properties(const CStarMap& map, const std::vector<double>& radii,
                                      const std::vector<double>& ks,
                                      const std::vector<double>& eps_grid, double tol) {
  for (double k : ks) {
    if (!(k > 1.0)) throw InvalidParameter("growth checks need k > 1");
  }
  std::vector<double> ts;
  for (double r : radii) {
    if (!(r > 0.0)) throw InvalidParameter("radii must be positive");
    ts.push_back(std::log(r));
  }
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

  std::map<double, ModulusSample> cache;
  auto sample = [&](double t) -> const ModulusSample& {
    auto it = cache.find(t);
    if (it == cache.end()) it = cache.emplace(t, sample_modulus(map, t)).first;
    return it->second;
  };
  for (double t : ts) sample(t);

  GrowthReport report;
  try {
    report.log_R_f = find_thresholds(map, default_threshold_grid(map)).log_R_f;
  } catch (const ThresholdNotFound&) {
  }

  std::vector<double> pos, neg;  // both ordered outward
  for (double t : ts) {
    if (t > 0) pos.push_back(t);
  }
  for (auto it = ts.rbegin(); it != ts.rend(); ++it) {
    if (*it < 0) neg.push_back(*it);
  }

  // growth_rate: log M/log r increases outward at large r and decreases
  // outward (towards 0) at small r; mirrored for m.
  {
    CheckBuilder bm("growth_rate_M", tol), bn("growth_rate_m", tol);
    for (std::size_t i = 0; i + 1 < pos.size(); ++i) {
      const double a = pos[i], b = pos[i + 1];
      bm.observe(sample(b).log_M / b - sample(a).log_M / a, at_log_r(b));
      bn.observe(sample(a).log_m / a - sample(b).log_m / b, at_log_r(b));
    }
    for (std::size_t i = 0; i + 1 < neg.size(); ++i) {
      const double a = neg[i], b = neg[i + 1];
      bm.observe(sample(a).log_M / a - sample(b).log_M / b, at_log_r(b));
      bn.observe(sample(b).log_m / b - sample(a).log_m / a, at_log_r(b));
    }
    report.checks.push_back(bm.finish());
    report.checks.push_back(bn.finish());
  }

  // convexity in log r
  {
    CheckBuilder bm("convexity_M", 1e-6), bn("convexity_m", 1e-6);
    for (std::size_t i = 0; i + 2 < ts.size(); ++i) {
      const double t0 = ts[i], t1 = ts[i + 1], t2 = ts[i + 2];
      auto second = [&](double y0, double y1, double y2) {
        return (y2 - y1) / (t2 - t1) - (y1 - y0) / (t1 - t0);
      };
      bm.observe(second(sample(t0).log_M, sample(t1).log_M, sample(t2).log_M), at_log_r(t1));
      bn.observe(second(-sample(t0).log_m, -sample(t1).log_m, -sample(t2).log_m), at_log_r(t1));
    }
    report.checks.push_back(bm.finish());
    report.checks.push_back(bn.finish());
  }

  // power: M(r^k) >= M(r)^k, m(r^k) <= m(r)^k beyond the growth threshold
  {
    CheckBuilder bm("power_M", tol), bn("power_m", tol);
    for (double t : ts) {
      if (t == 0.0) continue;
      if (report.log_R_f && std::abs(t) < *report.log_R_f) continue;
      for (double k : ks) {
        if (std::abs(k * t) > map.horizon()) continue;
        const ModulusSample& base = sample(t);
        const ModulusSample& pw = sample(k * t);
        std::ostringstream where;
        where << "log_r=" << t << " k=" << k;
        bm.observe(pw.log_M - k * base.log_M, where.str());
        bn.observe(k * base.log_m - pw.log_m, where.str());
      }
    }
    report.checks.push_back(bm.finish());
    report.checks.push_back(bn.finish());
  }

  // ratio: log M(kr) - log M(r) grows outward
  {
    CheckBuilder bm("ratio_M", tol), bn("ratio_m", tol);
    for (double k : ks) {
      const double lk = std::log(k);
      auto diff_M = [&](double t) { return sample(t + lk).log_M - sample(t).log_M; };
      auto diff_m = [&](double t) { return sample(t + lk).log_m - sample(t).log_m; };
      for (std::size_t i = 0; i + 1 < pos.size(); ++i) {
        const double a = pos[i], b = pos[i + 1];
        if (b + lk > map.horizon()) continue;
        bm.observe(diff_M(b) - diff_M(a), at_log_r(b));
        bn.observe(diff_m(a) - diff_m(b), at_log_r(b));
      }
      for (std::size_t i = 0; i + 1 < neg.size(); ++i) {
        const double a = neg[i], b = neg[i + 1];
        if (std::abs(b) > map.horizon()) continue;
        bm.observe(diff_M(a) - diff_M(b), at_log_r(b));
        bn.observe(diff_m(b) - diff_m(a), at_log_r(b));
      }
    }
    report.checks.push_back(bm.finish());
    report.checks.push_back(bn.finish());
  }

  if (!eps_grid.empty()) {
    CheckBuilder b("relaxed_dominance", tol);
    constexpr int kDepth = 3;
    for (double eps : eps_grid) {
      check_eps(eps);
      const double le = std::log(eps);
      for (double t : ts) {
        if (t == 0.0) continue;
        if (report.log_R_f && std::abs(t) < *report.log_R_f) continue;
        // eps*r at large radii, r/eps at small radii. The inequality is only
        // claimed once eps*r is past the growth threshold and mu(r) >= r.
        const double shifted = t > 0 ? t + le : t - le;
        if (!report.log_R_f || std::abs(shifted) < *report.log_R_f || shifted * t <= 0.0) continue;
        if (t > 0 ? relaxed_modulus(map, t, eps, Relaxed::mu, tol) < t
                  : relaxed_modulus(map, t, eps, Relaxed::nu, tol) > t) {
          continue;
        }
        const auto mu = iterate_relaxed(map, t, eps, Relaxed::mu, kDepth);
        const auto nu = iterate_relaxed(map, t, eps, Relaxed::nu, kDepth);
        const auto big = iterate_radius(map, EssentialItinerary::constant(Symbol::infinity), shifted, kDepth);
        const auto small = iterate_radius(map, EssentialItinerary::constant(Symbol::zero), shifted, kDepth);
        for (std::size_t n = 1; n < std::min(mu.size(), big.log_R.size()); ++n) {
          b.observe(mu[n] - big.log_R[n], at_log_r(t));
        }
        for (std::size_t n = 1; n < std::min(nu.size(), small.log_R.size()); ++n) {
          b.observe(small.log_R[n] - nu[n], at_log_r(t));
        }
      }
    }
    report.checks.push_back(b.finish());
  }
  return report;
}

RelaxedIterateReport verify_relaxed_iterates(const CStarMap& map, double eps, double log_r,
                                             int depth, double tol) {
  check_eps(eps);
  if (depth < 0) throw InvalidParameter("depth must be non-negative");
  const double le = std::log(eps);
  const double t = std::abs(log_r);

  RelaxedIterateReport rep;
  rep.log_r = log_r;
  rep.eps = eps;
  const auto inf = EssentialItinerary::constant(Symbol::infinity);
  const auto zero = EssentialItinerary::constant(Symbol::zero);
  rep.iterates_M = iterate_radius(map, inf, t, std::max(depth - 1, 0), tol).log_R;
  rep.iterates_mu = iterate_relaxed(map, t, eps, Relaxed::mu, depth, tol);
  rep.iterates_m = iterate_radius(map, zero, -t, std::max(depth - 1, 0), tol).log_R;
  rep.iterates_nu = iterate_relaxed(map, -t, eps, Relaxed::nu, depth, tol);

  int checked_upper = 0, checked_lower = 0;
  for (int n = 1; n <= depth; ++n) {
    const std::size_t i = static_cast<std::size_t>(n);
    if (i - 1 < rep.iterates_M.size() && i < rep.iterates_mu.size()) {
      RelaxedIterateStep s{n, rep.iterates_M[i - 1], le + rep.iterates_mu[i], false};
      s.pass = s.lhs < s.rhs;
      rep.verdict = rep.verdict && s.pass;
      rep.upper.push_back(s);
      checked_upper = n;
    } else {
      rep.truncated = true;
    }
    if (i - 1 < rep.iterates_m.size() && i < rep.iterates_nu.size()) {
      RelaxedIterateStep s{n, rep.iterates_m[i - 1], rep.iterates_nu[i] - le, false};
      s.pass = s.lhs > s.rhs;
      rep.verdict = rep.verdict && s.pass;
      rep.lower.push_back(s);
      checked_lower = n;
    } else {
      rep.truncated = true;
    }
  }
  rep.checked_depth = std::min(checked_upper, checked_lower);
  return rep;
}

}  // namespace cstar
