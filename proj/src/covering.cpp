#include "cstar/covering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cstar/errors.hpp"

namespace cstar {

namespace {

void check_eps(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidParameter("eps must lie in (0, 1)");
}

bool le_slack(double a, double b, double tol) { return a <= b + log_slack(b, tol); }

// Winding bookkeeping constants. Beyond |Re Delta| > kFar the term e^Delta
// (or the constant -1) dominates f/w - 1 and steps can be long.
constexpr double kFar = 40.0;
constexpr long long kStepCap = 20'000'000;
constexpr double kWindingCap = 1125899906842624.0;  // 2^50

double wrap(double a) { return std::remainder(a, kTwoPi); }

// arg(e^D - 1) for moderate Re D.
double arg_near(Complex d) {
  const Complex e = std::polar(std::exp(d.real()), std::remainder(d.imag(), kTwoPi));
  return std::arg(e - 1.0);
}

// Correction term in arg(e^D - 1) = Im D + arg(1 - e^{-D}) for Re D >> 0 and
// arg(e^D - 1) = pi + arg(1 - e^D) for Re D << 0.
double far_tail(Complex d) {
  if (d.real() > 0.0) {
    return std::arg(1.0 - std::polar(std::exp(-d.real()), -std::remainder(d.imag(), kTwoPi)));
  }
  return std::arg(1.0 - std::polar(std::exp(d.real()), std::remainder(d.imag(), kTwoPi)));
}

// One pass over the circle; `s` bounds the change of Delta per step in the
// transition zone.
double winding_pass(const CircleView& view, Complex log_w, double s) {
  const double D = std::max(view.derivative_bound(), 1e-300);
  double theta = -kPi;
  Complex d = view.log_image(theta) - log_w;
  double total = 0.0;
  long long steps = 0;
  while (theta < kPi) {
    if (++steps > kStepCap) throw OracleInconclusive("winding step cap reached");
    const double x = std::abs(d.real());
    const bool far = x > kFar;
    double h = far ? (x - 0.5 * kFar) / D : s / D;
    for (int attempt = 0;; ++attempt) {
      h = std::min(h, kPi - theta);
      const double next = theta + h;
      if (!(next > theta)) throw OracleInconclusive("angular resolution exhausted");
      const Complex dn = view.log_image(next) - log_w;
      double inc = 0.0;
      bool ok = true;
      if (far) {
        ok = std::signbit(dn.real()) == std::signbit(d.real()) && std::abs(dn.real()) >= 0.25 * kFar;
        if (ok) {
          inc = far_tail(dn) - far_tail(d);
          if (d.real() > 0.0) inc += dn.imag() - d.imag();
        }
      } else {
        inc = wrap(arg_near(dn) - arg_near(d));
        ok = std::abs(inc) <= kPi / 3.0;
      }
      if (ok) {
        total += inc;
        theta = next;
        d = dn;
        break;
      }
      if (attempt >= 60) throw OracleInconclusive("winding step did not settle");
      h *= 0.5;
    }
  }
  return total / kTwoPi;
}

std::uint64_t pair_seed(std::uint64_t seed, int from, int to) {
  std::uint64_t st = seed ^ (static_cast<std::uint64_t>(static_cast<std::int64_t>(from)) * 0x9e3779b97f4a7c15ULL);
  splitmix64(st);
  st ^= static_cast<std::uint64_t>(static_cast<std::int64_t>(to)) * 0xc2b2ae3d27d4eb4fULL;
  splitmix64(st);
  return st;
}

}  // namespace

double choose_eps(double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw InvalidParameter("delta must be positive");
  return std::exp(-2.0 * kPi * kPi / delta);
}

double core_circle_length(double eps) {
  check_eps(eps);
  return kPi * kPi / -std::log(eps);
}

const CoveringAnnulus* CoveringAnnuli::find(int index) const {
  for (const auto& a : annuli) {
    if (a.index == index) return &a;
  }
  return nullptr;
}

CoveringAnnuli build_covering_annuli(const CStarMap& map, const AnnularPartition& partition, double eps,
                                     int depth, double tol) {
  check_eps(eps);
  if (depth < 0) throw InvalidParameter("depth must be non-negative");
  const double le = std::log(eps);
  CoveringAnnuli out;
  out.eps = eps;

  std::vector<CoveringAnnulus> neg, pos;
  for (int side : {1, -1}) {
    const std::vector<double>& bands = side > 0 ? partition.upper : partition.lower;
    const double start = side > 0 ? partition.log_R_plus : partition.log_R_minus;
    const auto cores = iterate_relaxed(map, start, eps, side > 0 ? Relaxed::mu : Relaxed::nu, depth, tol);
    bool& truncated = side > 0 ? out.truncated_plus : out.truncated_minus;
    for (int n = 1; n <= depth; ++n) {
      if (static_cast<std::size_t>(n) >= cores.size() || static_cast<std::size_t>(n) >= bands.size()) {
        truncated = true;
        break;
      }
      const double core = cores[n];
      CoveringAnnulus a{side * n, core, eps, core + le, core - le};
      // Outward order: near band edge < near side < core < far side < far band edge.
      const double near_edge = bands[n - 1], far_edge = bands[n];
      const double near_side = side > 0 ? a.inner_log_r : a.outer_log_r;
      const double far_side = side > 0 ? a.outer_log_r : a.inner_log_r;
      std::string failed;
      if (!(side * near_edge < side * near_side)) {
        failed = side > 0 ? "M^{n-1}(R+) < eps mu^n(R+)" : "nu^n(R-)/eps < m^{n-1}(R-)";
      } else if (!(side * near_side < side * core && side * core < side * far_side)) {
        failed = "band ordering around the core";
      } else if (n == 1 ? !le_slack(side * far_side, side * far_edge, tol) : !(side * far_side < side * far_edge)) {
        failed = side > 0 ? "mu^n(R+)/eps <= M^n(R+)" : "m^n(R-) <= eps nu^n(R-)";
      }
      if (!failed.empty()) {
        out.failures.push_back({side * n, failed});
        continue;
      }
      (side > 0 ? pos : neg).push_back(a);
    }
  }
  std::reverse(neg.begin(), neg.end());
  out.annuli = std::move(neg);
  const double core0 = 0.5 * (partition.log_R_minus + partition.log_R_plus);
  out.annuli.push_back({0, core0, eps, partition.log_R_minus, partition.log_R_plus});
  out.annuli.insert(out.annuli.end(), pos.begin(), pos.end());
  return out;
}

void require_chain(const CoveringAnnuli& annuli) {
  if (!annuli.failures.empty()) {
    throw ChainViolation(annuli.failures.front().level, annuli.failures.front().inequality);
  }
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double unit_double(std::uint64_t& state) {
  return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

long long circle_winding(const CStarMap& map, double L, double log_w, double arg_w) {
  const CircleView view(map, L);
  const Complex lw(log_w, arg_w);
  double prev = std::numeric_limits<double>::quiet_NaN();
  double s = 0.25;
  for (int round = 0; round < 5; ++round, s *= 0.5) {
    const double w = winding_pass(view, lw, s);
    if (!std::isfinite(w) || std::abs(w) > kWindingCap) throw OracleInconclusive("winding number out of range");
    const double rounded = std::nearbyint(w);
    if (std::abs(w - rounded) <= 0.1) {
      if (rounded == prev) return static_cast<long long>(rounded);
      prev = rounded;
    } else {
      prev = std::numeric_limits<double>::quiet_NaN();
    }
  }
  throw OracleInconclusive("winding number did not stabilize");
}

long long count_preimages(const CStarMap& map, double inner_log_r, double outer_log_r, double log_w,
                          double arg_w) {
  if (!(inner_log_r < outer_log_r)) throw InvalidParameter("annulus needs inner < outer");
  try {
    return circle_winding(map, outer_log_r, log_w, arg_w) - circle_winding(map, inner_log_r, log_w, arg_w);
  } catch (const HorizonExceeded&) {
    throw OracleInconclusive("annulus boundary beyond the horizon");
  }
}

CoveringCertificate certify_covering(const CStarMap& map, const CoveringAnnulus& from, const CoveringAnnulus& to,
                                     double delta, int oracle_targets, std::uint64_t seed, double tol) {
  if (!(delta > 0.0)) throw InvalidParameter("delta must be positive");
  CoveringCertificate c;
  c.from_index = from.index;
  c.to_index = to.index;
  // A(e^inner, e^outer) is conformally A(eps', 1/eps') with log(1/eps') the half-width.
  c.length_check.value = 2.0 * kPi * kPi / (from.outer_log_r - from.inner_log_r);
  c.length_check.delta = delta;
  c.length_check.pass = c.length_check.value < delta;

  const CircleView view(map, from.core_log_r);
  const CircleExtremum lo = min_modulus(view, tol);
  const CircleExtremum hi = max_modulus(view, tol);
  c.z1 = LogPoint(from.core_log_r, lo.theta);
  c.z2 = LogPoint(from.core_log_r, hi.theta);
  c.log_f_z1 = lo.log_value;
  c.log_f_z2 = hi.log_value;
  c.straddle_pass = le_slack(c.log_f_z1, to.inner_log_r, tol) && le_slack(to.outer_log_r, c.log_f_z2, tol);
  c.doubling_pass = c.log_f_z2 - c.log_f_z1 >= std::log(2.0);

  if (oracle_targets > 0) {
    OracleReport r;
    std::uint64_t st = pair_seed(seed, from.index, to.index);
    for (int k = 0; k < oracle_targets; ++k) {
      const double log_w = to.inner_log_r + unit_double(st) * (to.outer_log_r - to.inner_log_r);
      const double arg_w = -kPi + kTwoPi * unit_double(st);
      ++r.targets_tested;
      try {
        r.counts.push_back(count_preimages(map, from.inner_log_r, from.outer_log_r, log_w, arg_w));
      } catch (const OracleInconclusive&) {
        ++r.inconclusive;
      }
    }
    if (!r.counts.empty()) r.min_preimage_count = *std::min_element(r.counts.begin(), r.counts.end());
    c.oracle = r;
  }
  return c;
}

const CoverageRow* CoverageTable::row(int from_index) const {
  for (const auto& r : rows) {
    if (r.from_index == from_index) return &r;
  }
  return nullptr;
}

bool CoverageTable::covers(int from_index, int to_index) const {
  const CoverageRow* r = row(from_index);
  return r && std::binary_search(r->covered.begin(), r->covered.end(), to_index);
}

CoverageTable coverage_table(const CStarMap& map, const CoveringAnnuli& annuli, double delta, double tol) {
  CoverageTable t;
  t.delta = delta;
  for (const auto& from : annuli.annuli) {
    if (std::abs(from.core_log_r) > map.horizon()) continue;
    CoverageRow row;
    row.from_index = from.index;
    for (const auto& to : annuli.annuli) {
      CoveringCertificate c = certify_covering(map, from, to, delta, 0, kDefaultSeed, tol);
      row.length_pass = c.length_check.pass;
      if (c.pass()) row.covered.push_back(to.index);
      t.certificates.push_back(std::move(c));
    }
    if (!row.covered.empty()) {
      row.k_low = row.covered.front();
      row.k_high = row.covered.back();
    }
    t.rows.push_back(std::move(row));
  }

  // Extreme reach on the far side of the origin band should not shrink as |n| grows.
  for (int side : {1, -1}) {
    std::optional<int> prev_reach, prev_index;
    for (const auto& r : t.rows) {
      if (r.from_index * side <= 0 || !r.k_low) continue;
      const int reach = std::abs(side > 0 ? *r.k_low : *r.k_high);
      if (prev_reach && std::abs(r.from_index) > std::abs(*prev_index) && reach < *prev_reach) {
        t.monotone = false;
        t.monotone_detail += "reach of B_" + std::to_string(r.from_index) + " is " + std::to_string(reach) +
                             ", below " + std::to_string(*prev_reach) + " for B_" + std::to_string(*prev_index) +
                             "; ";
      }
      if (!prev_index || std::abs(r.from_index) > std::abs(*prev_index)) {
        prev_reach = reach;
        prev_index = r.from_index;
      }
    }
  }
  return t;
}

CoveringSetup select_covering(const CStarMap& map, double eps, const std::vector<int>& indices,
                              std::optional<double> log_R_plus, std::optional<double> log_R_minus,
                              double start_plus, double start_minus, double step, int max_steps, double tol) {
  int depth = 0;
  for (int i : indices) depth = std::max(depth, std::abs(i));
  const bool scan = !log_R_plus || !log_R_minus;
  std::optional<ChainViolation> last;
  for (int k = 0; k <= (scan ? max_steps : 0); ++k) {
    CoveringSetup s;
    s.log_R_plus = log_R_plus ? *log_R_plus : start_plus + k * step;
    s.log_R_minus = log_R_minus ? *log_R_minus : start_minus - k * step;
    if (std::max(s.log_R_plus, -s.log_R_minus) > map.horizon()) break;
    try {
      s.partition = build_partition(map, s.log_R_plus, s.log_R_minus, depth, tol);
    } catch (const NotExpanding& e) {
      last.emplace(0, e.what());
      continue;
    }
    s.annuli = build_covering_annuli(map, s.partition, eps, depth, tol);
    bool ok = true;
    for (int i : indices) {
      if (s.annuli.find(i)) continue;
      ok = false;
      const auto failed = std::find_if(s.annuli.failures.begin(), s.annuli.failures.end(),
                                       [&](const ChainFailure& f) { return f.level == i; });
      if (failed == s.annuli.failures.end()) {
        throw HorizonExceeded("covering annulus B_" + std::to_string(i) + " lies beyond the horizon");
      }
      last.emplace(i, failed->inequality);
      break;
    }
    if (ok) return s;
  }
  if (last) throw *last;
  throw ThresholdNotFound("no partition radius inside the horizon gives the required covering annuli");
}

MixedAnnuli build_mixed_annuli(const CStarMap& map, const EssentialItinerary& e, double eps, double log_R0,
                               int depth, double tol) {
  check_eps(eps);
  if (depth < 0) throw InvalidParameter("depth must be non-negative");
  const double le = std::log(eps);
  MixedAnnuli out{e, eps, log_R0, {}, {}, std::nullopt, false};
  const RadiusSequence radii = iterate_radius(map, e, log_R0, depth, tol);

  const Relaxed k0 = e.at(0) == Symbol::infinity ? Relaxed::mu : Relaxed::nu;
  double core = relaxed_modulus(map, log_R0, eps, k0, tol);
  out.annuli.push_back({0, core, eps, core + le, core - le});
  for (int n = 1; n <= depth; ++n) {
    if (std::abs(core) > map.horizon() || static_cast<std::size_t>(n) >= radii.log_R.size()) {
      out.truncated = true;
      break;
    }
    MixedStep st;
    st.n = n;
    st.symbol = e.at(static_cast<std::size_t>(n));
    st.log_R = radii.log_R[n];
    const CircleView view(map, core);
    double next = 0.0;
    if (st.symbol == Symbol::infinity) {
      const double logM = max_modulus(view, tol).log_value;
      st.bound = 2.0 * le + logM;
      st.inequality_pass = st.log_R < st.bound;
      next = le + logM;
      st.contained = st.log_R <= next + le + log_slack(next, tol);
    } else {
      const double logm = min_modulus(view, tol).log_value;
      st.bound = logm - 2.0 * le;
      st.inequality_pass = st.bound < st.log_R;
      next = logm - le;
      st.contained = next - le <= st.log_R + log_slack(next, tol);
    }
    // Band too far out for its width to survive rounding.
    if (!std::isfinite(next) || !((next - le) - (next + le) > -le)) {
      out.truncated = true;
      break;
    }
    core = next;
    out.steps.push_back(st);
    if (!st.inequality_pass || !st.contained) {
      out.violation = n;
      break;
    }
    out.annuli.push_back({n, core, eps, core + le, core - le});
  }
  return out;
}

MixedAnnuli mixed_fast_annuli(const CStarMap& map, const EssentialItinerary& e, double eps, double log_R0,
                              int depth, double tol) {
  MixedAnnuli out = build_mixed_annuli(map, e, eps, log_R0, depth, tol);
  if (out.violation) {
    const MixedStep& st = out.steps.back();
    throw InequalityViolation(*out.violation, st.symbol == Symbol::infinity ? "R_n < eps^2 M(R~_{n-1}) fails"
                                                                            : "m(R~_{n-1})/eps^2 < R_n fails");
  }
  return out;
}

MixedAnnuli scan_mixed_annuli(const CStarMap& map, const EssentialItinerary& e, double eps, int depth,
                              double start, double step, double tol) {
  if (!(step > 0.0)) throw InvalidParameter("scan step must be positive");
  const double sign = e.at(0) == Symbol::infinity ? 1.0 : -1.0;
  for (double t = std::abs(start); t <= map.horizon(); t += step) {
    if (t == 0.0) continue;
    try {
      MixedAnnuli m = build_mixed_annuli(map, e, eps, sign * t, depth, tol);
      if (!m.violation && m.depth_reached() >= depth) return m;
    } catch (const HorizonExceeded&) {
      break;
    }
  }
  throw ThresholdNotFound("no log R_0 satisfies the mixed annulus inequalities to depth " + std::to_string(depth) +
                          " with every band inside double range");
}

}  // namespace cstar
