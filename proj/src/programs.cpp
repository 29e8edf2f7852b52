#include "cstar/programs.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "cstar/errors.hpp"

namespace cstar {

namespace {

// First t >= 0 with log_rate(t) > x. Exact when below 2^62.
struct Crossing {
  std::optional<std::uint64_t> exact;
  double approx = 0.0;
};

Crossing first_crossing(const std::function<double(double)>& log_rate, double x) {
  if (log_rate(0.0) > x) return {0, 0.0};
  double hi = 1.0;
  while (!(log_rate(hi) > x)) {
    hi *= 2.0;
    if (hi > 1e300) return {std::nullopt, std::numeric_limits<double>::infinity()};
  }
  constexpr double kExactLimit = 4611686018427387904.0;  // 2^62
  if (hi <= kExactLimit) {
    std::uint64_t lo = static_cast<std::uint64_t>(hi / 2.0), up = static_cast<std::uint64_t>(hi);
    // invariant: rate(lo) <= x < rate(up), except lo == 0 when hi == 1
    while (up - lo > 1) {
      const std::uint64_t mid = lo + (up - lo) / 2;
      (log_rate(static_cast<double>(mid)) > x ? up : lo) = mid;
    }
    return {up, static_cast<double>(up)};
  }
  double lo = hi / 2.0;
  for (int k = 0; k < 200 && hi - lo > 1e-15 * hi; ++k) {
    const double mid = 0.5 * (lo + hi);
    (log_rate(mid) > x ? hi : lo) = mid;
  }
  return {std::nullopt, std::ceil(hi)};
}

std::vector<long long> parse_numbers(const std::string& text) {
  std::vector<long long> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string::npos) end = text.size();
    std::string tok = text.substr(pos, end - pos);
    const auto a = tok.find_first_not_of(" \t");
    const auto b = tok.find_last_not_of(" \t");
    tok = a == std::string::npos ? std::string() : tok.substr(a, b - a + 1);
    long long v = 0;
    const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || ec != std::errc() || p != tok.data() + tok.size()) {
      throw ParseError(pos, "expected an integer, got '" + tok + "'");
    }
    out.push_back(v);
    pos = end + 1;
  }
  return out;
}

int narrow(long long v) {
  if (v < -1000000 || v > 1000000) throw InvalidParameter("program parameter out of range");
  return static_cast<int>(v);
}

}  // namespace

std::string to_string(ProgramKind k) {
  switch (k) {
    case ProgramKind::fast:
      return "fast";
    case ProgramKind::periodic:
      return "periodic";
    case ProgramKind::bounded:
      return "bounded";
    case ProgramKind::unbounded_nonescaping:
      return "unbounded_nonescaping";
    case ProgramKind::slow:
      return "slow";
    default:
      return "custom";
  }
}

int AnnularItinerary::at(std::size_t k) const {
  if (k < prefix.size()) return prefix[k];
  if (cycle.empty()) throw InvalidParameter("itinerary index past the end of a finite program");
  return cycle[(k - prefix.size()) % cycle.size()];
}

std::vector<int> AnnularItinerary::take(std::size_t count) const {
  if (cycle.empty()) count = std::min(count, prefix.size());
  std::vector<int> out;
  for (std::size_t k = 0; k < count; ++k) out.push_back(at(k));
  return out;
}

std::string AnnularItinerary::to_string() const {
  std::ostringstream os;
  for (std::size_t k = 0; k < prefix.size(); ++k) os << (k ? "," : "") << prefix[k];
  if (!cycle.empty()) {
    os << (prefix.empty() ? "" : ",") << "(";
    for (std::size_t k = 0; k < cycle.size(); ++k) os << (k ? "," : "") << cycle[k];
    os << ")";
  }
  return os.str();
}

AnnularItinerary fast_program(int start, int length) {
  if (length < 1) throw InvalidParameter("length must be at least 1");
  AnnularItinerary it;
  it.kind = ProgramKind::fast;
  for (int k = 0; k < length; ++k) it.prefix.push_back(start + k);
  return it;
}

AnnularItinerary periodic_program(std::vector<int> word) {
  if (word.empty()) throw InvalidParameter("periodic word must be nonempty");
  AnnularItinerary it;
  it.kind = ProgramKind::periodic;
  it.cycle = std::move(word);
  return it;
}

AnnularItinerary bounded_program(int a, int length, const std::string& pattern) {
  if (length < 1) throw InvalidParameter("length must be at least 1");
  if (pattern.empty() || pattern.find_first_not_of("01") != std::string::npos) {
    throw InvalidParameter("bounded pattern must be a nonempty string of 0 and 1");
  }
  AnnularItinerary it;
  it.kind = ProgramKind::bounded;
  for (int k = 0; k < length; ++k) it.prefix.push_back(a + (pattern[k % pattern.size()] - '0'));
  return it;
}

AnnularItinerary unbounded_program(int base, int length) {
  if (length < 1) throw InvalidParameter("length must be at least 1");
  AnnularItinerary it;
  it.kind = ProgramKind::unbounded_nonescaping;
  const int step = base >= 0 ? 1 : -1;
  for (int k = 1; static_cast<int>(it.prefix.size()) < length; ++k) {
    for (int j = 0; j <= k && static_cast<int>(it.prefix.size()) < length; ++j) it.prefix.push_back(base + step * j);
  }
  return it;
}

AnnularItinerary slow_program(const CStarMap& map, const CoveringAnnuli& annuli,
                              const std::function<double(double)>& log_rate, int levels, std::uint64_t cap,
                              double tol) {
  if (levels < 1) throw InvalidParameter("levels must be at least 1");
  if (cap < 1) throw InvalidParameter("dwell cap must be at least 1");
  AnnularItinerary it;
  it.kind = ProgramKind::slow;
  std::optional<std::uint64_t> prev_exact = 0;
  double prev_approx = 0.0;
  for (int n = 1; n <= levels; ++n) {
    const CoveringAnnulus* a = annuli.find(n);
    if (!a || std::abs(a->core_log_r) > map.horizon()) {
      it.truncated = true;
      break;
    }
    Dwell d;
    d.index = n;
    d.threshold = max_modulus(map, a->core_log_r, tol).log_value;
    const Crossing c = first_crossing(log_rate, d.threshold);
    d.leave_at = c.exact;
    d.count_approx = std::max(0.0, c.approx - prev_approx);
    if (c.exact && prev_exact) d.count = *c.exact >= *prev_exact ? *c.exact - *prev_exact : 0;
    d.emitted = d.count ? std::min(*d.count, cap) : cap;
    if (!d.count || *d.count > cap) it.truncated = true;
    for (std::uint64_t k = 0; k < d.emitted; ++k) it.prefix.push_back(n);
    prev_exact = c.exact;
    prev_approx = std::max(prev_approx, c.approx);
    it.dwell.push_back(d);
  }
  if (it.prefix.empty()) throw InvalidParameter("slow program has no level inside the horizon");
  return it;
}

AnnularItinerary custom_program(std::vector<int> entries) {
  if (entries.empty()) throw InvalidParameter("itinerary must be nonempty");
  AnnularItinerary it;
  it.kind = ProgramKind::custom;
  it.prefix = std::move(entries);
  return it;
}

void validate_program(const AnnularItinerary& it, const CoverageTable& coverage) {
  std::vector<int> seq = it.prefix;
  seq.insert(seq.end(), it.cycle.begin(), it.cycle.end());
  if (!it.cycle.empty()) seq.push_back(it.cycle.front());
  for (std::size_t k = 0; k + 1 < seq.size(); ++k) {
    if (!coverage.covers(seq[k], seq[k + 1])) {
      throw Unrealizable("no certified covering B_" + std::to_string(seq[k]) + " -> B_" +
                         std::to_string(seq[k + 1]) + " (entry " + std::to_string(k) + ")");
    }
  }
}

ProgramSpec parse_program(const std::string& text) {
  ProgramSpec spec;
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    spec.numbers = parse_numbers(text);
    return spec;
  }
  const std::string kind = text.substr(0, colon);
  const std::string rest = text.substr(colon + 1);
  auto need = [&](std::size_t lo, std::size_t hi) {
    if (spec.numbers.size() < lo || spec.numbers.size() > hi) {
      throw ParseError(colon + 1, "wrong number of parameters for '" + kind + "'");
    }
  };
  if (kind == "essential") {
    spec.essential = rest;
    EssentialItinerary::parse(rest);
    return spec;
  }
  if (kind == "bounded") {
    std::string nums = rest;
    const auto c1 = rest.find(',');
    const auto c2 = c1 == std::string::npos ? c1 : rest.find(',', c1 + 1);
    if (c2 != std::string::npos) {
      nums = rest.substr(0, c2);
      spec.bits = rest.substr(c2 + 1);
    }
    spec.kind = ProgramKind::bounded;
    spec.numbers = parse_numbers(nums);
    need(2, 2);
    return spec;
  }
  spec.numbers = parse_numbers(rest);
  if (kind == "fast") {
    spec.kind = ProgramKind::fast;
    need(2, 2);
  } else if (kind == "periodic") {
    spec.kind = ProgramKind::periodic;
  } else if (kind == "unbounded") {
    spec.kind = ProgramKind::unbounded_nonescaping;
    need(2, 2);
  } else if (kind == "slow") {
    spec.kind = ProgramKind::slow;
    need(2, 2);
  } else {
    throw ParseError(0, "unknown program kind '" + kind + "'");
  }
  return spec;
}

AnnularItinerary build_program(const ProgramSpec& spec, const CStarMap& map, const CoveringAnnuli& annuli) {
  if (!spec.essential.empty()) throw InvalidParameter("essential itineraries use mixed annuli");
  const auto& v = spec.numbers;
  switch (spec.kind) {
    case ProgramKind::fast:
      return fast_program(narrow(v[0]), narrow(v[1]));
    case ProgramKind::periodic: {
      std::vector<int> w;
      for (long long x : v) w.push_back(narrow(x));
      return periodic_program(std::move(w));
    }
    case ProgramKind::bounded:
      return bounded_program(narrow(v[0]), narrow(v[1]), spec.bits.empty() ? "01" : spec.bits);
    case ProgramKind::unbounded_nonescaping:
      return unbounded_program(narrow(v[0]), narrow(v[1]));
    case ProgramKind::slow:
      if (v[1] < 1) throw InvalidParameter("dwell cap must be at least 1");
      return slow_program(map, annuli, [](double t) { return t; }, narrow(v[0]), static_cast<std::uint64_t>(v[1]));
    default: {
      std::vector<int> w;
      for (long long x : v) w.push_back(narrow(x));
      return custom_program(std::move(w));
    }
  }
}

}  // namespace cstar
