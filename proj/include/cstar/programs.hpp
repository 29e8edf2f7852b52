#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cstar/covering.hpp"
#include "cstar/map.hpp"

namespace cstar {

enum class ProgramKind { fast, periodic, bounded, unbounded_nonescaping, slow, custom };

std::string to_string(ProgramKind k);

// Time spent at one annulus index by a slow program.
struct Dwell {
  int index = 0;
  double threshold = 0.0;                // log M(mu^n(R+)); the rate must exceed it to move on
  std::optional<std::uint64_t> leave_at; // first step t with log r_t > threshold, when representable
  std::optional<std::uint64_t> count;    // steps spent at this index, when representable
  double count_approx = 0.0;
  std::uint64_t emitted = 0;             // copies written into the prefix (capped)
};

struct AnnularItinerary {
  std::vector<int> prefix;
  std::vector<int> cycle;  // empty for finite programs
  ProgramKind kind = ProgramKind::custom;
  std::vector<Dwell> dwell;  // slow programs only
  bool truncated = false;    // a dwell was capped or a level was out of reach

  // Entry k of the (possibly periodic) sequence.
  int at(std::size_t k) const;
  // The first `count` entries.
  std::vector<int> take(std::size_t count) const;
  std::string to_string() const;
};

// s_{k+1} = s_k + 1 starting at `start`.
AnnularItinerary fast_program(int start, int length);

// The word repeated forever.
AnnularItinerary periodic_program(std::vector<int> word);

// Two adjacent indices a and a+1 chosen by `pattern` bits ('0' -> a,
// '1' -> a+1), cycling through the pattern; default alternates.
AnnularItinerary bounded_program(int a, int length, const std::string& pattern = "01");

// Excursions base, base+1, ..., base+k for k = 1, 2, ... returning to base
// each time: unbounded but with a bounded subsequence.
AnnularItinerary unbounded_program(int base, int length);

// Dwells at index n = 1, 2, ... until the rate function overtakes
// log M(mu^n(R+)). `log_rate(t)` must be increasing and unbounded. Levels
// whose threshold is beyond the horizon end the program (truncated). Each
// dwell is written at most `cap` times into the prefix.
AnnularItinerary slow_program(const CStarMap& map, const CoveringAnnuli& annuli,
                              const std::function<double(double)>& log_rate, int levels, std::uint64_t cap,
                              double tol = kModulusTol);

AnnularItinerary custom_program(std::vector<int> entries);

// Throws Unrealizable naming the first transition s_k -> s_{k+1} (including
// the wrap-around of a cycle) that no certified covering supports.
void validate_program(const AnnularItinerary& it, const CoverageTable& coverage);

// Parses "1,2,3" (custom) or "<kind>:<params>":
//   fast:<start>,<length>   periodic:<w1>,<w2>,...   bounded:<a>,<length>[,<bits>]
//   unbounded:<base>,<length>   slow:<levels>,<cap>  (rate log r_t = t)
// Slow programs need the map and annuli; see build_program.
struct ProgramSpec {
  ProgramKind kind = ProgramKind::custom;
  std::vector<long long> numbers;
  std::string bits;
  std::string essential;  // "essential:(i0)" selects mixed annuli instead
};

ProgramSpec parse_program(const std::string& text);

AnnularItinerary build_program(const ProgramSpec& spec, const CStarMap& map, const CoveringAnnuli& annuli);

}  // namespace cstar
