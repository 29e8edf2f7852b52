#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace cstar {

// Which essential singularity an iterate is near: |z| <= 1 or |z| > 1.
enum class Symbol : std::uint8_t { zero, infinity };

inline Symbol symbol_of(double L) { return L > 0.0 ? Symbol::infinity : Symbol::zero; }
inline char symbol_char(Symbol s) { return s == Symbol::infinity ? 'i' : '0'; }

// Eventually periodic sequence over {0, inf}: prefix followed by the cycle
// repeated forever. Written as e.g. "0i(i0)"; the parenthesised part is the
// cycle and "i" stands for infinity.
class EssentialItinerary {
 public:
  EssentialItinerary(std::vector<Symbol> prefix, std::vector<Symbol> cycle);

  static EssentialItinerary constant(Symbol s) { return EssentialItinerary({}, {s}); }
  static EssentialItinerary parse(std::string_view text);

  Symbol at(std::size_t n) const;
  EssentialItinerary shifted(std::size_t k = 1) const;

  const std::vector<Symbol>& prefix() const { return prefix_; }
  const std::vector<Symbol>& cycle() const { return cycle_; }

  std::string to_string() const;

  friend bool operator==(const EssentialItinerary&, const EssentialItinerary&) = default;

 private:
  std::vector<Symbol> prefix_;
  std::vector<Symbol> cycle_;
};

// Shortest period of the cycle, rotated to its lexicographically least form.
std::vector<Symbol> canonical_cycle(const EssentialItinerary& e);

// True iff some shift of e1 agrees with some shift of e2.
bool itinerary_equiv(const EssentialItinerary& e1, const EssentialItinerary& e2);

std::string symbols_to_string(const std::vector<Symbol>& symbols);

}  // namespace cstar
