#include "cstar/itinerary.hpp"

#include <algorithm>

#include "cstar/errors.hpp"

namespace cstar {

EssentialItinerary::EssentialItinerary(std::vector<Symbol> prefix, std::vector<Symbol> cycle)
    : prefix_(std::move(prefix)), cycle_(std::move(cycle)) {
  if (cycle_.empty()) throw InvalidParameter("essential itinerary needs a nonempty cycle");
}

EssentialItinerary EssentialItinerary::parse(std::string_view text) {
  std::vector<Symbol> prefix, cycle;
  bool in_cycle = false, closed = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == ' ') continue;
    if (closed) throw ParseError(i, "characters after the cycle");
    if (c == '(') {
      if (in_cycle) throw ParseError(i, "nested '('");
      in_cycle = true;
      continue;
    }
    if (c == ')') {
      if (!in_cycle) throw ParseError(i, "unmatched ')'");
      closed = true;
      continue;
    }
    Symbol s;
    if (c == '0') {
      s = Symbol::zero;
    } else if (c == 'i' || c == 'I') {
      s = Symbol::infinity;
    } else {
      throw ParseError(i, "expected '0', 'i', '(' or ')'");
    }
    (in_cycle ? cycle : prefix).push_back(s);
  }
  if (in_cycle && !closed) throw ParseError(text.size(), "missing ')'");
  if (!in_cycle) {
    // A bare word is read as a pure cycle.
    cycle = std::move(prefix);
    prefix.clear();
  }
  if (cycle.empty()) throw ParseError(text.size(), "empty cycle");
  return EssentialItinerary(std::move(prefix), std::move(cycle));
}

Symbol EssentialItinerary::at(std::size_t n) const {
  if (n < prefix_.size()) return prefix_[n];
  return cycle_[(n - prefix_.size()) % cycle_.size()];
}

EssentialItinerary EssentialItinerary::shifted(std::size_t k) const {
  if (k <= prefix_.size()) {
    return EssentialItinerary(std::vector<Symbol>(prefix_.begin() + static_cast<std::ptrdiff_t>(k), prefix_.end()),
                              cycle_);
  }
  const std::size_t r = (k - prefix_.size()) % cycle_.size();
  std::vector<Symbol> rotated(cycle_.begin() + static_cast<std::ptrdiff_t>(r), cycle_.end());
  rotated.insert(rotated.end(), cycle_.begin(), cycle_.begin() + static_cast<std::ptrdiff_t>(r));
  return EssentialItinerary({}, std::move(rotated));
}

std::string symbols_to_string(const std::vector<Symbol>& symbols) {
  std::string out;
  out.reserve(symbols.size());
  for (Symbol s : symbols) out.push_back(symbol_char(s));
  return out;
}

std::string EssentialItinerary::to_string() const {
  return symbols_to_string(prefix_) + "(" + symbols_to_string(cycle_) + ")";
}

std::vector<Symbol> canonical_cycle(const EssentialItinerary& e) {
  const auto& c = e.cycle();
  const std::size_t n = c.size();
  std::size_t period = n;
  for (std::size_t p = 1; p < n; ++p) {
    if (n % p != 0) continue;
    bool ok = true;
    for (std::size_t i = p; i < n && ok; ++i) ok = c[i] == c[i - p];
    if (ok) {
      period = p;
      break;
    }
  }
  std::vector<Symbol> primitive(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(period));
  std::vector<Symbol> best = primitive;
  for (std::size_t r = 1; r < period; ++r) {
    std::vector<Symbol> rot(primitive.begin() + static_cast<std::ptrdiff_t>(r), primitive.end());
    rot.insert(rot.end(), primitive.begin(), primitive.begin() + static_cast<std::ptrdiff_t>(r));
    if (rot < best) best = std::move(rot);
  }
  return best;
}

bool itinerary_equiv(const EssentialItinerary& e1, const EssentialItinerary& e2) {
  return canonical_cycle(e1) == canonical_cycle(e2);
}

}  // namespace cstar
