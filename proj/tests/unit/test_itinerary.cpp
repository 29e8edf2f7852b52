#include <doctest.h>

#include <random>

#include "cstar/errors.hpp"
#include "cstar/itinerary.hpp"

using namespace cstar;

namespace {

EssentialItinerary random_itinerary(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> len(0, 4), clen(1, 4), bit(0, 1);
  std::vector<Symbol> p(len(rng)), c(clen(rng));
  for (auto& s : p) s = bit(rng) ? Symbol::infinity : Symbol::zero;
  for (auto& s : c) s = bit(rng) ? Symbol::infinity : Symbol::zero;
  return EssentialItinerary(p, c);
}

// Brute force: some shift of one agrees with some shift of the other on a
// window longer than any prefix plus the product of the cycle lengths.
bool brute_equiv(const EssentialItinerary& a, const EssentialItinerary& b) {
  for (std::size_t i = 0; i < 12; ++i) {
    for (std::size_t j = 0; j < 12; ++j) {
      bool same = true;
      for (std::size_t k = 0; k < 64 && same; ++k) same = a.at(i + k) == b.at(j + k);
      if (same) return true;
    }
  }
  return false;
}

}  // namespace

TEST_CASE("parse and print essential itineraries") {
  const EssentialItinerary e = EssentialItinerary::parse("0i(i0)");
  CHECK(e.at(0) == Symbol::zero);
  CHECK(e.at(1) == Symbol::infinity);
  CHECK(e.at(2) == Symbol::infinity);
  CHECK(e.at(3) == Symbol::zero);
  CHECK(e.at(1002) == Symbol::infinity);
  CHECK(e.to_string() == "0i(i0)");
  CHECK(EssentialItinerary::parse(e.to_string()) == e);
  CHECK(e.shifted(2).to_string() == "(i0)");
  CHECK(EssentialItinerary::parse("0i") == EssentialItinerary::parse("(0i)"));
  CHECK_THROWS(EssentialItinerary::parse("(i"));
  CHECK_THROWS(EssentialItinerary::parse("(ix)"));
  CHECK_THROWS(EssentialItinerary::parse("()"));
}

TEST_CASE("canonical cycle is the least rotation of the primitive word") {
  CHECK(symbols_to_string(canonical_cycle(EssentialItinerary::parse("(i0i0)"))) == "0i");
  CHECK(symbols_to_string(canonical_cycle(EssentialItinerary::parse("(ii0)"))) == "0ii");
  CHECK(symbols_to_string(canonical_cycle(EssentialItinerary::parse("0(i)"))) == "i");
}

TEST_CASE("itinerary_equiv agrees with a brute-force shift search") {
  std::mt19937_64 rng(2024);
  int equivalent = 0;
  for (int k = 0; k < 2000; ++k) {
    const EssentialItinerary a = random_itinerary(rng), b = random_itinerary(rng);
    const bool expect = brute_equiv(a, b);
    equivalent += expect;
    CHECK(itinerary_equiv(a, b) == expect);
    CHECK(itinerary_equiv(a, b) == itinerary_equiv(b, a));
    CHECK(itinerary_equiv(a, a.shifted(3)));
  }
  CHECK(equivalent > 50);
}

TEST_CASE("symbol of a log-modulus") {
  CHECK(symbol_of(0.0) == Symbol::zero);
  CHECK(symbol_of(1e-300) == Symbol::infinity);
  CHECK(symbol_of(-2.0) == Symbol::zero);
  CHECK(symbol_char(Symbol::infinity) == 'i');
}
