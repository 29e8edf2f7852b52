#pragma once

#include <cmath>
#include <numbers>

namespace cstar {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Reduces an angle to [-pi, pi). An exact tie at +pi maps to -pi.
inline double normalize_angle(double theta) {
  double r = std::remainder(theta, kTwoPi);
  if (r >= kPi) r -= kTwoPi;
  if (r < -kPi) r += kTwoPi;
  return r;
}

// A point of the punctured plane in log-polar form: z = exp(L + i theta).
struct LogPoint {
  double L = 0.0;
  double theta = 0.0;

  LogPoint() = default;
  LogPoint(double log_modulus, double angle) : L(log_modulus), theta(normalize_angle(angle)) {}

  LogPoint conj() const { return LogPoint(L, -theta); }

  friend bool operator==(const LogPoint&, const LogPoint&) = default;
};

}  // namespace cstar
