#pragma once

#include <cmath>
#include <numbers>

namespace wdmqkd {

inline constexpr double kPi = std::numbers::pi;

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Reduces x into [0, period).
inline double wrap(double x, double period) {
  double r = std::fmod(x, period);
  if (r < 0.0) r += period;
  // fmod of a tiny negative value can round up to exactly `period`
  if (r >= period) r = 0.0;
  return r;
}

/// Minimal signed difference a - b modulo 180 degrees, mapped to (-90, 90].
inline double signed_diff_mod180(double a, double b) {
  double d = wrap(a - b, 180.0);
  if (d > 90.0) d -= 180.0;
  return d;
}

}  // namespace wdmqkd
