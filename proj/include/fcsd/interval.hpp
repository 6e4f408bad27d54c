#pragma once

#include <algorithm>
#include <ostream>

namespace fcsd {

/// Closed subinterval of the parameter space [0,1]. Empty is encoded as lower > upper.
struct ParamInterval {
  double lower = 0.0;
  double upper = 1.0;

  static constexpr ParamInterval full() { return {0.0, 1.0}; }
  static constexpr ParamInterval empty() { return {1.0, 0.0}; }

  constexpr bool is_empty() const { return lower > upper; }
  constexpr double width() const { return std::max(upper - lower, 0.0); }
  constexpr bool contains(double theta) const { return lower <= theta && theta <= upper; }

  /// True when every point of `other` lies in this interval (vacuous for empty `other`).
  constexpr bool contains(const ParamInterval& other) const {
    return other.is_empty() || (!is_empty() && lower <= other.lower && other.upper <= upper);
  }

  constexpr bool intersects(const ParamInterval& other) const {
    return !intersect(*this, other).is_empty();
  }

  friend constexpr ParamInterval intersect(const ParamInterval& a, const ParamInterval& b) {
    if (a.is_empty() || b.is_empty()) return empty();
    return {std::max(a.lower, b.lower), std::min(a.upper, b.upper)};
  }

  friend constexpr bool operator==(const ParamInterval&, const ParamInterval&) = default;

  friend std::ostream& operator<<(std::ostream& os, const ParamInterval& i) {
    if (i.is_empty()) return os << "[empty]";
    return os << '[' << i.lower << ", " << i.upper << ']';
  }
};

}  // namespace fcsd
