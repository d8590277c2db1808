#pragma once

#include <algorithm>
#include <cmath>

namespace dincl {

// Compact interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  double clamp(double x) const { return std::clamp(x, lo, hi); }
  double distance(double x) const {
    if (x < lo) return lo - x;
    if (x > hi) return x - hi;
    return 0.0;
  }
  bool contains(double x, double tol = 0.0) const { return distance(x) <= tol; }
  bool contains(const Interval& other, double tol = 0.0) const {
    return other.lo >= lo - tol && other.hi <= hi + tol;
  }
  // -reverse([lo, hi]) = [-hi, -lo]
  Interval reflected() const { return {-hi, -lo}; }
  Interval scaled(double c) const { return c >= 0 ? Interval{c * lo, c * hi} : Interval{c * hi, c * lo}; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

// Which side a one-sided limit approaches from.
enum class Side { Left, Right };

}  // namespace dincl
