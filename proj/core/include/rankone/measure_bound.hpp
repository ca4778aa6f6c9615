#pragma once

#include "rankone/rational.hpp"

namespace rankone {

/// Two-sided rational enclosure [lo, hi] of a nonnegative quantity whose exact
/// value depends on mass not yet resolved at the current stage.
class MeasureBound {
 public:
  MeasureBound() = default;
  /// Throws std::invalid_argument unless 0 <= lo <= hi.
  MeasureBound(Rational lo, Rational hi);

  static MeasureBound exact(const Rational& value) { return {value, value}; }

  const Rational& lo() const { return lo_; }
  const Rational& hi() const { return hi_; }
  Rational width() const { return hi_ - lo_; }
  bool is_exact() const { return lo_ == hi_; }
  bool contains(const Rational& x) const { return lo_ <= x && x <= hi_; }
  bool contains(const MeasureBound& other) const {
    return lo_ <= other.lo_ && other.hi_ <= hi_;
  }

  /// Multiplies both ends by a nonnegative factor.
  MeasureBound scaled(const Rational& factor) const;

  MeasureBound& operator+=(const MeasureBound& other);
  friend MeasureBound operator+(MeasureBound a, const MeasureBound& b) { return a += b; }
  friend bool operator==(const MeasureBound&, const MeasureBound&) = default;

 private:
  Rational lo_ = 0;
  Rational hi_ = 0;
};

/// Enclosure of |x - y| for x, y ranging over the two bounds' intervals.
MeasureBound distance_bound(const Rational& lo_a, const Rational& hi_a, const Rational& lo_b,
                            const Rational& hi_b);

}  // namespace rankone
