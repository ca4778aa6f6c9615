#pragma once

#include <vector>

#include "rankone/rational.hpp"

namespace rankone {

/// Half-open interval [lo, hi).
struct Interval {
  Rational lo;
  Rational hi;

  Rational length() const { return hi - lo; }
  bool empty() const { return hi <= lo; }
  bool contains(const Rational& x) const { return lo <= x && x < hi; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Finite union of half-open intervals kept in canonical form: sorted,
/// pairwise disjoint, no zero-length members and no two members touching.
class IntervalSet {
 public:
  IntervalSet() = default;

  /// Accepts arbitrary (overlapping, unsorted) intervals with lo <= hi.
  static IntervalSet canonicalize(std::vector<Interval> intervals);
  static IntervalSet of(Interval interval);

  const std::vector<Interval>& intervals() const { return parts_; }
  bool empty() const { return parts_.empty(); }
  std::size_t size() const { return parts_.size(); }
  Rational measure() const;
  bool contains(const Rational& x) const;

  IntervalSet translated(const Rational& offset) const;

  friend bool operator==(const IntervalSet&, const IntervalSet&) = default;

 private:
  std::vector<Interval> parts_;
};

enum class SetOp { Union, Intersect, Difference };

IntervalSet set_algebra(const IntervalSet& a, const IntervalSet& b, SetOp op);

inline IntervalSet set_union(const IntervalSet& a, const IntervalSet& b) {
  return set_algebra(a, b, SetOp::Union);
}
inline IntervalSet set_intersect(const IntervalSet& a, const IntervalSet& b) {
  return set_algebra(a, b, SetOp::Intersect);
}
inline IntervalSet set_difference(const IntervalSet& a, const IntervalSet& b) {
  return set_algebra(a, b, SetOp::Difference);
}

/// measure(a ∩ b) without materializing the intersection.
Rational intersection_measure(const IntervalSet& a, const IntervalSet& b);

}  // namespace rankone
