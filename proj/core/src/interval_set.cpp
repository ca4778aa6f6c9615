#include "rankone/interval_set.hpp"

#include <algorithm>
#include <stdexcept>

namespace rankone {

IntervalSet IntervalSet::canonicalize(std::vector<Interval> intervals) {
  for (const auto& iv : intervals) {
    if (iv.hi < iv.lo)
      throw std::invalid_argument("interval [" + to_string(iv.lo) + ", " + to_string(iv.hi) +
                                  ") has lo > hi");
  }
  std::erase_if(intervals, [](const Interval& iv) { return iv.empty(); });
  std::sort(intervals.begin(), intervals.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });

  IntervalSet out;
  for (auto& iv : intervals) {
    if (!out.parts_.empty() && iv.lo <= out.parts_.back().hi) {
      if (iv.hi > out.parts_.back().hi) out.parts_.back().hi = iv.hi;
    } else {
      out.parts_.push_back(std::move(iv));
    }
  }
  return out;
}

IntervalSet IntervalSet::of(Interval interval) {
  return canonicalize({std::move(interval)});
}

Rational IntervalSet::measure() const {
  Rational total = 0;
  for (const auto& iv : parts_) total += iv.hi - iv.lo;
  return total;
}

bool IntervalSet::contains(const Rational& x) const {
  auto it = std::upper_bound(parts_.begin(), parts_.end(), x,
                             [](const Rational& v, const Interval& iv) { return v < iv.lo; });
  if (it == parts_.begin()) return false;
  return std::prev(it)->contains(x);
}

IntervalSet IntervalSet::translated(const Rational& offset) const {
  IntervalSet out = *this;
  for (auto& iv : out.parts_) {
    iv.lo += offset;
    iv.hi += offset;
  }
  return out;
}

namespace {

std::vector<Interval> intersect_parts(const std::vector<Interval>& a, const std::vector<Interval>& b) {
  std::vector<Interval> out;
  std::size_t i = 0, k = 0;
  while (i < a.size() && k < b.size()) {
    const Rational& lo = a[i].lo > b[k].lo ? a[i].lo : b[k].lo;
    const Rational& hi = a[i].hi < b[k].hi ? a[i].hi : b[k].hi;
    if (lo < hi) out.push_back({lo, hi});
    if (a[i].hi < b[k].hi) ++i;
    else ++k;
  }
  return out;
}

std::vector<Interval> difference_parts(const std::vector<Interval>& a, const std::vector<Interval>& b) {
  std::vector<Interval> out;
  std::size_t k = 0;
  for (const auto& iv : a) {
    Rational cursor = iv.lo;
    while (k < b.size() && b[k].hi <= cursor) ++k;
    std::size_t m = k;
    while (m < b.size() && b[m].lo < iv.hi) {
      if (b[m].lo > cursor) out.push_back({cursor, b[m].lo});
      if (b[m].hi > cursor) cursor = b[m].hi;
      if (cursor >= iv.hi) break;
      ++m;
    }
    if (cursor < iv.hi) out.push_back({cursor, iv.hi});
  }
  return out;
}

}  // namespace

IntervalSet set_algebra(const IntervalSet& a, const IntervalSet& b, SetOp op) {
  switch (op) {
    case SetOp::Union: {
      std::vector<Interval> all = a.intervals();
      all.insert(all.end(), b.intervals().begin(), b.intervals().end());
      return IntervalSet::canonicalize(std::move(all));
    }
    case SetOp::Intersect:
      return IntervalSet::canonicalize(intersect_parts(a.intervals(), b.intervals()));
    case SetOp::Difference:
      return IntervalSet::canonicalize(difference_parts(a.intervals(), b.intervals()));
  }
  throw std::logic_error("unknown set operation");
}

Rational intersection_measure(const IntervalSet& a, const IntervalSet& b) {
  Rational total = 0;
  for (const auto& iv : intersect_parts(a.intervals(), b.intervals())) total += iv.hi - iv.lo;
  return total;
}

}  // namespace rankone
