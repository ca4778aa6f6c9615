#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "rankone/construction.hpp"
#include "rankone/measure_bound.hpp"

namespace rankone {

/// Enclosures of a^z_j = μ(T^z E_j | E_j) for z = 0..z_max, resolved at stage J.
struct ReturnProfile {
  int j = 0;
  int J = 0;
  std::vector<MeasureBound> values;
  /// Set when z_max reaches h_J, where every occurrence escapes and bounds are [0, 1].
  bool degenerate = false;

  std::int64_t z_max() const { return static_cast<std::int64_t>(values.size()) - 1; }
  const MeasureBound& at(std::int64_t z) const { return values.at(static_cast<std::size_t>(z)); }
};

/// Counts |S ∩ (S - z)| over the occurrence set S = S_j(J); occurrences with
/// p + z >= h_J are unresolved and widen the upper bound by one level each.
/// `threads` > 1 splits the z range across worker threads.
ReturnProfile return_profile(const Construction& c, int j, int J, std::int64_t z_max, int threads = 1);

/// Enclosure of max a^z over z in (z_lo, z_max].  Throws on an empty range.
MeasureBound max_profile(const ReturnProfile& profile, std::int64_t z_lo);

/// z -> Σ_{w=z}^{z+q} a^w for every window inside the profile.
std::map<std::int64_t, MeasureBound> window_sums(const ReturnProfile& profile, std::int64_t q);

/// Enclosure of μ(A ∩ T^m B) via power_image of B at stage J.
MeasureBound correlation(const Construction& c, const IntervalSet& a, const IntervalSet& b, std::int64_t m,
                         int J);

struct CorrelationSeries {
  IntervalSet a;
  IntervalSet b;
  std::vector<MeasureBound> values;  // index m = 0..m_max
  Rational target;                   // μ(A)·μ(B)
};

CorrelationSeries correlation_series(const Construction& c, const IntervalSet& a, const IntervalSet& b,
                                     std::int64_t m_max, int J);

}  // namespace rankone
