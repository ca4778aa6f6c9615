#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "rankone/construction.hpp"
#include "rankone/joinings.hpp"
#include "rankone/statistics.hpp"

namespace rankone {

/// A flow seen through its time grid: S is the grid map of the base
/// construction, q = 1/t_j, and the pair (time-α flow, flow) is (S^p, S^{q'}).
struct FlowSkeletonSpec {
  ConstructionSpec base;
  std::int64_t grid_inverse = 1;
  std::int64_t alpha_num = 2;
  std::int64_t alpha_den = 1;

  Rational alpha() const;
  /// Requires p > q' >= 1 and q >= 1.
  void validate() const;
};

struct ThickenedBase {
  int j = 0;
  std::int64_t q = 0;
  /// E¹_j = levels 0..q of tower j.
  IntervalSet set;
  Rational measure;
  /// Cells of the coarse partition ξ¹_j.
  std::int64_t coarse_height = 0;
};

/// q here is the thickening, which may be 0 even though the grid spec requires q >= 1.
ThickenedBase thickened_base(const Construction& c, std::int64_t q, int j);
ThickenedBase thickened_base(const FlowSkeletonSpec& fspec, const Construction& c, int j);

struct WindowedReturn {
  std::map<std::int64_t, MeasureBound> windows;
  MeasureBound max;
};

/// Σ_{w=z}^{z+q} a^w_j for z in [z_lo, z_hi], through window_sums on the grid profile.
WindowedReturn windowed_return_flow(const Construction& c, std::int64_t q, int j, int J, std::int64_t z_lo,
                                    std::int64_t z_hi, int threads = 1);

/// μ(E¹_j | T^z E_j) computed geometrically from power_image.  Equal to the
/// window sum starting at z - q on resolved mass.
MeasureBound thickened_conditional(const Construction& c, std::int64_t q, int j, int J, std::int64_t z);

enum class BandSide { Right, Left };

struct BandQuery {
  std::int64_t p = 2;
  std::int64_t q_prime = 1;
  std::int64_t q = 1;
  BandSide side = BandSide::Right;
  std::int64_t offset = 0;
  /// Upper end of z for left bands; -1 means h_j - 1.
  std::int64_t extent = -1;
};

/// Right: (p z + w, q' z + h) for h in [0,q], z in [0, h_j - w].
/// Left:  (p z, q' z + h + v) for h in [0,q], z in [0, extent].
/// Blocks falling outside the h_j × h_j grid are dropped.
std::vector<BlockIndex> band_blocks(const BandQuery& query, std::int64_t height);

Rational band_masses(const BlockMassMatrix& m, const BandQuery& query);

/// Aggregates blocks into the coarse cells {q c, ..., q c + q - 1} of ξ¹_j.
BlockMassMatrix coarse_blocks(const BlockMassMatrix& m, std::int64_t q);

}  // namespace rankone
