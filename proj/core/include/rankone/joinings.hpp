#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rankone/averaging.hpp"
#include "rankone/construction.hpp"
#include "rankone/measure_bound.hpp"

namespace rankone {

/// (z1, z2): level z1 of the first tower times level z2 of the second.
struct BlockIndex {
  std::int64_t z1 = 0;
  std::int64_t z2 = 0;
  friend auto operator<=>(const BlockIndex&, const BlockIndex&) = default;
};

enum class JoiningKind { Product, Graph, Empirical };

std::string to_string(JoiningKind kind);

/// Joining masses ν(V^z_j) of the blocks V^z_j = T̃^{z1}Ẽ_j × T^{z2}E_j.
///
/// Total mass is 1 over [0,1)²; `residual` is whatever the blocks do not
/// carry.  For graph joinings the block masses are certified lower bounds and
/// `uncertain_mass` bounds how much of the residual might belong to blocks.
class BlockMassMatrix {
 public:
  BlockMassMatrix(int j, std::int64_t rows, std::int64_t cols);

  int j() const { return j_; }
  std::int64_t rows() const { return rows_; }
  std::int64_t cols() const { return cols_; }

  const Rational& at(std::int64_t z1, std::int64_t z2) const;
  const Rational& at(const BlockIndex& z) const { return at(z.z1, z.z2); }
  void set(std::int64_t z1, std::int64_t z2, Rational mass);

  Rational block_total() const;
  Rational row_sum(std::int64_t z1) const;
  Rational col_sum(std::int64_t z2) const;
  /// ν(T̃^{z1}Ẽ_j × X): the row plus the mass whose second coordinate is off the tower.
  Rational row_marginal(std::int64_t z1) const;
  Rational col_marginal(std::int64_t z2) const;

  JoiningKind kind = JoiningKind::Product;
  int resolution = 0;
  std::int64_t graph_shift = 0;
  std::int64_t samples = 0;
  std::string seeds;
  Rational residual = 0;
  Rational uncertain_mass = 0;
  /// μ(Ẽ_j) and μ(E_j).
  Rational first_base;
  Rational second_base;
  /// first_stray[z1] = ν(T̃^{z1}Ẽ_j × (X \ tower_j)), and symmetrically.
  std::vector<Rational> first_stray;
  std::vector<Rational> second_stray;

 private:
  int j_;
  std::int64_t rows_;
  std::int64_t cols_;
  std::vector<Rational> masses_;
};

BlockMassMatrix product_blocks(const Construction& first, const Construction& second, int j, int J);

/// Self-joining ν(V^{(z1,z2)}) = μ(T^{z1}E_j ∩ T^{z2+k}E_j), from occurrence overlaps at stage J.
BlockMassMatrix graph_blocks(const Construction& c, std::int64_t k, int j, int J);

struct OrbitSeed {
  Rational first;
  Rational second;
  /// Each step applies T̃^{first_stride} × T^{second_stride}.
  std::int64_t first_stride = 1;
  std::int64_t second_stride = 1;
};

/// Block histogram of the orbit pair over times 0..N-1.
BlockMassMatrix empirical_joining(const Construction& first, const Construction& second, const OrbitSeed& seed,
                                  std::int64_t samples, int j, int J);

struct LightBlockReport {
  Rational epsilon;
  int j = 0;
  std::vector<BlockIndex> light_set;
  Rational covered_mass;
};

/// Blocks with ν(V^z_j) < ε·μ(E_j); ties count as heavy.
LightBlockReport light_blocks(const BlockMassMatrix& m, const Rational& epsilon);

struct DiEstimate {
  /// min over ε of (max over j of covered mass).
  Rational proxy;
  /// (ε, max_j covered mass), ε decreasing.
  std::vector<std::pair<Rational, Rational>> per_epsilon;
};

/// Finite-stage stand-in for the powder mass.  Requires at least two stages
/// and at least two distinct ε values.
DiEstimate di_estimate(const std::vector<LightBlockReport>& reports);

struct DispersionRow {
  std::int64_t n = 0;
  std::int64_t conditioning_count = 0;
  std::map<BlockIndex, Rational> masses;
  Rational off_tower;
  Rational max_block_mass;
};

/// Conditions on times m < N with the pair in `source`, then histograms the
/// pair at times m + n for each n in `shifts`.
std::vector<DispersionRow> dispersion_experiment(const Construction& first, const Construction& second,
                                                 const OrbitSeed& seed, std::int64_t samples, int j, int J,
                                                 const BlockIndex& source, const std::vector<std::int64_t>& shifts);

/// C^w_j = ∪_{i=0}^{⌊δ h_j⌋} T̃^{w+i}Ẽ_j × T^i E_j.
struct ColumnSpec {
  Rational delta;
  std::int64_t w = 0;
  int j = 0;
  std::int64_t length = 0;  // ⌊δ h_j⌋ + 1

  std::vector<BlockIndex> members(std::int64_t shift = 0) const;
};

/// F_j = ∪_{h ∈ D_j} (Id × T^h) C_j with its conditional weights.
struct FSet {
  ColumnSpec column;
  std::vector<std::int64_t> shifts;
  std::vector<Rational> column_masses;
  Rational mass;
  WeightSequence weights;  // a_h = ν((Id×T^h)C_j | F_j)
  /// max_h a_h.
  Rational flatness;
};

/// Throws std::invalid_argument on out-of-range columns or when ν(F) = 0.
FSet columns_and_F(const BlockMassMatrix& m, const Rational& delta, std::int64_t w,
                   std::vector<std::int64_t> shifts);

/// Shifts h whose translated column (Id × T^h)C^w_j consists of ε-light blocks only.
std::vector<std::int64_t> light_column_shifts(const BlockMassMatrix& m, const Rational& delta, std::int64_t w,
                                              const Rational& epsilon);

struct TrivializationRecord {
  /// ν(A×B | F), read off the block masses.
  Rational conditional;
  /// Σ_h a_h λ(A × T^{-h}B | C), through average_apply on χ_B.
  MeasureBound averaged;
  /// |conditional - averaged|.
  MeasureBound identity_gap;
  /// ν(A×B) from the block masses.
  MeasureBound joint;
  /// μ(A)·μ(B).
  Rational target;
  /// |ν(A×B) - μ(A)μ(B)|.
  MeasureBound gap;
  Rational flatness;
};

/// A is a union of stage-k levels of `first`, B of `second`, with k <= j.
TrivializationRecord trivialization_check(const BlockMassMatrix& m, const Construction& first,
                                          const Construction& second, const FSet& f, const IntervalSet& a,
                                          const IntervalSet& b, int k, int J);

}  // namespace rankone
