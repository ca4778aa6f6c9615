#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rankone/interval_set.hpp"
#include "rankone/measure_bound.hpp"

namespace rankone {

/// Number of columns r_j the stage-j tower is cut into.
struct CutRule {
  enum class Kind { Constant, StageIndex, List };
  Kind kind = Kind::Constant;
  /// Constant: r_j = value.  StageIndex: r_j = j + value.
  std::int64_t value = 2;
  /// List: r_j = list[j - 1].
  std::vector<std::int64_t> list;

  static CutRule constant(std::int64_t r) { return {Kind::Constant, r, {}}; }
  static CutRule stage_index(std::int64_t offset = 0) { return {Kind::StageIndex, offset, {}}; }
  static CutRule from_list(std::vector<std::int64_t> r) { return {Kind::List, 0, std::move(r)}; }
};

/// Spacer counts (s_{j,0}, ..., s_{j,r_j-1}) placed over the columns of stage j.
struct SpacerRule {
  enum class Kind { Staircase, None, Pattern, Random, List };
  Kind kind = Kind::None;
  /// Pattern: the same vector at every stage (Chacon uses 0,1,0).
  std::vector<std::int64_t> pattern;
  /// List: explicit vector per stage, list[j - 1].
  std::vector<std::vector<std::int64_t>> list;
  /// Random: spacers drawn uniformly from [random_min, random_max].
  std::int64_t random_min = 0;
  std::int64_t random_max = 0;

  static SpacerRule staircase() { return {Kind::Staircase, {}, {}, 0, 0}; }
  static SpacerRule none() { return {Kind::None, {}, {}, 0, 0}; }
  static SpacerRule repeated(std::vector<std::int64_t> p) { return {Kind::Pattern, std::move(p), {}, 0, 0}; }
  static SpacerRule random(std::int64_t lo, std::int64_t hi) { return {Kind::Random, {}, {}, lo, hi}; }
  static SpacerRule from_list(std::vector<std::vector<std::int64_t>> l) {
    return {Kind::List, {}, std::move(l), 0, 0};
  }
};

/// Finite recipe for a cutting-and-stacking construction.
///
/// Stage 1 is a single tower of h1 levels.  Stage j+1 cuts the stage-j tower
/// into r_j columns, puts s_{j,i} fresh spacer levels on top of column i and
/// stacks the columns left to right.
struct ConstructionSpec {
  std::string preset = "custom";
  std::int64_t h1 = 1;
  CutRule cut_rule;
  SpacerRule spacer_rule;
  std::optional<std::uint64_t> seed;
  int max_stage = 10;
  /// Optional upper bound on spacer mass added after max_stage, in units where
  /// the first tower's levels have width 1.
  std::optional<Rational> tail_bound;

  static ConstructionSpec staircase(std::int64_t h1, int max_stage = 10);
  static ConstructionSpec odometer(std::int64_t h1, int max_stage = 10);
  static ConstructionSpec chacon(std::int64_t h1, int max_stage = 10);
  static ConstructionSpec random(std::int64_t h1, std::int64_t cuts, std::int64_t spacer_min,
                                 std::int64_t spacer_max, std::uint64_t seed, int max_stage = 10);

  /// r_j, for 1 <= j.
  std::int64_t cuts(int j) const;
  /// (s_{j,0}, ..., s_{j,r_j - 1}), for 1 <= j.
  std::vector<std::int64_t> spacers(int j) const;

  /// Throws std::invalid_argument describing the first violated constraint.
  void validate() const;
};

/// One realized stage.  Every level of stage j has width w_j and starts at an
/// integer multiple of w_j, so levels are stored as integer "units".
struct TowerStage {
  int stage = 0;
  std::int64_t height = 0;
  Rational base_width;
  /// Measure of [0, M_j), the part of the ambient interval assembled so far.
  Rational total_measure;
  /// level_start[i]: start of T^i E_j in units of base_width.
  std::vector<std::int64_t> level_start;
  /// Inverse permutation of level_start.
  std::vector<std::int64_t> level_at_unit;

  Interval level(std::int64_t i) const;
  IntervalSet levels(std::span<const std::int64_t> indices) const;
  IntervalSet base() const;
  /// Union of all levels, i.e. [0, M_j).
  IntervalSet tower() const;
  /// Level index containing x, or -1 when x lies outside [0, M_j).
  std::int64_t level_containing(const Rational& x) const;
};

struct Occurrences {
  /// Level indices i of tower J with T^i E_J ⊆ E_k, sorted.
  std::vector<std::int64_t> levels;
  MeasureBound missing_mass;
};

/// Owns a spec plus lazily built, cached stages.
///
/// The ambient space is [0, 1): the first tower's level width is chosen so
/// that stage max_stage exactly fills the unit interval.  Stages and
/// occurrence sets are built on first use under a mutex and published as
/// immutable shared values.
class Construction {
 public:
  explicit Construction(ConstructionSpec spec);

  const ConstructionSpec& spec() const { return spec_; }
  int max_stage() const { return spec_.max_stage; }

  std::int64_t height(int j) const;
  std::int64_t cuts(int j) const { return cuts_.at(static_cast<std::size_t>(j - 1)); }
  const std::vector<std::int64_t>& spacers(int j) const {
    return spacers_.at(static_cast<std::size_t>(j - 1));
  }
  Rational base_width(int j) const;
  /// M_j relative to the ambient [0, 1).
  Rational total_measure(int j) const;
  /// M_j in units where the first tower has width-1 levels.
  Rational raw_measure(int j) const;
  /// M_{max_stage} + tail_bound in raw units, when a tail bound was supplied.
  std::optional<Rational> raw_measure_upper_bound() const;
  /// w_k / w_J = r_k r_{k+1} ... r_{J-1}.
  std::int64_t unit_ratio(int k, int J) const;

  std::shared_ptr<const TowerStage> stage(int j) const;

  /// S_k(J) via the column-offset recursion.
  std::shared_ptr<const std::vector<std::int64_t>> occurrences(int k, int J) const;
  /// S_k(J) by testing each level of tower J for containment in E_k.
  std::vector<std::int64_t> occurrences_by_containment(int k, int J) const;

  /// Stage-j level containing stage-J level i (k <= J), or -1 for spacer mass
  /// added after stage j.
  std::int64_t coarse_level(int j, int J, std::int64_t i) const;

 private:
  void check_stage(int j) const;

  ConstructionSpec spec_;
  std::vector<std::int64_t> heights_;
  std::vector<std::int64_t> cuts_;
  std::vector<std::vector<std::int64_t>> spacers_;
  BigInt norm_height_;  // h_{max_stage}

  mutable std::mutex mutex_;
  mutable std::vector<std::shared_ptr<const TowerStage>> stages_;
  mutable std::map<std::pair<int, int>, std::shared_ptr<const std::vector<std::int64_t>>> occurrences_;
};

/// Builds stage j of `spec` from scratch.  Throws std::out_of_range when j is
/// outside [1, max_stage].
TowerStage build_stage(const ConstructionSpec& spec, int j);

/// min(h_a, h_b) / max(h_a, h_b) for stages 1..J.
std::vector<Rational> height_ratio_profile(const ConstructionSpec& a, const ConstructionSpec& b,
                                           int J);

Occurrences base_occurrences(const Construction& c, int k, int J);

}  // namespace rankone
