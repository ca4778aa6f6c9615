#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rankone/construction.hpp"
#include "rankone/interval_set.hpp"
#include "rankone/measure_bound.hpp"

namespace rankone {

struct TranslationPiece {
  Interval source;
  Rational offset;
};

/// Partial map x -> x + offset on a finite family of disjoint source intervals.
class PiecewiseTranslation {
 public:
  /// Throws std::invalid_argument if sources or images overlap, or leave the ambient interval.
  PiecewiseTranslation(std::vector<TranslationPiece> pieces, Interval ambient);

  const std::vector<TranslationPiece>& pieces() const { return pieces_; }
  const Interval& ambient() const { return ambient_; }
  IntervalSet domain() const;
  IntervalSet range() const;
  Rational defined_measure() const;
  IntervalSet undefined_set() const;

  std::optional<Rational> apply(const Rational& x) const;
  /// Swapped source/image with negated offsets.
  PiecewiseTranslation inverse() const;

 private:
  std::vector<TranslationPiece> pieces_;  // sorted by source.lo
  Interval ambient_;
};

/// T at stage J: level i maps onto level i+1 for i < h_J - 1.
PiecewiseTranslation realize(const Construction& c, int J);

struct OrbitPoint {
  Rational x;
  /// Number of stage escalations performed so far.
  int refinements = 0;
  /// Stage the point was last resolved at.
  int stage = 1;
};

/// The orbit needs a stage beyond max_stage.
class OrbitEscaped : public std::runtime_error {
 public:
  OrbitEscaped(const std::string& what, int max_stage, int suggested_stage)
      : std::runtime_error(what), max_stage_(max_stage), suggested_stage_(suggested_stage) {}
  int max_stage() const { return max_stage_; }
  /// Smallest stage beyond max_stage whose height exceeds the requested step
  /// count.  A lower bound on the budget that would suffice.
  int suggested_stage() const { return suggested_stage_; }

 private:
  int max_stage_;
  int suggested_stage_;
};

/// Exact T^n x, escalating the stage whenever the orbit would leave the tower.
OrbitPoint apply_power(const Construction& c, const OrbitPoint& x, std::int64_t n);

enum class Direction { Forward, Backward };

struct SetImage {
  IntervalSet image;
  /// Exact measure of the part of A on which the map is undefined.
  MeasureBound escaped;
};

SetImage image_set(const PiecewiseTranslation& pt, const IntervalSet& a, Direction direction);

/// T^n A computed from stage-J level arithmetic; negative n maps backward.
SetImage power_image(const Construction& c, const IntervalSet& a, std::int64_t n, int J);

/// Stage-j level index of T^{stride*n} x0 for n = 0..count-1 (-1 off the
/// stage-j tower), resolving at the first stage >= J that holds the whole
/// orbit segment.  Throws OrbitEscaped if no stage up to max_stage does.
std::vector<std::int64_t> orbit_levels(const Construction& c, const Rational& x0, std::int64_t count,
                                       std::int64_t stride, int j, int J);

}  // namespace rankone
