#pragma once

#include <utility>
#include <vector>

#include "rankone/interval_set.hpp"

namespace rankone {

/// Finitely-valued function that is zero off a finite union of intervals.
///
/// Stored grouped by value: one support set per distinct nonzero value, sorted
/// by value, so supports are pairwise disjoint and the representation is
/// unique for a given function.
class StepFunction {
 public:
  struct Piece {
    IntervalSet support;
    Rational value;
    friend bool operator==(const Piece&, const Piece&) = default;
  };

  StepFunction() = default;

  static StepFunction indicator(const IntervalSet& set, const Rational& value = 1);
  /// Sum of value_i * indicator(set_i); the sets may overlap.
  static StepFunction weighted_sum(const std::vector<std::pair<IntervalSet, Rational>>& terms);

  const std::vector<Piece>& pieces() const { return pieces_; }
  bool is_zero() const { return pieces_.empty(); }

  Rational value_at(const Rational& x) const;
  Rational integral() const;
  Rational sup_abs() const;
  IntervalSet support() const;

  StepFunction scaled(const Rational& factor) const;
  friend StepFunction operator+(const StepFunction& f, const StepFunction& g);
  friend StepFunction operator-(const StepFunction& f, const StepFunction& g);
  friend bool operator==(const StepFunction&, const StepFunction&) = default;

 private:
  std::vector<Piece> pieces_;
};

/// Exact Lebesgue inner product ∫ f·g.
Rational l2_inner(const StepFunction& f, const StepFunction& g);

}  // namespace rankone
