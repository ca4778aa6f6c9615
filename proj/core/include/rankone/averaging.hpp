#pragma once

#include <cstdint>
#include <map>

#include "rankone/construction.hpp"
#include "rankone/measure_bound.hpp"
#include "rankone/step_function.hpp"
#include "rankone/transform.hpp"

namespace rankone {

/// Finitely supported probability weights a^z on z >= 0.
class WeightSequence {
 public:
  /// Throws std::invalid_argument unless every weight is >= 0, every key is
  /// >= 0 and the weights sum to exactly 1.
  static WeightSequence from_map(std::map<std::int64_t, Rational> weights);
  /// Normalizes nonnegative masses with a positive total.
  static WeightSequence normalized(const std::map<std::int64_t, Rational>& masses);
  static WeightSequence uniform(std::int64_t n);
  static WeightSequence delta(std::int64_t z);

  const std::map<std::int64_t, Rational>& weights() const { return weights_; }
  Rational max_weight() const;

 private:
  std::map<std::int64_t, Rational> weights_;
};

/// q = 0: largest single weight.  q > 0: largest sum over a window z..z+q.
Rational flatness(const WeightSequence& w, std::int64_t q);

/// Lags b^w = Σ_z a^{z+w} a^z of P*P = Σ_w b^w T^w (two-sided, zero lags omitted).
std::map<std::int64_t, Rational> adjoint_convolution(const WeightSequence& w);

struct AverageResult {
  StepFunction value;
  /// Σ_z a^z · (measure of supp f that leaves the stage-J tower under T^z).
  MeasureBound escaped;
  Rational sup_abs_f;
};

/// P f = Σ_z a^z f∘T^{-z} (Forward) or Σ_z a^z f∘T^{z} (Backward), evaluated
/// on resolved mass at stage J.
AverageResult average_apply(const Construction& c, const WeightSequence& w, const StepFunction& f, int J,
                            Direction direction = Direction::Forward);

/// Enclosure of ‖Pf - mean‖² over an ambient space of the given measure.  The
/// escaped weight can move the integral by at most 2·sup|f|·(sup|f| + |mean|) per unit.
MeasureBound l2_deviation(const StepFunction& pf, const Rational& mean, const MeasureBound& escaped,
                          const Rational& sup_abs_f, const Rational& ambient_measure = 1);
MeasureBound l2_deviation(const AverageResult& result, const Rational& mean);

/// (P*P f, f) = Σ_w b^w (f∘T^{-w}, f), using <f∘T^{w}, f> = <f, f∘T^{-w}> for negative lags.
Rational adjoint_pairing(const Construction& c, const WeightSequence& w, const StepFunction& f, int J);

}  // namespace rankone
