#include "rankone/averaging.hpp"

#include <algorithm>
#include <stdexcept>

namespace rankone {

WeightSequence WeightSequence::from_map(std::map<std::int64_t, Rational> weights) {
  Rational total = 0;
  for (const auto& [z, a] : weights) {
    if (z < 0) throw std::invalid_argument("weight index must be nonnegative");
    if (a < 0) throw std::invalid_argument("weights must be nonnegative");
    total += a;
  }
  if (total != 1) throw std::invalid_argument("weights sum to " + to_string(total) + ", expected 1");
  WeightSequence out;
  out.weights_ = std::move(weights);
  return out;
}

WeightSequence WeightSequence::normalized(const std::map<std::int64_t, Rational>& masses) {
  Rational total = 0;
  for (const auto& [z, a] : masses) {
    if (a < 0) throw std::invalid_argument("masses must be nonnegative");
    total += a;
  }
  if (total == 0) throw std::invalid_argument("cannot normalize zero total mass");
  std::map<std::int64_t, Rational> w;
  for (const auto& [z, a] : masses) w.emplace(z, a / total);
  return from_map(std::move(w));
}

WeightSequence WeightSequence::uniform(std::int64_t n) {
  if (n < 1) throw std::invalid_argument("uniform weights need n >= 1");
  std::map<std::int64_t, Rational> w;
  for (std::int64_t z = 0; z < n; ++z) w.emplace(z, make_rational(1, static_cast<long>(n)));
  return from_map(std::move(w));
}

WeightSequence WeightSequence::delta(std::int64_t z) { return from_map({{z, Rational(1)}}); }

Rational WeightSequence::max_weight() const {
  Rational best = 0;
  for (const auto& [z, a] : weights_) best = std::max(best, a);
  return best;
}

Rational flatness(const WeightSequence& w, std::int64_t q) {
  if (q < 0) throw std::invalid_argument("window length must be nonnegative");
  if (q == 0) return w.max_weight();
  // Any maximal window can be slid right until it starts at a support point.
  const auto& m = w.weights();
  Rational best = 0;
  for (auto start = m.begin(); start != m.end(); ++start) {
    Rational sum = 0;
    for (auto it = start; it != m.end() && it->first <= start->first + q; ++it) sum += it->second;
    best = std::max(best, sum);
  }
  return best;
}

std::map<std::int64_t, Rational> adjoint_convolution(const WeightSequence& w) {
  std::map<std::int64_t, Rational> b;
  for (const auto& [z, az] : w.weights()) {
    for (const auto& [y, ay] : w.weights()) {
      // b^{y - z} collects a^{z + (y - z)} a^z.
      const Rational term = az * ay;
      if (term != 0) b[y - z] += term;
    }
  }
  return b;
}

AverageResult average_apply(const Construction& c, const WeightSequence& w, const StepFunction& f, int J,
                            Direction direction) {
  std::vector<std::pair<IntervalSet, Rational>> terms;
  MeasureBound escaped;
  const IntervalSet support = f.support();
  for (const auto& [z, a] : w.weights()) {
    if (a == 0) continue;
    const std::int64_t shift = direction == Direction::Forward ? z : -z;
    // f∘T^{-z} is supported on T^z(supp f) and carries the same values there.
    for (const auto& piece : f.pieces()) {
      SetImage img = power_image(c, piece.support, shift, J);
      terms.emplace_back(std::move(img.image), a * piece.value);
    }
    escaped += power_image(c, support, shift, J).escaped.scaled(a);
  }
  return {StepFunction::weighted_sum(terms), escaped, f.sup_abs()};
}

MeasureBound l2_deviation(const StepFunction& pf, const Rational& mean, const MeasureBound& escaped,
                          const Rational& sup_abs_f, const Rational& ambient_measure) {
  // ∫ (Pf - m)² = ∫ Pf² - 2m ∫ Pf + m² |X|
  const Rational resolved = l2_inner(pf, pf) - 2 * mean * pf.integral() + mean * mean * ambient_measure;
  const Rational margin = 2 * sup_abs_f * (sup_abs_f + abs(mean)) * escaped.hi();
  const Rational lo = resolved > margin ? Rational(resolved - margin) : Rational(0);
  return {lo, resolved + margin};
}

MeasureBound l2_deviation(const AverageResult& result, const Rational& mean) {
  return l2_deviation(result.value, mean, result.escaped, result.sup_abs_f);
}

Rational adjoint_pairing(const Construction& c, const WeightSequence& w, const StepFunction& f, int J) {
  Rational total = 0;
  for (const auto& [lag, b] : adjoint_convolution(w)) {
    const std::int64_t shift = lag < 0 ? -lag : lag;
    const AverageResult shifted = average_apply(c, WeightSequence::delta(shift), f, J);
    total += b * l2_inner(shifted.value, f);
  }
  return total;
}

}  // namespace rankone
