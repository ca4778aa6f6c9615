#include "rankone/measure_bound.hpp"

#include <algorithm>
#include <stdexcept>

namespace rankone {

MeasureBound::MeasureBound(Rational lo, Rational hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (lo_ < 0 || hi_ < lo_)
    throw std::invalid_argument("invalid measure bound [" + to_string(lo_) + ", " +
                                to_string(hi_) + "]");
}

MeasureBound MeasureBound::scaled(const Rational& factor) const {
  if (factor < 0) throw std::invalid_argument("measure bound scaled by a negative factor");
  return {lo_ * factor, hi_ * factor};
}

MeasureBound& MeasureBound::operator+=(const MeasureBound& other) {
  lo_ += other.lo_;
  hi_ += other.hi_;
  return *this;
}

MeasureBound distance_bound(const Rational& lo_a, const Rational& hi_a, const Rational& lo_b,
                            const Rational& hi_b) {
  // Intervals [lo_a, hi_a] and [lo_b, hi_b].
  Rational far = std::max(abs(Rational(hi_a - lo_b)), abs(Rational(hi_b - lo_a)));
  Rational near = 0;
  if (hi_a < lo_b) near = lo_b - hi_a;
  else if (hi_b < lo_a) near = lo_a - hi_b;
  return {near, far};
}

}  // namespace rankone
