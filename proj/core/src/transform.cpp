#include "rankone/transform.hpp"

#include <algorithm>

namespace rankone {

namespace {

void sort_by_source(std::vector<TranslationPiece>& pieces) {
  std::sort(pieces.begin(), pieces.end(),
            [](const TranslationPiece& a, const TranslationPiece& b) { return a.source.lo < b.source.lo; });
}

}  // namespace

PiecewiseTranslation::PiecewiseTranslation(std::vector<TranslationPiece> pieces, Interval ambient)
    : pieces_(std::move(pieces)), ambient_(std::move(ambient)) {
  std::erase_if(pieces_, [](const TranslationPiece& p) { return p.source.empty(); });
  sort_by_source(pieces_);
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const auto& src = pieces_[i].source;
    if (src.lo < ambient_.lo || src.hi > ambient_.hi)
      throw std::invalid_argument("translation source leaves the ambient interval");
    if (i > 0 && src.lo < pieces_[i - 1].source.hi)
      throw std::invalid_argument("translation sources overlap");
  }
  std::vector<Interval> images;
  images.reserve(pieces_.size());
  for (const auto& p : pieces_) images.push_back({p.source.lo + p.offset, p.source.hi + p.offset});
  std::sort(images.begin(), images.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (images[i].lo < ambient_.lo || images[i].hi > ambient_.hi)
      throw std::invalid_argument("translation image leaves the ambient interval");
    if (i > 0 && images[i].lo < images[i - 1].hi) throw std::invalid_argument("translation images overlap");
  }
}

IntervalSet PiecewiseTranslation::domain() const {
  std::vector<Interval> parts;
  for (const auto& p : pieces_) parts.push_back(p.source);
  return IntervalSet::canonicalize(std::move(parts));
}

IntervalSet PiecewiseTranslation::range() const {
  std::vector<Interval> parts;
  for (const auto& p : pieces_) parts.push_back({p.source.lo + p.offset, p.source.hi + p.offset});
  return IntervalSet::canonicalize(std::move(parts));
}

Rational PiecewiseTranslation::defined_measure() const {
  Rational total = 0;
  for (const auto& p : pieces_) total += p.source.length();
  return total;
}

IntervalSet PiecewiseTranslation::undefined_set() const {
  return set_difference(IntervalSet::of(ambient_), domain());
}

std::optional<Rational> PiecewiseTranslation::apply(const Rational& x) const {
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x,
                             [](const Rational& v, const TranslationPiece& p) { return v < p.source.lo; });
  if (it == pieces_.begin()) return std::nullopt;
  --it;
  if (!it->source.contains(x)) return std::nullopt;
  return Rational(x + it->offset);
}

PiecewiseTranslation PiecewiseTranslation::inverse() const {
  std::vector<TranslationPiece> inv;
  inv.reserve(pieces_.size());
  for (const auto& p : pieces_) {
    inv.push_back({{p.source.lo + p.offset, p.source.hi + p.offset}, Rational(-p.offset)});
  }
  return PiecewiseTranslation(std::move(inv), ambient_);
}

PiecewiseTranslation realize(const Construction& c, int J) {
  auto st = c.stage(J);
  std::vector<TranslationPiece> pieces;
  pieces.reserve(static_cast<std::size_t>(st->height));
  for (std::int64_t i = 0; i + 1 < st->height; ++i) {
    const auto step = st->level_start[static_cast<std::size_t>(i + 1)] - st->level_start[static_cast<std::size_t>(i)];
    pieces.push_back({st->level(i), st->base_width * step});
  }
  return PiecewiseTranslation(std::move(pieces), {Rational(0), Rational(1)});
}

namespace {

int suggest_stage(const Construction& c, std::int64_t steps) {
  // Continue the height recurrence past max_stage when needed.
  const auto& spec = c.spec();
  BigInt h = static_cast<long>(spec.h1);
  int j = 1;
  try {
    while (h <= steps && j < 64) {
      BigInt s = 0;
      for (auto x : spec.spacers(j)) s += static_cast<long>(x);
      h = h * static_cast<long>(spec.cuts(j)) + s;
      ++j;
    }
  } catch (const std::out_of_range&) {
    return std::max(j, c.max_stage() + 1);  // explicit rule lists end here
  }
  return j;
}

}  // namespace

OrbitPoint apply_power(const Construction& c, const OrbitPoint& x, std::int64_t n) {
  if (x.x < 0 || x.x >= 1)
    throw std::invalid_argument("orbit point " + to_string(x.x) + " lies outside the ambient [0, 1)");
  if (n == 0) return x;
  for (int J = std::max(1, x.stage); J <= c.max_stage(); ++J) {
    auto st = c.stage(J);
    const std::int64_t i = st->level_containing(x.x);
    if (i < 0) continue;  // still unassembled spacer mass at stage J
    const std::int64_t target = i + n;
    if (target < 0 || target >= st->height) continue;
    const auto shift = st->level_start[static_cast<std::size_t>(target)] - st->level_start[static_cast<std::size_t>(i)];
    OrbitPoint out;
    out.x = x.x + st->base_width * shift;
    out.refinements = x.refinements + (J - std::max(1, x.stage));
    out.stage = J;
    return out;
  }
  const std::int64_t steps = n < 0 ? -n : n;
  throw OrbitEscaped("orbit of " + to_string(x.x) + " over " + std::to_string(n) +
                         " steps leaves the stage-" + std::to_string(c.max_stage()) + " tower",
                     c.max_stage(), std::max(suggest_stage(c, steps), c.max_stage() + 1));
}

SetImage image_set(const PiecewiseTranslation& pt, const IntervalSet& a, Direction direction) {
  const PiecewiseTranslation inverse = direction == Direction::Backward ? pt.inverse() : pt;
  const auto& pieces = inverse.pieces();
  std::vector<Interval> moved;
  Rational moved_measure = 0;
  for (const auto& iv : a.intervals()) {
    auto it = std::upper_bound(pieces.begin(), pieces.end(), iv.lo,
                               [](const Rational& v, const TranslationPiece& p) { return v < p.source.lo; });
    if (it != pieces.begin()) --it;
    for (; it != pieces.end() && it->source.lo < iv.hi; ++it) {
      const Rational& lo = std::max(iv.lo, it->source.lo);
      const Rational& hi = std::min(iv.hi, it->source.hi);
      if (lo < hi) {
        moved.push_back({lo + it->offset, hi + it->offset});
        moved_measure += hi - lo;
      }
    }
  }
  SetImage out;
  out.image = IntervalSet::canonicalize(std::move(moved));
  out.escaped = MeasureBound::exact(a.measure() - moved_measure);
  return out;
}

SetImage power_image(const Construction& c, const IntervalSet& a, std::int64_t n, int J) {
  auto st = c.stage(J);
  const Rational& w = st->base_width;
  std::vector<Interval> moved;
  Rational escaped = 0;
  for (const auto& iv : a.intervals()) {
    if (iv.lo < 0 || iv.hi > 1) throw std::invalid_argument("set leaves the ambient interval [0, 1)");
    // Mass beyond [0, M_J) is not yet stacked at stage J.
    if (iv.hi > st->total_measure) {
      const Rational& from = std::max(iv.lo, st->total_measure);
      escaped += iv.hi - from;
    }
    if (iv.lo >= st->total_measure) continue;
    const Rational hi = std::min(iv.hi, st->total_measure);
    const std::int64_t first = floor_of(Rational(iv.lo / w)).get_si();
    const std::int64_t last = ceil_of(Rational(hi / w)).get_si();
    for (std::int64_t u = first; u < last; ++u) {
      const Rational unit_lo = w * u;
      const Rational unit_hi = unit_lo + w;
      const Rational& lo = std::max(iv.lo, unit_lo);
      const Rational& top = std::min(hi, unit_hi);
      if (!(lo < top)) continue;
      const std::int64_t level = st->level_at_unit[static_cast<std::size_t>(u)];
      const std::int64_t target = level + n;
      if (target < 0 || target >= st->height) {
        escaped += top - lo;
        continue;
      }
      const Rational shift = w * (st->level_start[static_cast<std::size_t>(target)] - u);
      moved.push_back({lo + shift, top + shift});
    }
  }
  return {IntervalSet::canonicalize(std::move(moved)), MeasureBound::exact(escaped)};
}

std::vector<std::int64_t> orbit_levels(const Construction& c, const Rational& x0, std::int64_t count,
                                       std::int64_t stride, int j, int J) {
  if (count < 0) throw std::invalid_argument("orbit length must be nonnegative");
  if (stride < 1) throw std::invalid_argument("orbit stride must be positive");
  if (x0 < 0 || x0 >= 1) throw std::invalid_argument("orbit start lies outside [0, 1)");
  if (j > J) throw std::invalid_argument("orbit_levels requires j <= J");
  const std::int64_t span = count == 0 ? 0 : stride * (count - 1);
  for (int s = std::max(j, J); s <= c.max_stage(); ++s) {
    auto st = c.stage(s);
    const std::int64_t i0 = st->level_containing(x0);
    if (i0 < 0 || i0 + span >= st->height) continue;
    auto coarse = c.stage(j);
    const std::int64_t ratio = c.unit_ratio(j, s);
    std::vector<std::int64_t> out(static_cast<std::size_t>(count));
    for (std::int64_t n = 0; n < count; ++n) {
      const std::int64_t unit = st->level_start[static_cast<std::size_t>(i0 + stride * n)] / ratio;
      out[static_cast<std::size_t>(n)] =
          unit < coarse->height ? coarse->level_at_unit[static_cast<std::size_t>(unit)] : -1;
    }
    return out;
  }
  throw OrbitEscaped("orbit of " + to_string(x0) + " over " + std::to_string(span) +
                         " steps needs a stage beyond max_stage " + std::to_string(c.max_stage()),
                     c.max_stage(), std::max(suggest_stage(c, span), c.max_stage() + 1));
}

}  // namespace rankone
