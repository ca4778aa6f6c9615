#include "rankone/construction.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace rankone {

namespace {

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_mul_overflow(a, b, &out)) throw std::overflow_error("tower height overflows int64");
  return out;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_add_overflow(a, b, &out)) throw std::overflow_error("tower height overflows int64");
  return out;
}

// Uniform draw in [lo, hi] from raw 64-bit output; rejection keeps it unbiased
// and the result identical on every standard library.
std::int64_t bounded_draw(std::mt19937_64& gen, std::int64_t lo, std::int64_t hi) {
  const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
  if (range == 0) return static_cast<std::int64_t>(gen());
  const std::uint64_t threshold = (0 - range) % range;
  std::uint64_t r;
  do {
    r = gen();
  } while (r < threshold);
  return lo + static_cast<std::int64_t>(r % range);
}

}  // namespace

ConstructionSpec ConstructionSpec::staircase(std::int64_t h1, int max_stage) {
  ConstructionSpec s;
  s.preset = "staircase";
  s.h1 = h1;
  s.cut_rule = CutRule::stage_index(0);
  s.spacer_rule = SpacerRule::staircase();
  s.max_stage = max_stage;
  return s;
}

ConstructionSpec ConstructionSpec::odometer(std::int64_t h1, int max_stage) {
  ConstructionSpec s;
  s.preset = "odometer";
  s.h1 = h1;
  s.cut_rule = CutRule::constant(2);
  s.spacer_rule = SpacerRule::none();
  s.max_stage = max_stage;
  return s;
}

ConstructionSpec ConstructionSpec::chacon(std::int64_t h1, int max_stage) {
  ConstructionSpec s;
  s.preset = "chacon";
  s.h1 = h1;
  s.cut_rule = CutRule::constant(3);
  s.spacer_rule = SpacerRule::repeated({0, 1, 0});
  s.max_stage = max_stage;
  return s;
}

ConstructionSpec ConstructionSpec::random(std::int64_t h1, std::int64_t cuts, std::int64_t spacer_min,
                                          std::int64_t spacer_max, std::uint64_t seed, int max_stage) {
  ConstructionSpec s;
  s.preset = "random";
  s.h1 = h1;
  s.cut_rule = CutRule::constant(cuts);
  s.spacer_rule = SpacerRule::random(spacer_min, spacer_max);
  s.seed = seed;
  s.max_stage = max_stage;
  return s;
}

std::int64_t ConstructionSpec::cuts(int j) const {
  if (j < 1) throw std::out_of_range("cut number requested for stage < 1");
  switch (cut_rule.kind) {
    case CutRule::Kind::Constant:
      return cut_rule.value;
    case CutRule::Kind::StageIndex:
      return j + cut_rule.value;
    case CutRule::Kind::List:
      if (static_cast<std::size_t>(j) > cut_rule.list.size())
        throw std::out_of_range("cut list has no entry for stage " + std::to_string(j));
      return cut_rule.list[static_cast<std::size_t>(j - 1)];
  }
  throw std::logic_error("unknown cut rule");
}

std::vector<std::int64_t> ConstructionSpec::spacers(int j) const {
  const std::int64_t r = cuts(j);
  switch (spacer_rule.kind) {
    case SpacerRule::Kind::Staircase: {
      std::vector<std::int64_t> s(static_cast<std::size_t>(r));
      for (std::int64_t i = 0; i < r; ++i) s[static_cast<std::size_t>(i)] = i;
      return s;
    }
    case SpacerRule::Kind::None:
      return std::vector<std::int64_t>(static_cast<std::size_t>(r), 0);
    case SpacerRule::Kind::Pattern:
      return spacer_rule.pattern;
    case SpacerRule::Kind::List:
      if (static_cast<std::size_t>(j) > spacer_rule.list.size())
        throw std::out_of_range("spacer list has no entry for stage " + std::to_string(j));
      return spacer_rule.list[static_cast<std::size_t>(j - 1)];
    case SpacerRule::Kind::Random: {
      if (!seed) throw std::invalid_argument("random spacer rule requires a seed");
      std::mt19937_64 gen(*seed);
      std::vector<std::int64_t> s;
      for (int stage = 1; stage <= j; ++stage) {
        const std::int64_t rs = cuts(stage);
        s.assign(static_cast<std::size_t>(rs), 0);
        for (auto& v : s) v = bounded_draw(gen, spacer_rule.random_min, spacer_rule.random_max);
      }
      return s;
    }
  }
  throw std::logic_error("unknown spacer rule");
}

void ConstructionSpec::validate() const {
  if (h1 < 1) throw std::invalid_argument("h1 must be a positive integer");
  if (max_stage < 1) throw std::invalid_argument("max_stage must be >= 1");
  if (spacer_rule.kind == SpacerRule::Kind::Random) {
    if (!seed) throw std::invalid_argument("random spacer rule requires an explicit seed");
    if (spacer_rule.random_min < 0 || spacer_rule.random_max < spacer_rule.random_min)
      throw std::invalid_argument("random spacer range must satisfy 0 <= min <= max");
  }
  if (tail_bound && *tail_bound < 0) throw std::invalid_argument("tail_bound must be nonnegative");
  for (int j = 1; j < max_stage; ++j) {
    const std::int64_t r = cuts(j);
    if (r < 1)
      throw std::invalid_argument("cut number r_" + std::to_string(j) + " = " + std::to_string(r) +
                                  " must be >= 1");
    const auto s = spacers(j);
    if (static_cast<std::int64_t>(s.size()) != r)
      throw std::invalid_argument("spacer vector for stage " + std::to_string(j) + " has length " +
                                  std::to_string(s.size()) + ", expected r_j = " + std::to_string(r));
    for (auto v : s) {
      if (v < 0) throw std::invalid_argument("spacer counts must be nonnegative");
    }
  }
}

Interval TowerStage::level(std::int64_t i) const {
  if (i < 0 || i >= height) throw std::out_of_range("level index out of range");
  Rational lo = base_width * level_start[static_cast<std::size_t>(i)];
  Rational hi = lo + base_width;
  return {lo, hi};
}

IntervalSet TowerStage::levels(std::span<const std::int64_t> indices) const {
  std::vector<Interval> parts;
  parts.reserve(indices.size());
  for (auto i : indices) parts.push_back(level(i));
  return IntervalSet::canonicalize(std::move(parts));
}

IntervalSet TowerStage::base() const { return IntervalSet::of(level(0)); }

IntervalSet TowerStage::tower() const { return IntervalSet::of({Rational(0), total_measure}); }

std::int64_t TowerStage::level_containing(const Rational& x) const {
  if (x < 0 || x >= total_measure) return -1;
  const BigInt unit = floor_of(Rational(x / base_width));
  return level_at_unit[static_cast<std::size_t>(unit.get_si())];
}

Construction::Construction(ConstructionSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  const int J = spec_.max_stage;
  heights_.push_back(spec_.h1);
  for (int j = 1; j < J; ++j) {
    cuts_.push_back(spec_.cuts(j));
    spacers_.push_back(spec_.spacers(j));
    std::int64_t total_spacers = 0;
    for (auto s : spacers_.back()) total_spacers = checked_add(total_spacers, s);
    heights_.push_back(checked_add(checked_mul(cuts_.back(), heights_.back()), total_spacers));
  }
  norm_height_ = BigInt(static_cast<long>(heights_.back()));
  stages_.resize(static_cast<std::size_t>(J));
}

void Construction::check_stage(int j) const {
  if (j < 1 || j > spec_.max_stage)
    throw std::out_of_range("stage " + std::to_string(j) + " is outside [1, " +
                            std::to_string(spec_.max_stage) + "] (max_stage)");
}

std::int64_t Construction::height(int j) const {
  check_stage(j);
  return heights_[static_cast<std::size_t>(j - 1)];
}

std::int64_t Construction::unit_ratio(int k, int J) const {
  check_stage(k);
  check_stage(J);
  if (k > J) throw std::invalid_argument("unit_ratio requires k <= J");
  std::int64_t out = 1;
  for (int i = k; i < J; ++i) out = checked_mul(out, cuts(i));
  return out;
}

Rational Construction::base_width(int j) const {
  check_stage(j);
  BigInt prod = 1;
  for (int i = j; i < spec_.max_stage; ++i) prod *= static_cast<long>(cuts(i));
  return make_rational(prod, norm_height_);
}

Rational Construction::total_measure(int j) const {
  return base_width(j) * static_cast<long>(height(j));
}

Rational Construction::raw_measure(int j) const {
  check_stage(j);
  BigInt prod = 1;
  for (int i = 1; i < j; ++i) prod *= static_cast<long>(cuts(i));
  return make_rational(BigInt(static_cast<long>(height(j))), prod);
}

std::optional<Rational> Construction::raw_measure_upper_bound() const {
  if (!spec_.tail_bound) return std::nullopt;
  return raw_measure(spec_.max_stage) + *spec_.tail_bound;
}

std::shared_ptr<const TowerStage> Construction::stage(int j) const {
  check_stage(j);
  std::lock_guard lock(mutex_);
  if (auto cached = stages_[static_cast<std::size_t>(j - 1)]) return cached;

  int first_missing = j;
  while (first_missing > 1 && !stages_[static_cast<std::size_t>(first_missing - 2)]) --first_missing;

  for (int s = first_missing; s <= j; ++s) {
    auto next = std::make_shared<TowerStage>();
    next->stage = s;
    next->height = height(s);
    next->base_width = base_width(s);
    next->total_measure = next->base_width * static_cast<long>(next->height);
    next->level_start.reserve(static_cast<std::size_t>(next->height));
    if (s == 1) {
      for (std::int64_t i = 0; i < next->height; ++i) next->level_start.push_back(i);
    } else {
      const TowerStage& prev = *stages_[static_cast<std::size_t>(s - 2)];
      const std::int64_t r = cuts(s - 1);
      const auto& sp = spacers(s - 1);
      std::int64_t fresh = checked_mul(prev.height, r);
      for (std::int64_t c = 0; c < r; ++c) {
        for (auto start : prev.level_start) next->level_start.push_back(start * r + c);
        for (std::int64_t k = 0; k < sp[static_cast<std::size_t>(c)]; ++k) next->level_start.push_back(fresh++);
      }
    }
    next->level_at_unit.assign(static_cast<std::size_t>(next->height), 0);
    for (std::int64_t i = 0; i < next->height; ++i)
      next->level_at_unit[static_cast<std::size_t>(next->level_start[static_cast<std::size_t>(i)])] = i;
    stages_[static_cast<std::size_t>(s - 1)] = std::move(next);
  }
  return stages_[static_cast<std::size_t>(j - 1)];
}

std::shared_ptr<const std::vector<std::int64_t>> Construction::occurrences(int k, int J) const {
  check_stage(k);
  check_stage(J);
  if (k > J) throw std::invalid_argument("occurrences require k <= J (got k=" + std::to_string(k) +
                                         ", J=" + std::to_string(J) + ")");
  std::lock_guard lock(mutex_);
  if (auto it = occurrences_.find({k, J}); it != occurrences_.end()) return it->second;

  int from = J;
  while (from > k && !occurrences_.count({k, from})) --from;
  std::shared_ptr<const std::vector<std::int64_t>> current;
  if (from == k && !occurrences_.count({k, k})) {
    current = std::make_shared<const std::vector<std::int64_t>>(std::vector<std::int64_t>{0});
    occurrences_[{k, k}] = current;
  } else {
    current = occurrences_.at({k, from});
  }

  // S_k(s+1) = union over columns c of (offset_c + S_k(s)),
  // offset_{c+1} = offset_c + h_s + s_{s,c}.
  for (int s = from; s < J; ++s) {
    auto next = std::make_shared<std::vector<std::int64_t>>();
    const std::int64_t r = cuts(s);
    const auto& sp = spacers(s);
    next->reserve(current->size() * static_cast<std::size_t>(r));
    std::int64_t offset = 0;
    for (std::int64_t c = 0; c < r; ++c) {
      for (auto p : *current) next->push_back(offset + p);
      offset += height(s) + sp[static_cast<std::size_t>(c)];
    }
    current = next;
    occurrences_[{k, s + 1}] = current;
  }
  return current;
}

std::vector<std::int64_t> Construction::occurrences_by_containment(int k, int J) const {
  if (k > J) throw std::invalid_argument("occurrences require k <= J");
  auto coarse = stage(k);
  auto fine = stage(J);
  const std::int64_t ratio = unit_ratio(k, J);
  std::vector<std::int64_t> out;
  for (std::int64_t i = 0; i < fine->height; ++i) {
    const std::int64_t unit = fine->level_start[static_cast<std::size_t>(i)] / ratio;
    if (unit < coarse->height && coarse->level_at_unit[static_cast<std::size_t>(unit)] == 0) out.push_back(i);
  }
  return out;
}

std::int64_t Construction::coarse_level(int j, int J, std::int64_t i) const {
  auto coarse = stage(j);
  auto fine = stage(J);
  const std::int64_t unit = fine->level_start.at(static_cast<std::size_t>(i)) / unit_ratio(j, J);
  if (unit >= coarse->height) return -1;
  return coarse->level_at_unit[static_cast<std::size_t>(unit)];
}

TowerStage build_stage(const ConstructionSpec& spec, int j) {
  if (j < 1 || j > spec.max_stage)
    throw std::out_of_range("stage " + std::to_string(j) + " exceeds max_stage " +
                            std::to_string(spec.max_stage));
  Construction c(spec);
  return *c.stage(j);
}

std::vector<Rational> height_ratio_profile(const ConstructionSpec& a, const ConstructionSpec& b, int J) {
  Construction ca(a), cb(b);
  std::vector<Rational> out;
  for (int j = 1; j <= J; ++j) {
    const long ha = static_cast<long>(ca.height(j));
    const long hb = static_cast<long>(cb.height(j));
    out.push_back(make_rational(std::min(ha, hb), std::max(ha, hb)));
  }
  return out;
}

Occurrences base_occurrences(const Construction& c, int k, int J) {
  if (k > J) throw std::invalid_argument("base_occurrences requires k <= J");
  return {*c.occurrences(k, J), MeasureBound::exact(0)};
}

}  // namespace rankone
