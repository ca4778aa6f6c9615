#include "rankone/joinings.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "rankone/transform.hpp"

namespace rankone {

namespace {

void check_resolution(const Construction& c, int j, int J) {
  if (j < 1 || J < j || J > c.max_stage())
    throw std::out_of_range("need 1 <= j <= J <= max_stage, got j=" + std::to_string(j) + " J=" + std::to_string(J));
}

Rational fraction(std::int64_t num, std::int64_t den) {
  return make_rational(static_cast<long>(num), static_cast<long>(den));
}

// Stage-j levels of c lying inside `set`, which must be a union of stage-k levels.
std::vector<std::int64_t> measurable_levels(const Construction& c, const IntervalSet& set, int k, int j,
                                            const char* name) {
  auto coarse = c.stage(k);
  std::vector<char> in(static_cast<std::size_t>(coarse->height), 0);
  std::int64_t count = 0;
  for (std::int64_t i = 0; i < coarse->height; ++i) {
    const Rational m = intersection_measure(set, IntervalSet::of(coarse->level(i)));
    if (m == coarse->base_width) {
      in[static_cast<std::size_t>(i)] = 1;
      ++count;
    } else if (m != 0) {
      throw std::invalid_argument(std::string(name) + " is not a union of stage-" + std::to_string(k) + " levels");
    }
  }
  if (set.measure() != coarse->base_width * static_cast<long>(count))
    throw std::invalid_argument(std::string(name) + " reaches outside the stage-" + std::to_string(k) + " tower");
  std::vector<std::int64_t> out;
  const std::int64_t h = c.height(j);
  for (std::int64_t i = 0; i < h; ++i) {
    const std::int64_t up = c.coarse_level(k, j, i);
    if (up >= 0 && in[static_cast<std::size_t>(up)]) out.push_back(i);
  }
  return out;
}

}  // namespace

std::string to_string(JoiningKind kind) {
  switch (kind) {
    case JoiningKind::Product: return "product";
    case JoiningKind::Graph: return "graph";
    case JoiningKind::Empirical: return "empirical";
  }
  return "unknown";
}

BlockMassMatrix::BlockMassMatrix(int j, std::int64_t rows, std::int64_t cols)
    : first_stray(static_cast<std::size_t>(std::max<std::int64_t>(rows, 0))),
      second_stray(static_cast<std::size_t>(std::max<std::int64_t>(cols, 0))),
      j_(j),
      rows_(rows),
      cols_(cols),
      masses_(static_cast<std::size_t>(std::max<std::int64_t>(rows * cols, 0))) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("block matrix needs positive dimensions");
}

const Rational& BlockMassMatrix::at(std::int64_t z1, std::int64_t z2) const {
  if (z1 < 0 || z1 >= rows_ || z2 < 0 || z2 >= cols_)
    throw std::out_of_range("block (" + std::to_string(z1) + "," + std::to_string(z2) + ") outside the matrix");
  return masses_[static_cast<std::size_t>(z1 * cols_ + z2)];
}

void BlockMassMatrix::set(std::int64_t z1, std::int64_t z2, Rational mass) {
  at(z1, z2);
  masses_[static_cast<std::size_t>(z1 * cols_ + z2)] = std::move(mass);
}

Rational BlockMassMatrix::block_total() const {
  Rational s = 0;
  for (const auto& m : masses_) s += m;
  return s;
}

Rational BlockMassMatrix::row_sum(std::int64_t z1) const {
  Rational s = 0;
  for (std::int64_t z2 = 0; z2 < cols_; ++z2) s += at(z1, z2);
  return s;
}

Rational BlockMassMatrix::col_sum(std::int64_t z2) const {
  Rational s = 0;
  for (std::int64_t z1 = 0; z1 < rows_; ++z1) s += at(z1, z2);
  return s;
}

Rational BlockMassMatrix::row_marginal(std::int64_t z1) const {
  return row_sum(z1) + first_stray.at(static_cast<std::size_t>(z1));
}

Rational BlockMassMatrix::col_marginal(std::int64_t z2) const {
  return col_sum(z2) + second_stray.at(static_cast<std::size_t>(z2));
}

BlockMassMatrix product_blocks(const Construction& first, const Construction& second, int j, int J) {
  check_resolution(first, j, J);
  check_resolution(second, j, J);
  BlockMassMatrix m(j, first.height(j), second.height(j));
  m.kind = JoiningKind::Product;
  m.resolution = J;
  m.first_base = first.base_width(j);
  m.second_base = second.base_width(j);
  const Rational mass = m.first_base * m.second_base;
  for (std::int64_t a = 0; a < m.rows(); ++a)
    for (std::int64_t b = 0; b < m.cols(); ++b) m.set(a, b, mass);
  m.residual = 1 - m.block_total();
  for (auto& s : m.first_stray) s = m.first_base * (1 - second.total_measure(j));
  for (auto& s : m.second_stray) s = m.second_base * (1 - first.total_measure(j));
  return m;
}

BlockMassMatrix graph_blocks(const Construction& c, std::int64_t k, int j, int J) {
  check_resolution(c, j, J);
  const std::int64_t h = c.height(j);
  const std::int64_t hJ = c.height(J);
  const auto occ = c.occurrences(j, J);
  std::vector<char> member(static_cast<std::size_t>(hJ), 0);
  for (auto p : *occ) member[static_cast<std::size_t>(p)] = 1;

  // overlap[d] = #{p in S : p + d in S}, d = z1 - z2 - k.
  const std::int64_t d_lo = -(h - 1) - k, d_hi = (h - 1) - k;
  std::vector<std::int64_t> overlap(static_cast<std::size_t>(d_hi - d_lo + 1), 0);
  for (std::int64_t d = d_lo; d <= d_hi; ++d) {
    std::int64_t n = 0;
    for (auto p : *occ) {
      const std::int64_t q = p + d;
      if (q >= 0 && q < hJ && member[static_cast<std::size_t>(q)]) ++n;
    }
    overlap[static_cast<std::size_t>(d - d_lo)] = n;
  }
  // escape[z2] = #{p in S : p + z2 + k outside [0, h_J)}.
  std::vector<std::int64_t> escape(static_cast<std::size_t>(h), 0);
  for (std::int64_t z2 = 0; z2 < h; ++z2)
    for (auto p : *occ)
      if (p + z2 + k < 0 || p + z2 + k >= hJ) ++escape[static_cast<std::size_t>(z2)];

  BlockMassMatrix m(j, h, h);
  m.kind = JoiningKind::Graph;
  m.resolution = J;
  m.graph_shift = k;
  m.first_base = m.second_base = c.base_width(j);
  const Rational wJ = c.base_width(J);
  Rational slack = 0;
  for (std::int64_t z1 = 0; z1 < h; ++z1)
    for (std::int64_t z2 = 0; z2 < h; ++z2) {
      const std::int64_t lo = overlap[static_cast<std::size_t>(z1 - z2 - k - d_lo)];
      m.set(z1, z2, wJ * static_cast<long>(lo));
      const std::int64_t room = static_cast<std::int64_t>(occ->size()) - lo;
      slack += wJ * static_cast<long>(std::min(escape[static_cast<std::size_t>(z2)], room));
    }
  m.residual = 1 - m.block_total();
  m.uncertain_mass = std::min(slack, m.residual);
  // Both marginals are μ, so each stray is the complement of its row or column.
  for (std::int64_t z = 0; z < h; ++z) {
    m.first_stray[static_cast<std::size_t>(z)] = m.first_base - m.row_sum(z);
    m.second_stray[static_cast<std::size_t>(z)] = m.second_base - m.col_sum(z);
  }
  return m;
}

namespace {

std::pair<std::vector<std::int64_t>, std::vector<std::int64_t>> orbit_pair(const Construction& first,
                                                                           const Construction& second,
                                                                           const OrbitSeed& seed,
                                                                           std::int64_t count, int j, int J) {
  return {orbit_levels(first, seed.first, count, seed.first_stride, j, J),
          orbit_levels(second, seed.second, count, seed.second_stride, j, J)};
}

std::string seed_label(const OrbitSeed& seed) {
  return to_string(seed.first) + "," + to_string(seed.second) + ";" + std::to_string(seed.first_stride) + "," +
         std::to_string(seed.second_stride);
}

}  // namespace

BlockMassMatrix empirical_joining(const Construction& first, const Construction& second, const OrbitSeed& seed,
                                  std::int64_t samples, int j, int J) {
  check_resolution(first, j, J);
  check_resolution(second, j, J);
  if (samples < 1) throw std::invalid_argument("empirical joining needs N >= 1");
  const auto [la, lb] = orbit_pair(first, second, seed, samples, j, J);
  const std::int64_t rows = first.height(j), cols = second.height(j);
  std::vector<std::int64_t> counts(static_cast<std::size_t>(rows * cols), 0);
  std::int64_t off = 0;
  std::vector<std::int64_t> stray_a(static_cast<std::size_t>(rows), 0), stray_b(static_cast<std::size_t>(cols), 0);
  for (std::size_t n = 0; n < la.size(); ++n) {
    if (la[n] < 0 || lb[n] < 0) {
      ++off;
      if (la[n] >= 0) ++stray_a[static_cast<std::size_t>(la[n])];
      if (lb[n] >= 0) ++stray_b[static_cast<std::size_t>(lb[n])];
      continue;
    }
    ++counts[static_cast<std::size_t>(la[n] * cols + lb[n])];
  }
  BlockMassMatrix m(j, rows, cols);
  m.kind = JoiningKind::Empirical;
  m.resolution = J;
  m.samples = samples;
  m.seeds = seed_label(seed);
  m.first_base = first.base_width(j);
  m.second_base = second.base_width(j);
  for (std::int64_t a = 0; a < rows; ++a)
    for (std::int64_t b = 0; b < cols; ++b) {
      const std::int64_t n = counts[static_cast<std::size_t>(a * cols + b)];
      if (n) m.set(a, b, fraction(n, samples));
    }
  m.residual = fraction(off, samples);
  for (std::int64_t a = 0; a < rows; ++a) m.first_stray[static_cast<std::size_t>(a)] = fraction(stray_a[static_cast<std::size_t>(a)], samples);
  for (std::int64_t b = 0; b < cols; ++b) m.second_stray[static_cast<std::size_t>(b)] = fraction(stray_b[static_cast<std::size_t>(b)], samples);
  return m;
}

LightBlockReport light_blocks(const BlockMassMatrix& m, const Rational& epsilon) {
  if (epsilon <= 0) throw std::invalid_argument("epsilon must be positive");
  LightBlockReport r;
  r.epsilon = epsilon;
  r.j = m.j();
  r.covered_mass = 0;
  const Rational threshold = epsilon * m.second_base;
  for (std::int64_t a = 0; a < m.rows(); ++a)
    for (std::int64_t b = 0; b < m.cols(); ++b) {
      const Rational& v = m.at(a, b);
      if (v < threshold) {
        r.light_set.push_back({a, b});
        r.covered_mass += v;
      }
    }
  return r;
}

DiEstimate di_estimate(const std::vector<LightBlockReport>& reports) {
  std::map<Rational, Rational> best;
  std::set<int> stages;
  for (const auto& r : reports) {
    stages.insert(r.j);
    auto [it, fresh] = best.emplace(r.epsilon, r.covered_mass);
    if (!fresh && r.covered_mass > it->second) it->second = r.covered_mass;
  }
  if (stages.size() < 2) throw std::invalid_argument("di estimate needs at least two distinct stages j");
  if (best.size() < 2) throw std::invalid_argument("di estimate needs at least two distinct epsilon values");
  DiEstimate out;
  for (auto it = best.rbegin(); it != best.rend(); ++it) out.per_epsilon.emplace_back(it->first, it->second);
  out.proxy = out.per_epsilon.front().second;
  for (const auto& [eps, v] : out.per_epsilon) out.proxy = std::min(out.proxy, v);
  return out;
}

std::vector<DispersionRow> dispersion_experiment(const Construction& first, const Construction& second,
                                                 const OrbitSeed& seed, std::int64_t samples, int j, int J,
                                                 const BlockIndex& source, const std::vector<std::int64_t>& shifts) {
  check_resolution(first, j, J);
  check_resolution(second, j, J);
  if (samples < 1) throw std::invalid_argument("dispersion needs N >= 1");
  std::int64_t reach = 0;
  for (auto n : shifts) {
    if (n < 0) throw std::invalid_argument("dispersion shifts must be nonnegative");
    reach = std::max(reach, n);
  }
  const auto [la, lb] = orbit_pair(first, second, seed, samples + reach, j, J);
  std::vector<std::int64_t> times;
  for (std::int64_t m = 0; m < samples; ++m)
    if (la[static_cast<std::size_t>(m)] == source.z1 && lb[static_cast<std::size_t>(m)] == source.z2)
      times.push_back(m);
  if (times.empty())
    throw std::invalid_argument("the orbit never visits block (" + std::to_string(source.z1) + "," +
                                std::to_string(source.z2) + ") within N steps");
  const auto count = static_cast<std::int64_t>(times.size());
  std::vector<DispersionRow> out;
  for (auto n : shifts) {
    DispersionRow row;
    row.n = n;
    row.conditioning_count = count;
    std::map<BlockIndex, std::int64_t> hist;
    std::int64_t off = 0;
    for (auto m : times) {
      const auto a = la[static_cast<std::size_t>(m + n)], b = lb[static_cast<std::size_t>(m + n)];
      if (a < 0 || b < 0)
        ++off;
      else
        ++hist[{a, b}];
    }
    std::int64_t top = 0;
    for (const auto& [z, v] : hist) {
      row.masses.emplace(z, fraction(v, count));
      top = std::max(top, v);
    }
    row.off_tower = fraction(off, count);
    row.max_block_mass = fraction(top, count);
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<BlockIndex> ColumnSpec::members(std::int64_t shift) const {
  std::vector<BlockIndex> out;
  out.reserve(static_cast<std::size_t>(length));
  for (std::int64_t i = 0; i < length; ++i) out.push_back({w + i, i + shift});
  return out;
}

namespace {

ColumnSpec make_column(const BlockMassMatrix& m, const Rational& delta, std::int64_t w) {
  if (delta <= 0 || delta >= 1) throw std::invalid_argument("delta must lie in (0, 1)");
  ColumnSpec col;
  col.delta = delta;
  col.w = w;
  col.j = m.j();
  col.length = static_cast<std::int64_t>(floor_of(Rational(delta * static_cast<long>(m.cols()))).get_si()) + 1;
  if (w < 0 || w + col.length > m.rows())
    throw std::invalid_argument("column offset w=" + std::to_string(w) + " does not fit the first tower");
  return col;
}

bool shift_fits(const BlockMassMatrix& m, const ColumnSpec& col, std::int64_t h) {
  return h >= 0 && h + col.length <= m.cols();
}

}  // namespace

FSet columns_and_F(const BlockMassMatrix& m, const Rational& delta, std::int64_t w,
                   std::vector<std::int64_t> shifts) {
  FSet f;
  f.column = make_column(m, delta, w);
  std::sort(shifts.begin(), shifts.end());
  shifts.erase(std::unique(shifts.begin(), shifts.end()), shifts.end());
  if (shifts.empty()) throw std::invalid_argument("the shift set D_j is empty");
  std::map<std::int64_t, Rational> masses;
  f.mass = 0;
  for (auto h : shifts) {
    if (!shift_fits(m, f.column, h))
      throw std::invalid_argument("shift h=" + std::to_string(h) + " moves the column off the second tower");
    Rational s = 0;
    for (const auto& z : f.column.members(h)) s += m.at(z);
    f.column_masses.push_back(s);
    masses.emplace(h, s);
    f.mass += s;
  }
  if (f.mass == 0) throw std::invalid_argument("the set F carries zero joining mass; conditioning is undefined");
  f.shifts = std::move(shifts);
  f.weights = WeightSequence::normalized(masses);
  f.flatness = flatness(f.weights, 0);
  return f;
}

std::vector<std::int64_t> light_column_shifts(const BlockMassMatrix& m, const Rational& delta, std::int64_t w,
                                              const Rational& epsilon) {
  if (epsilon <= 0) throw std::invalid_argument("epsilon must be positive");
  const ColumnSpec col = make_column(m, delta, w);
  const Rational threshold = epsilon * m.second_base;
  std::vector<std::int64_t> out;
  for (std::int64_t h = 0; shift_fits(m, col, h); ++h) {
    bool light = true;
    for (const auto& z : col.members(h))
      if (!(m.at(z) < threshold)) {
        light = false;
        break;
      }
    if (light) out.push_back(h);
  }
  return out;
}

TrivializationRecord trivialization_check(const BlockMassMatrix& m, const Construction& first,
                                          const Construction& second, const FSet& f, const IntervalSet& a,
                                          const IntervalSet& b, int k, int J) {
  const int j = m.j();
  if (k < 1 || k > j) throw std::invalid_argument("A and B must be measurable at a stage k <= j");
  check_resolution(first, j, J);
  check_resolution(second, j, J);
  if (first.height(j) != m.rows() || second.height(j) != m.cols())
    throw std::invalid_argument("block matrix does not match the given constructions");

  const auto a_levels = measurable_levels(first, a, k, j, "A");
  const auto b_levels = measurable_levels(second, b, k, j, "B");
  std::vector<char> in_a(static_cast<std::size_t>(m.rows()), 0), in_b(static_cast<std::size_t>(m.cols()), 0);
  for (auto i : a_levels) in_a[static_cast<std::size_t>(i)] = 1;
  for (auto i : b_levels) in_b[static_cast<std::size_t>(i)] = 1;

  TrivializationRecord r;
  r.flatness = f.flatness;
  r.target = a.measure() * b.measure();

  Rational num = 0;
  for (auto h : f.shifts)
    for (const auto& z : f.column.members(h))
      if (in_a[static_cast<std::size_t>(z.z1)] && in_b[static_cast<std::size_t>(z.z2)]) num += m.at(z);
  r.conditional = num / f.mass;

  // Averaged side: λ restricted to the column C is the product measure there.
  const auto avg = average_apply(second, f.weights, StepFunction::indicator(b), J, Direction::Backward);
  auto st1 = first.stage(j);
  auto st2 = second.stage(j);
  Rational acc = 0;
  bool any = false;
  for (std::int64_t i = 0; i < f.column.length; ++i) {
    if (!in_a[static_cast<std::size_t>(f.column.w + i)]) continue;
    any = true;
    acc += l2_inner(avg.value, StepFunction::indicator(IntervalSet::of(st2->level(i))));
  }
  const Rational lambda_c = st1->base_width * st2->base_width * static_cast<long>(f.column.length);
  const Rational lo = st1->base_width * acc / lambda_c;
  const Rational slack = any ? Rational(st1->base_width * avg.escaped.hi() / lambda_c) : Rational(0);
  r.averaged = MeasureBound(lo, lo + slack);
  r.identity_gap = distance_bound(r.conditional, r.conditional, r.averaged.lo(), r.averaged.hi());

  Rational joint = 0;
  for (auto z1 : a_levels)
    for (auto z2 : b_levels) joint += m.at(z1, z2);
  r.joint = MeasureBound(joint, joint + m.uncertain_mass);
  r.gap = distance_bound(r.joint.lo(), r.joint.hi(), r.target, r.target);
  return r;
}

}  // namespace rankone
