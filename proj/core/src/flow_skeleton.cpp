#include "rankone/flow_skeleton.hpp"

#include <set>
#include <stdexcept>

#include "rankone/transform.hpp"

namespace rankone {

Rational FlowSkeletonSpec::alpha() const {
  return make_rational(static_cast<long>(alpha_num), static_cast<long>(alpha_den));
}

void FlowSkeletonSpec::validate() const {
  base.validate();
  if (grid_inverse < 1) throw std::invalid_argument("grid inverse q must be a positive integer");
  if (alpha_den < 1 || alpha_num <= alpha_den) throw std::invalid_argument("alpha = p/q' needs p > q' >= 1");
}

ThickenedBase thickened_base(const Construction& c, std::int64_t q, int j) {
  auto st = c.stage(j);
  if (q < 0) throw std::invalid_argument("thickening must be nonnegative");
  if (q + 1 > st->height)
    throw std::invalid_argument("thickening q+1=" + std::to_string(q + 1) + " exceeds tower height " +
                                std::to_string(st->height));
  ThickenedBase out;
  out.j = j;
  out.q = q;
  std::vector<std::int64_t> idx;
  for (std::int64_t w = 0; w <= q; ++w) idx.push_back(w);
  out.set = st->levels(idx);
  out.measure = out.set.measure();
  out.coarse_height = q == 0 ? st->height : st->height / q;
  return out;
}

ThickenedBase thickened_base(const FlowSkeletonSpec& fspec, const Construction& c, int j) {
  fspec.validate();
  return thickened_base(c, fspec.grid_inverse, j);
}

WindowedReturn windowed_return_flow(const Construction& c, std::int64_t q, int j, int J, std::int64_t z_lo,
                                    std::int64_t z_hi, int threads) {
  if (z_lo < 0 || z_hi < z_lo) throw std::invalid_argument("window range must satisfy 0 <= z_lo <= z_hi");
  const auto profile = return_profile(c, j, J, z_hi + q, threads);
  auto all = window_sums(profile, q);
  WindowedReturn out;
  bool first = true;
  for (auto z = z_lo; z <= z_hi; ++z) {
    const auto& v = all.at(z);
    if (first) {
      out.max = v;
      first = false;
    } else {
      out.max = MeasureBound(std::max(out.max.lo(), v.lo()), std::max(out.max.hi(), v.hi()));
    }
    out.windows.emplace(z, v);
  }
  return out;
}

MeasureBound thickened_conditional(const Construction& c, std::int64_t q, int j, int J, std::int64_t z) {
  const auto e1 = thickened_base(c, q, j);
  auto st = c.stage(j);
  const auto img = power_image(c, st->base(), z, J);
  const Rational lo = intersection_measure(e1.set, img.image);
  const Rational room = e1.measure - lo;
  const Rational hi = lo + std::min(img.escaped.hi(), room);
  return MeasureBound(lo / st->base_width, hi / st->base_width);
}

std::vector<BlockIndex> band_blocks(const BandQuery& query, std::int64_t height) {
  if (query.p < 1 || query.q_prime < 1) throw std::invalid_argument("band slope p/q' needs p, q' >= 1");
  if (query.q < 0) throw std::invalid_argument("grid inverse q must be nonnegative");
  if (query.offset < 0 || query.offset >= height)
    throw std::invalid_argument("band offset " + std::to_string(query.offset) + " lies outside the tower [0, " +
                                std::to_string(height) + ")");
  if (query.side == BandSide::Left && query.offset < 1)
    throw std::invalid_argument("left bands start at offset v = 1");
  std::set<BlockIndex> out;
  const auto inside = [&](std::int64_t a, std::int64_t b) { return a >= 0 && a < height && b >= 0 && b < height; };
  for (std::int64_t h = 0; h <= query.q; ++h) {
    if (query.side == BandSide::Right) {
      for (std::int64_t z = 0; z <= height - query.offset; ++z) {
        const std::int64_t a = query.p * z + query.offset, b = query.q_prime * z + h;
        if (a >= height || b >= height) break;
        out.insert({a, b});
      }
    } else {
      const std::int64_t extent = query.extent < 0 ? height - 1 : query.extent;
      for (std::int64_t z = 0; z <= extent; ++z) {
        const std::int64_t a = query.p * z, b = query.q_prime * z + h + query.offset;
        if (!inside(a, b)) break;
        out.insert({a, b});
      }
    }
  }
  return {out.begin(), out.end()};
}

Rational band_masses(const BlockMassMatrix& m, const BandQuery& query) {
  if (m.rows() != m.cols()) throw std::invalid_argument("band masses need a square block matrix");
  Rational s = 0;
  for (const auto& z : band_blocks(query, m.rows())) s += m.at(z);
  return s;
}

BlockMassMatrix coarse_blocks(const BlockMassMatrix& m, std::int64_t q) {
  if (q < 1) throw std::invalid_argument("coarse cells need q >= 1");
  const std::int64_t rows = (m.rows() + q - 1) / q, cols = (m.cols() + q - 1) / q;
  BlockMassMatrix out(m.j(), rows, cols);
  out.kind = m.kind;
  out.resolution = m.resolution;
  out.graph_shift = m.graph_shift;
  out.samples = m.samples;
  out.seeds = m.seeds;
  out.residual = m.residual;
  out.uncertain_mass = m.uncertain_mass;
  out.first_base = m.first_base * static_cast<long>(q);
  out.second_base = m.second_base * static_cast<long>(q);
  std::vector<Rational> acc(static_cast<std::size_t>(rows * cols));
  for (std::int64_t a = 0; a < m.rows(); ++a)
    for (std::int64_t b = 0; b < m.cols(); ++b) acc[static_cast<std::size_t>((a / q) * cols + b / q)] += m.at(a, b);
  for (std::int64_t a = 0; a < rows; ++a)
    for (std::int64_t b = 0; b < cols; ++b) out.set(a, b, acc[static_cast<std::size_t>(a * cols + b)]);
  for (std::int64_t a = 0; a < m.rows(); ++a)
    out.first_stray[static_cast<std::size_t>(a / q)] += m.first_stray[static_cast<std::size_t>(a)];
  for (std::int64_t b = 0; b < m.cols(); ++b)
    out.second_stray[static_cast<std::size_t>(b / q)] += m.second_stray[static_cast<std::size_t>(b)];
  return out;
}

}  // namespace rankone
