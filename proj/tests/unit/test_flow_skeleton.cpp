#include <doctest.h>

#include <map>
#include <set>

#include "rankone/flow_skeleton.hpp"
#include "rankone/transform.hpp"

using namespace rankone;

namespace {
Rational q(long n, long d) { return make_rational(n, d); }
}  // namespace

TEST_SUITE("flow_skeleton") {
  TEST_CASE("spec validation") {
    FlowSkeletonSpec f{ConstructionSpec::staircase(2), 2, 2, 1};
    CHECK_NOTHROW(f.validate());
    CHECK(f.alpha() == 2);
    f.alpha_num = 1;
    CHECK_THROWS_AS(f.validate(), std::invalid_argument);
    f.alpha_num = 3;
    f.grid_inverse = 0;
    CHECK_THROWS_AS(f.validate(), std::invalid_argument);
  }

  TEST_CASE("thickened bases") {
    Construction odo(ConstructionSpec::odometer(2));
    CHECK(thickened_base(odo, 0, 2).set == odo.stage(2)->base());
    const auto e = thickened_base(odo, 1, 2);
    CHECK(e.set == IntervalSet::canonicalize({{0, q(1, 4)}, {q(1, 2), q(3, 4)}}));
    CHECK(e.measure == q(1, 2));
    CHECK_THROWS_AS(thickened_base(odo, 4, 2), std::invalid_argument);

    for (auto spec : {ConstructionSpec::staircase(2, 6), ConstructionSpec::odometer(2, 6), ConstructionSpec::chacon(1, 6)}) {
      Construction c(spec);
      for (int j = 1; j <= 4; ++j)
        for (std::int64_t t = 0; t < c.height(j); ++t)
          CHECK(thickened_base(c, t, j).measure == c.base_width(j) * static_cast<long>(t + 1));
    }
  }

  TEST_CASE("windowed returns") {
    Construction st(ConstructionSpec::staircase(2));
    const auto w = windowed_return_flow(st, 3, 4, 6, 1, 18 - 3 - 1);
    for (const auto& [z, v] : w.windows) CHECK(v == MeasureBound::exact(0));
    CHECK(w.max == MeasureBound::exact(0));

    const auto p = return_profile(st, 3, 6, 40);
    const auto w0 = windowed_return_flow(st, 0, 3, 6, 0, 40);
    for (std::int64_t z = 0; z <= 40; ++z) CHECK(w0.windows.at(z) == p.at(z));
    CHECK_THROWS_AS(windowed_return_flow(st, 2, 3, 6, 5, 4), std::invalid_argument);
  }

  TEST_CASE("thickened conditional matches shifted window sums") {
    Construction st(ConstructionSpec::staircase(2));
    const std::int64_t t = 2;
    const auto p = return_profile(st, 3, 6, 60);
    const auto sums = window_sums(p, t);
    for (std::int64_t z = t; z <= 60; ++z) {
      const auto geo = thickened_conditional(st, t, 3, 6, z);
      CHECK(geo.lo() == sums.at(z - t).lo());
      CHECK(geo.hi() <= sums.at(z - t).hi());
    }
  }

  TEST_CASE("band membership") {
    const std::int64_t h = 18;
    BandQuery right{2, 1, 2, BandSide::Right, 3, -1};
    const auto blocks = band_blocks(right, h);
    for (const auto& b : blocks) {
      const auto z = b.z1 - 3;
      CHECK(z % 2 == 0);
      CHECK((b.z2 - z / 2 >= 0 && b.z2 - z / 2 <= 2));
    }
    CHECK_THROWS_AS(band_blocks({2, 1, 1, BandSide::Left, h, -1}, h), std::invalid_argument);
    CHECK_THROWS_AS(band_blocks({2, 1, 1, BandSide::Left, 0, -1}, h), std::invalid_argument);

    // Multiplicity over all right and left bands is at most q + 1.
    for (auto [p, qp] : {std::pair<std::int64_t, std::int64_t>{2, 1}, {3, 2}, {5, 3}})
      for (std::int64_t grid : {0, 1, 3}) {
        std::map<BlockIndex, int> cover;
        for (std::int64_t w = 0; w < h; ++w)
          for (const auto& b : band_blocks({p, qp, grid, BandSide::Right, w, -1}, h)) ++cover[b];
        for (std::int64_t v = 1; v < h; ++v)
          for (const auto& b : band_blocks({p, qp, grid, BandSide::Left, v, -1}, h)) ++cover[b];
        for (const auto& [b, n] : cover) CHECK(n <= grid + 1);
      }
  }

  TEST_CASE("band masses") {
    Construction a(ConstructionSpec::staircase(2));
    const auto m = product_blocks(a, a, 3, 3);
    const BandQuery band{2, 1, 1, BandSide::Right, 0, -1};
    CHECK(band_masses(m, band) == a.base_width(3) * a.base_width(3) *
                                      static_cast<long>(band_blocks(band, m.rows()).size()));

    // Diagonal coupling of (S², S): the right band at w = 0 counts co-located times.
    const std::int64_t N = 4000;
    const auto e = empirical_joining(a, a, {0, 0, 2, 1}, N, 3, 7);
    const auto l2 = orbit_levels(a, 0, N, 2, 3, 7), l1 = orbit_levels(a, 0, N, 1, 3, 7);
    const auto members = band_blocks(band, e.rows());
    const std::set<BlockIndex> in(members.begin(), members.end());
    long hits = 0;
    for (std::size_t n = 0; n < l1.size(); ++n)
      if (l1[n] >= 0 && l2[n] >= 0 && in.count({l2[n], l1[n]})) ++hits;
    CHECK(band_masses(e, band) == q(hits, N));
    CHECK(hits > 0);
  }

  TEST_CASE("coarse blocks keep the total") {
    Construction a(ConstructionSpec::staircase(2));
    const auto e = empirical_joining(a, a, {0, 0, 2, 1}, 2000, 4, 7);
    const auto c = coarse_blocks(e, 4);
    CHECK(c.rows() == 5);
    CHECK(c.block_total() == e.block_total());
    CHECK_THROWS_AS(coarse_blocks(e, 0), std::invalid_argument);
  }
}
