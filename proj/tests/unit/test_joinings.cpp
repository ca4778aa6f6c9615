#include <doctest.h>

#include <set>

#include "rankone/joinings.hpp"
#include "rankone/transform.hpp"

using namespace rankone;

namespace {
Rational q(long n, long d) { return make_rational(n, d); }
}  // namespace

TEST_SUITE("joinings") {
  TEST_CASE("product joining") {
    Construction a(ConstructionSpec::staircase(2, 7)), b(ConstructionSpec::staircase(3, 7));
    const auto m = product_blocks(a, b, 3, 5);
    const Rational mass = a.base_width(3) * b.base_width(3);
    for (std::int64_t z1 = 0; z1 < m.rows(); ++z1)
      for (std::int64_t z2 = 0; z2 < m.cols(); ++z2) CHECK(m.at(z1, z2) == mass);
    CHECK(m.block_total() + m.residual == 1);
    CHECK(m.row_sum(0) == a.base_width(3) * b.total_measure(3));
    for (std::int64_t z1 = 0; z1 < m.rows(); ++z1) CHECK(m.row_marginal(z1) == a.base_width(3));
    for (std::int64_t z2 = 0; z2 < m.cols(); ++z2) CHECK(m.col_marginal(z2) == b.base_width(3));

    // ε just above w̃_j makes every block light.
    const Rational eps = a.base_width(3) + q(1, 1000000);
    const auto light = light_blocks(m, eps);
    CHECK(static_cast<std::int64_t>(light.light_set.size()) == m.rows() * m.cols());
    CHECK(light.covered_mass == a.total_measure(3) * b.total_measure(3));
    // Ties are heavy.
    CHECK(light_blocks(m, a.base_width(3)).light_set.empty());
  }

  TEST_CASE("graph joining with k = 0 sits on the diagonal") {
    Construction c(ConstructionSpec::chacon(1, 6));
    for (int j = 1; j <= 3; ++j) {
      const auto m = graph_blocks(c, 0, j, 5);
      for (std::int64_t z1 = 0; z1 < m.rows(); ++z1)
        for (std::int64_t z2 = 0; z2 < m.cols(); ++z2) CHECK(m.at(z1, z2) == (z1 == z2 ? c.base_width(j) : Rational(0)));
      CHECK(m.uncertain_mass == 0);
      const auto light = light_blocks(m, q(1, 2));
      CHECK(static_cast<std::int64_t>(light.light_set.size()) == m.rows() * (m.rows() - 1));
      CHECK(light.covered_mass == 0);
    }
  }

  TEST_CASE("graph joining with a shift matches geometric overlaps") {
    Construction odo(ConstructionSpec::odometer(2));
    const auto m = graph_blocks(odo, 2, 1, 4);
    CHECK(m.at(0, 0) == q(7, 16));
    CHECK(m.at(1, 1) == q(7, 16));
    CHECK(m.at(0, 1) == 0);
    CHECK(m.uncertain_mass == q(1, 8));

    Construction st(ConstructionSpec::staircase(2, 7));
    const int j = 3, J = 5;
    for (std::int64_t k : {-4, 3, 7}) {
      const auto g = graph_blocks(st, k, j, J);
      const auto e = st.stage(j)->base();
      for (std::int64_t z1 = 0; z1 < g.rows(); ++z1)
        for (std::int64_t z2 = 0; z2 < g.cols(); ++z2) {
          const auto left = power_image(st, e, z1, J).image;
          const auto right = power_image(st, e, z2 + k, J).image;
          CHECK(g.at(z1, z2) == intersection_measure(left, right));
        }
      CHECK(g.uncertain_mass <= g.residual);
    }
  }

  TEST_CASE("di estimate") {
    Construction c(ConstructionSpec::staircase(2, 7));
    std::vector<LightBlockReport> graph, single;
    for (int j = 2; j <= 4; ++j)
      for (auto eps : {q(1, 2), q(1, 4), q(1, 8)}) graph.push_back(light_blocks(graph_blocks(c, 0, j, 6), eps));
    CHECK(di_estimate(graph).proxy == 0);
    CHECK(di_estimate(graph).per_epsilon.front().first == q(1, 2));
    for (int j = 2; j <= 4; ++j) single.push_back(light_blocks(graph_blocks(c, 0, j, 6), q(1, 2)));
    CHECK_THROWS_AS(di_estimate(single), std::invalid_argument);

    Construction d(ConstructionSpec::staircase(3, 7));
    std::vector<LightBlockReport> prod;
    for (int j = 4; j <= 5; ++j)
      for (auto eps : {q(1, 2), q(1, 4)}) prod.push_back(light_blocks(product_blocks(c, d, j, j), eps));
    CHECK(di_estimate(prod).proxy == c.total_measure(5) * d.total_measure(5));
  }

  TEST_CASE("empirical joining basics") {
    Construction c(ConstructionSpec::staircase(2, 8));
    const auto diag = empirical_joining(c, c, {q(1, 3), q(1, 3)}, 2000, 3, 6);
    for (std::int64_t z1 = 0; z1 < diag.rows(); ++z1)
      for (std::int64_t z2 = 0; z2 < diag.cols(); ++z2)
        if (z1 != z2) CHECK(diag.at(z1, z2) == 0);
    CHECK(light_blocks(diag, q(1, 2)).covered_mass == 0);
    CHECK(diag.block_total() + diag.residual == 1);

    const auto one = empirical_joining(c, c, {0, q(1, 2)}, 1, 3, 6);
    CHECK((one.block_total() == 1 || one.residual == 1));
    CHECK_THROWS_AS(empirical_joining(c, c, {0, 0}, 0, 3, 6), std::invalid_argument);
  }

  TEST_CASE("joining marginals account for off-tower partners") {
    Construction c(ConstructionSpec::staircase(2, 10)), d(ConstructionSpec::staircase(3, 10));
    for (int k : {0, 1, 3}) {
      const auto g = graph_blocks(c, k, 3, 7);
      for (std::int64_t z = 0; z < g.rows(); ++z) {
        CHECK(g.row_marginal(z) == c.base_width(3));
        CHECK(g.col_marginal(z) == c.base_width(3));
      }
    }
    const int N = 20000;
    const auto e = empirical_joining(c, d, {q(1, 7), q(2, 9)}, N, 3, 7);
    Rational total = e.block_total() + e.residual, off;
    for (const auto& s : e.first_stray) off += s;
    CHECK(off <= e.residual);
    for (std::int64_t z = 0; z < e.rows(); ++z)
      CHECK(std::abs(Rational(e.row_marginal(z) - c.base_width(3)).get_d()) < 0.01);
    for (std::int64_t z = 0; z < e.cols(); ++z)
      CHECK(std::abs(Rational(e.col_marginal(z) - d.base_width(3)).get_d()) < 0.01);
    CHECK(total == 1);
  }

  TEST_CASE("empirical joinings are shift-equivariant up to boundary terms") {
    Construction a(ConstructionSpec::staircase(2, 8)), b(ConstructionSpec::staircase(3, 8));
    const std::int64_t N = 3000, shift = 40;
    const OrbitSeed s0{0, 0};
    const auto x1 = apply_power(a, OrbitPoint{0, 0, 1}, shift).x, y1 = apply_power(b, OrbitPoint{0, 0, 1}, shift).x;
    const auto m0 = empirical_joining(a, b, s0, N, 3, 6);
    const auto m1 = empirical_joining(a, b, {x1, y1}, N, 3, 6);
    for (std::int64_t z1 = 0; z1 < m0.rows(); ++z1)
      for (std::int64_t z2 = 0; z2 < m0.cols(); ++z2) CHECK(abs(m0.at(z1, z2) - m1.at(z1, z2)) <= q(shift, N));
  }

  TEST_CASE("dispersion") {
    Construction a(ConstructionSpec::staircase(2)), b(ConstructionSpec::staircase(3));
    const auto rows = dispersion_experiment(a, b, {0, 0}, 20000, 3, 7, {0, 0}, {0, b.height(3)});
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].masses.size() == 1);
    CHECK(rows[0].max_block_mass == 1);
    CHECK(rows[1].max_block_mass < 1);
    CHECK(rows[1].masses.size() >= 2);

    const auto same = dispersion_experiment(a, a, {0, 0}, 5000, 3, 7, {1, 1}, {0, 3, 11});
    CHECK(same[1].masses.size() == 1);
    CHECK(same[1].masses.begin()->first == BlockIndex{4, 4});
    for (const auto& r : same)
      for (const auto& [z, v] : r.masses) CHECK(z.z1 == z.z2);
    CHECK_THROWS_AS(dispersion_experiment(a, b, {0, 0}, 10, 3, 7, {4, 0}, {1}), std::invalid_argument);
    CHECK_THROWS_AS(dispersion_experiment(a, b, {0, 0}, 10, 3, 7, {0, 0}, {-1}), std::invalid_argument);
  }

  TEST_CASE("columns and F sets") {
    Construction a(ConstructionSpec::staircase(2, 7)), b(ConstructionSpec::staircase(3, 7));
    const auto m = product_blocks(a, b, 4, 4);  // 18 x 24 blocks
    const auto f0 = columns_and_F(m, q(1, 10), 1, {0});
    CHECK(f0.column.length == 3);
    CHECK(f0.weights.weights().size() == 1);
    CHECK(f0.weights.weights().at(0) == 1);

    const auto f = columns_and_F(m, q(1, 10), 1, {0, 3, 5, 9});
    for (const auto& cm : f.column_masses) CHECK(cm == f.column_masses.front());
    for (const auto& [h, v] : f.weights.weights()) CHECK(v == q(1, 4));
    CHECK(f.flatness == q(1, 4));
    CHECK(f.mass == m.at(0, 0) * 12);

    CHECK_THROWS_AS(columns_and_F(m, q(1, 10), 16, {0}), std::invalid_argument);
    CHECK_THROWS_AS(columns_and_F(m, q(1, 10), 0, {22}), std::invalid_argument);
    CHECK_THROWS_AS(columns_and_F(m, 1, 0, {0}), std::invalid_argument);

    Construction c(ConstructionSpec::staircase(2, 7));
    const auto g = graph_blocks(c, 0, 4, 6);
    CHECK_THROWS_AS(columns_and_F(g, q(1, 10), 2, {0}), std::invalid_argument);
    const auto light = light_column_shifts(g, q(1, 10), 2, q(1, 2));
    CHECK(std::find(light.begin(), light.end(), 2) == light.end());
    CHECK(std::find(light.begin(), light.end(), 0) != light.end());
  }

  TEST_CASE("trivialization") {
    Construction a(ConstructionSpec::staircase(2, 7)), b(ConstructionSpec::staircase(3, 7));
    const int j = 3, J = 6;
    const auto m = product_blocks(a, b, j, J);
    const auto f = columns_and_F(m, q(1, 10), 0, {0, 1, 2});
    const auto A = IntervalSet::of(a.stage(2)->level(1));
    const auto B = IntervalSet::of(b.stage(2)->level(0));
    const auto r = trivialization_check(m, a, b, f, A, B, 2, J);
    CHECK(r.joint == MeasureBound::exact(r.target));
    CHECK(r.gap == MeasureBound::exact(0));
    CHECK(r.identity_gap.lo() == 0);
    CHECK(r.averaged.contains(r.conditional));

    Construction c(ConstructionSpec::staircase(2, 7));
    const auto g = graph_blocks(c, 0, j, J);
    const auto fd = columns_and_F(g, q(1, 10), 0, {0});
    const auto L = IntervalSet::of(c.stage(j)->level(0));
    const auto rg = trivialization_check(g, c, c, fd, L, L, j, J);
    CHECK(rg.gap.lo() > 0);
    CHECK(rg.conditional == 1);

    CHECK_THROWS_AS(trivialization_check(m, a, b, f, IntervalSet::of({0, q(1, 1000)}), B, 2, J),
                    std::invalid_argument);
    CHECK_THROWS_AS(trivialization_check(m, a, b, f, A, B, 4, J), std::invalid_argument);
  }
}
