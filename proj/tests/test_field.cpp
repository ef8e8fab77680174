#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "phasecap/error.hpp"
#include "phasecap/field.hpp"
#include "support.hpp"

using namespace phasecap;

TEST_CASE("grid geometry and indexing") {
  const Grid g({5, 3}, {0.5, 0.25}, {-1.0, 2.0});
  CHECK(g.node_count() == 15);
  CHECK(g.cell_count() == 8);
  CHECK(g.cell_volume() == doctest::Approx(0.125));
  CHECK(g.hi(0) == doctest::Approx(1.0));
  CHECK(g.stride(1) == 1);
  for (std::size_t i = 0; i < g.node_count(); ++i) CHECK(g.index(g.multi_index(i)) == i);
  const auto x = g.position(g.index({2, 1, 0}));
  CHECK(x[0] == doctest::Approx(0.0));
  CHECK(x[1] == doctest::Approx(2.25));
  CHECK(g.is_boundary(g.index({0, 1, 0})));
  CHECK_FALSE(g.is_boundary(g.index({2, 1, 0})));
}

TEST_CASE("grid invariants reject bad input") {
  CHECK_THROWS_AS(Grid({1, 3}, {1.0, 1.0}, {0.0, 0.0}), Error);
  CHECK_THROWS_AS(Grid({3, 3}, {0.0, 1.0}, {0.0, 0.0}), Error);
  CHECK_THROWS_AS(Grid({3}, {1.0}, {0.0}), Error);
  CHECK_THROWS_AS(Grid::box({3, 3}, {0.0, 1.0}, {1.0, 1.0}), Error);
  const Grid g = support::unit_square(3);
  CHECK_THROWS_AS(ScalarField(g, std::vector<double>(8, 0.0)), Error);
  std::vector<double> v(9, 0.0);
  v[4] = std::nan("");
  CHECK_THROWS_AS(ScalarField(g, v), Error);
}

TEST_CASE("sample_phase examples") {
  const Grid sq = Grid::box({5, 5}, {0.0, 0.0}, {1.0, 1.0});
  const auto planar = sample_phase(PhaseModel::planar(0), sq);
  CHECK(planar[sq.index({1, 2, 0})] == doctest::Approx(0.25));

  const Grid big = Grid::box({9, 9}, {-4.0, -4.0}, {4.0, 4.0});
  const auto radial = sample_phase(PhaseModel::radial({0.0, 0.0}), big);
  CHECK(radial[big.index({7, 8, 0})] == doctest::Approx(5.0));

  const Grid mono = Grid::box({5, 3}, {-1.0, 0.0}, {1.0, 1.0});
  const auto m = sample_phase(PhaseModel::monomial(2.0, 0), mono);
  CHECK(m[mono.index({1, 0, 0})] == doctest::Approx(0.25));

  CHECK_THROWS_AS(sample_phase(PhaseModel::radial({0.0, 0.0, 0.0}), sq), Error);
  CHECK_THROWS_AS(PhaseModel::monomial(1.0), Error);
  CHECK_THROWS_AS(sample_phase(PhaseModel::file("/nonexistent/field.txt"), sq), Error);
}

TEST_CASE("gradient examples") {
  const Grid g = Grid::box({9, 7}, {0.0, 0.0}, {1.0, 1.0});
  const auto grad = gradient(sample_phase(PhaseModel::planar(0), g));
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    CHECK(grad.component(0)[i] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(grad.component(1)[i]) < 1e-12);
  }
  const auto zero = gradient(ScalarField(g, std::vector<double>(g.node_count(), 3.5)));
  CHECK(zero.max_norm() == 0.0);

  // Off-axis node (3,4): error shrinks like h^2.
  double prev = 0.0;
  for (std::size_t n : {33, 65, 129}) {
    const Grid r = Grid::box({n, n}, {-8.0, -8.0}, {8.0, 8.0});
    const auto gr = gradient(sample_phase(PhaseModel::radial({0.0, 0.0}), r));
    const std::size_t i = (n - 1) / 16;
    const std::size_t node = r.index({8 * i + 3 * i, 8 * i + 4 * i, 0});
    const double err = std::hypot(gr.component(0)[node] - 0.6, gr.component(1)[node] - 0.8);
    CHECK(err < 1e-2);
    if (prev > 0.0) CHECK(err < prev / 3.0);
    prev = err;
  }
}

TEST_CASE("gradient of affine fields is exact in 2-D and 3-D") {
  const Grid g2 = Grid::box({6, 5}, {-1.0, 0.0}, {2.0, 1.0});
  const auto f2 = support::field_from(g2, [](const auto& x) { return 3.0 * x[0] - 2.0 * x[1] + 0.5; });
  const auto d2 = gradient(f2);
  const Grid g3 = Grid::box({4, 5, 3}, {0.0, 0.0, 0.0}, {1.0, 2.0, 1.0});
  const auto f3 = support::field_from(g3, [](const auto& x) { return x[0] - x[1] + 4.0 * x[2]; });
  const auto d3 = gradient(f3);
  for (std::size_t i = 0; i < g2.node_count(); ++i) {
    CHECK(d2.component(0)[i] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(d2.component(1)[i] == doctest::Approx(-2.0).epsilon(1e-12));
  }
  for (std::size_t i = 0; i < g3.node_count(); ++i) {
    CHECK(d3.component(0)[i] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(d3.component(1)[i] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(d3.component(2)[i] == doctest::Approx(4.0).epsilon(1e-12));
  }
}

TEST_CASE("interpolation is multilinear") {
  const Grid g = Grid::box({3, 4, 3}, {0.0, 0.0, 0.0}, {1.0, 1.0, 1.0});
  const auto f = support::field_from(g, [](const auto& x) { return 1.0 + x[0] + 2.0 * x[1] * x[2]; });
  CHECK(f.interpolate({0.3, 0.6, 0.5}) == doctest::Approx(1.0 + 0.3 + 2.0 * 0.6 * 0.5));
  CHECK(f.interpolate({1.0, 1.0, 1.0}) == doctest::Approx(4.0));
}

TEST_CASE("plate masks") {
  const Grid g = Grid::box({11, 3}, {0.0, 0.0}, {1.0, 1.0});
  const auto theta = sample_phase(PhaseModel::planar(0), g);
  const auto m = plate_masks(theta, LevelPair(0.2, 0.8));
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    const double x = g.position(i)[0];
    CHECK(static_cast<bool>(m.e[i]) == (x <= 0.2 + 1e-15));
    CHECK(static_cast<bool>(m.f[i]) == (x >= 0.8 - 1e-15));
    CHECK_FALSE((m.e[i] && m.f[i]));
  }
  CHECK(plate_masks(theta, LevelPair(-0.5, 0.5)).e_count == 0);

  const Grid r = Grid::box({21, 21}, {-2.0, -2.0}, {2.0, 2.0});
  const auto rad = sample_phase(PhaseModel::radial({0.0, 0.0}), r);
  const auto rm = plate_masks(rad, LevelPair(1.1, 1.5));
  std::size_t brute = 0;
  for (std::size_t i = 0; i < r.node_count(); ++i) {
    const auto x = r.position(i);
    brute += x[0] * x[0] + x[1] * x[1] <= 1.21;
  }
  CHECK(rm.e_count == brute);
  CHECK_THROWS_AS(LevelPair(1.0, 1.0), Error);
}

TEST_CASE("plate masks are monotone in the level") {
  const Grid g = Grid::box({17, 17}, {-1.0, -1.0}, {1.0, 1.0});
  const auto theta = support::field_from(g, [](const auto& x) { return std::sin(3 * x[0]) + x[1] * x[1]; });
  for (double a : {-0.5, -0.1, 0.3}) {
    const auto small = plate_masks(theta, LevelPair(a, 1.2));
    const auto large = plate_masks(theta, LevelPair(a + 0.2, 1.2));
    for (std::size_t i = 0; i < g.node_count(); ++i) {
      if (small.e[i]) CHECK(large.e[i]);
      CHECK_FALSE((large.e[i] && large.f[i]));
    }
  }
}

TEST_CASE("admissible levels") {
  const Grid r = Grid::box({41, 41}, {-2.0, -2.0}, {2.0, 2.0});
  const auto rad = sample_phase(PhaseModel::radial({0.0, 0.0}), r);
  const auto rep = check_admissible_levels(rad, LevelPair(0.5, 1.0));
  CHECK_FALSE(rep.admissible);
  CHECK(rep.boundary_max == doctest::Approx(2.0 * std::sqrt(2.0)));

  const Grid sq = support::unit_square(11);
  CHECK_FALSE(check_admissible_levels(sample_phase(PhaseModel::planar(0), sq), LevelPair(-0.1, 0.5)).admissible);

  const Grid mono = Grid::box({41, 21}, {-1.0, 0.0}, {1.0, 1.0});
  CHECK_FALSE(check_admissible_levels(sample_phase(PhaseModel::monomial(2.0), mono), LevelPair(0.04, 0.25)).admissible);

  const auto bump = support::field_from(sq, [](const auto& x) {
    return 0.5 + 0.4 * std::sin(2 * support::kPi * x[0]) * std::sin(support::kPi * x[1]);
  });
  const auto ok = check_admissible_levels(bump, LevelPair(0.3, 0.7));
  CHECK(ok.admissible);
  CHECK(ok.e_nonempty);
  CHECK(ok.f_nonempty);
  CHECK(ok.offending_boundary_nodes == 0);
}

TEST_CASE("field file round-trips bit-exactly") {
  const Grid g = Grid::box({7, 4, 3}, {-0.3, 0.1, 2.0}, {1.7, 0.9, 2.5});
  const auto f = support::field_from(g, [](const auto& x) { return std::exp(x[0]) / 3.0 + std::cos(x[1] * x[2]); });
  const auto back = parse_field(format_field(f));
  CHECK(back.grid() == g);
  CHECK(back.values() == f.values());

  const auto path = std::filesystem::temp_directory_path() / "phasecap_field_roundtrip.txt";
  write_field(f, path);
  const auto loaded = sample_phase(PhaseModel::file(path), g);
  CHECK(loaded.values() == f.values());
  std::filesystem::remove(path);

  CHECK_THROWS_AS(parse_field("PHASEFIELD v2\n2\n2 2\n1 1\n0 0\n0\n0\n0\n0\n"), Error);
  CHECK_THROWS_AS(parse_field("PHASEFIELD v1\n2\n2 2\n1 1\n0 0\n0\n0\n0\n"), Error);
  CHECK(format_shortest(0.1) == "0.1");
}
