#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "phasecap/error.hpp"
#include "phasecap/reduced.hpp"
#include "support.hpp"

using namespace phasecap;
using support::kPi;

namespace {

WeightTable table_of(double p, double lo, double hi, std::size_t n, const std::function<double(double)>& A) {
  return WeightTable::synthetic(p, uniform_levels(lo, hi, n), A);
}

Profile random_profile(std::mt19937_64& rng, double a, double b) {
  std::uniform_int_distribution<int> count(1, 12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int inner = count(rng);
  std::vector<double> t{a}, v{0.0};
  std::vector<double> ts, vs;
  for (int i = 0; i < inner; ++i) {
    ts.push_back(a + (b - a) * u(rng));
    vs.push_back(u(rng));
  }
  std::sort(ts.begin(), ts.end());
  std::sort(vs.begin(), vs.end());
  for (int i = 0; i < inner; ++i) {
    if (ts[i] > t.back() && ts[i] < b) {
      t.push_back(ts[i]);
      v.push_back(vs[i]);
    }
  }
  t.push_back(b);
  v.push_back(1.0);
  return Profile(t, v);
}

}  // namespace

TEST_CASE("resistance and capacity examples") {
  const auto one = table_of(2.0, 0.0, 1.0, 11, [](double) { return 1.0; });
  CHECK(resistance(one, LevelPair(0.0, 1.0)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(reduced_capacity(one, LevelPair(0.0, 1.0)).capacity == doctest::Approx(1.0).epsilon(1e-14));

  const auto lin = table_of(2.0, 1.0, 2.0, 4001, [](double t) { return t; });
  const double R = support::simpson([](double t) { return 1.0 / t; }, 1.0, 2.0);
  CHECK(support::rel(resistance(lin, LevelPair(1.0, 2.0)), R) < 1e-7);
  const auto rep = reduced_capacity(lin, LevelPair(1.0, 2.0));
  CHECK(support::rel(rep.capacity, 1.0 / R) < 1e-7);
  CHECK(rep.branch == CapacityBranch::Finite);
  REQUIRE(rep.profile);

  const auto sq = table_of(2.0, 0.0, 1.0, 101, [](double t) { return t * t; });
  CHECK(std::isinf(resistance(sq, LevelPair(0.0, 1.0))));
  const auto div = reduced_capacity(sq, LevelPair(0.0, 1.0));
  CHECK(div.capacity == 0.0);
  CHECK(div.branch == CapacityBranch::Divergent);
  CHECK_FALSE(div.profile);

  CHECK_THROWS_AS(resistance(one, LevelPair(0.5, 1.5)), Error);
  CHECK(capacity_from_resistance(std::numeric_limits<double>::infinity(), 3.0) == 0.0);
  CHECK(std::isinf(resistance_density(1e-31, 2.0)));
}

TEST_CASE("interval endpoints between knots are interpolated") {
  const auto one = table_of(3.0, 0.0, 1.0, 5, [](double) { return 4.0; });
  CHECK(resistance(one, LevelPair(0.1, 0.6)) == doctest::Approx(0.5 * 0.5).epsilon(1e-14));
}

TEST_CASE("optimal profile examples") {
  const auto one = table_of(2.0, 0.0, 1.0, 101, [](double) { return 3.0; });
  const auto v = optimal_profile(one, LevelPair(0.0, 1.0));
  CHECK(v(0.5) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(v.values().front() == 0.0);
  CHECK(v.values().back() == 1.0);

  const auto lin = table_of(2.0, 1.0, 2.0, 4001, [](double t) { return t; });
  const auto vl = optimal_profile(lin, LevelPair(1.0, 2.0));
  CHECK(vl(std::sqrt(2.0)) == doctest::Approx(0.5).epsilon(1e-6));
  for (double t : {1.1, 1.5, 1.9}) CHECK(vl(t) == doctest::Approx(std::log(t) / std::log(2.0)).epsilon(1e-6));

  const auto rad = table_of(2.0, 1.0, std::exp(1.0), 2049, [](double t) { return 2.0 * kPi * t; });
  const auto vr = optimal_profile(rad, LevelPair(1.0, std::exp(1.0)));
  for (double t : {1.2, 2.0, 2.5}) CHECK(vr(t) == doctest::Approx(std::log(t)).epsilon(1e-6));

  const auto sq = table_of(2.0, 0.0, 1.0, 101, [](double t) { return t * t; });
  CHECK_THROWS_AS(optimal_profile(sq, LevelPair(0.0, 1.0)), Error);
}

TEST_CASE("reduced energy examples") {
  const auto one = table_of(2.0, 0.0, 1.0, 17, [](double) { return 1.0; });
  CHECK(reduced_energy(Profile::linear(0.0, 1.0), one) == doctest::Approx(1.0).epsilon(1e-14));
  const Profile plateau({0.0, 0.5, 1.0}, {0.0, 0.0, 1.0});
  CHECK(reduced_energy(plateau, one) == doctest::Approx(2.0).epsilon(1e-14));

  const auto lin = table_of(2.0, 1.0, 2.0, 4001, [](double t) { return t; });
  const auto v = optimal_profile(lin, LevelPair(1.0, 2.0));
  CHECK(support::rel(reduced_energy(v, lin), 1.0 / std::log(2.0)) < 1e-6);

  CHECK_THROWS_AS(Profile({0.0, 1.0}, {0.0, 0.5}), Error);
  CHECK_THROWS_AS(Profile({0.0, 0.5, 1.0}, {0.0, 0.7, 0.6}), Error);
  CHECK_THROWS_AS(Profile({0.0, 0.0, 1.0}, {0.0, 0.0, 1.0}), Error);
}

TEST_CASE("profile evaluation extends by 0 and 1") {
  const Profile v({1.0, 2.0, 4.0}, {0.0, 0.5, 1.0});
  CHECK(v(0.0) == 0.0);
  CHECK(v(5.0) == 1.0);
  CHECK(v(3.0) == doctest::Approx(0.75));
  CHECK(v.lipschitz() == doctest::Approx(0.5));
}

TEST_CASE("truncated profile examples") {
  const auto one = table_of(2.0, 0.0, 1.0, 33, [](double) { return 1.0; });
  const auto vk = truncated_profile(one, LevelPair(0.0, 1.0), 2.0);
  for (double t : {0.1, 0.37, 0.9}) CHECK(vk(t) == doctest::Approx(t).epsilon(1e-14));

  const auto sq = table_of(2.0, 0.0, 1.0, 201, [](double t) { return t * t; });
  double prev = std::numeric_limits<double>::infinity();
  for (double k : {10.0, 100.0, 1000.0, 1e5}) {
    const auto v = truncated_profile(sq, LevelPair(0.0, 1.0), k);
    const double e = reduced_energy(v, sq);
    CHECK(std::isfinite(e));
    CHECK(v.lipschitz() <= k / 1.0 + 1e-9);
    CHECK(e < prev);
    prev = e;
  }
  CHECK(prev < 0.2);

  const auto lin = table_of(2.0, 1.0, 2.0, 401, [](double t) { return t; });
  const auto vs = optimal_profile(lin, LevelPair(1.0, 2.0));
  const auto vbig = truncated_profile(lin, LevelPair(1.0, 2.0), 1e6);
  const auto vsmall = truncated_profile(lin, LevelPair(1.0, 2.0), 0.7);
  for (double t : {1.2, 1.6}) {
    CHECK(vbig(t) == doctest::Approx(vs(t)).epsilon(1e-14));
    CHECK(std::abs(vsmall(t) - vs(t)) > 1e-4);
  }
  CHECK_THROWS_AS(truncated_profile(one, LevelPair(0.0, 1.0), 0.0), Error);
}

TEST_CASE("truncated energy never exceeds c_k^{1-p}") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    for (double p : {1.5, 2.0, 3.0}) {
      const auto table = support::random_table(rng, p, 40);
      for (double k : {0.5, 1.0, 3.0}) {
        const auto v = truncated_profile(table, LevelPair(0.0, 1.0), k);
        const double e = reduced_energy(v, table);
        double ck = 0.0;
        for (std::size_t i = 0; i + 1 < table.size(); ++i) {
          const double b0 = std::min(std::pow(table[i].A, -1.0 / (p - 1.0)), k);
          const double b1 = std::min(std::pow(table[i + 1].A, -1.0 / (p - 1.0)), k);
          ck += 0.5 * (b0 + b1) * (table[i + 1].t - table[i].t);
        }
        CHECK(e <= std::pow(ck, 1.0 - p) * (1.0 + 1e-12));
      }
    }
  }
}

TEST_CASE("linear profile comparison") {
  const auto one = table_of(2.0, 0.0, 1.0, 11, [](double) { return 1.0; });
  const auto c1 = linear_profile_comparison(one, LevelPair(0.0, 1.0));
  CHECK(c1.linear_energy == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(c1.excess) <= 1e-10);
  CHECK(c1.equality);

  const auto lin = table_of(2.0, 1.0, 2.0, 4001, [](double t) { return t; });
  const auto c2 = linear_profile_comparison(lin, LevelPair(1.0, 2.0));
  CHECK(c2.linear_energy == doctest::Approx(1.5).epsilon(1e-6));
  CHECK(c2.excess == doctest::Approx(1.5 - 1.0 / std::log(2.0)).epsilon(1e-5));
  CHECK_FALSE(c2.equality);

  const auto rad = table_of(3.0, 1.0, 2.0, 257, [](double t) { return 4.0 * kPi * t * t; });
  CHECK(linear_profile_comparison(rad, LevelPair(1.0, 2.0)).excess > 0.0);
}

TEST_CASE("series law") {
  const auto one = table_of(2.0, 0.0, 1.0, 11, [](double) { return 1.0; });
  CHECK(resistance(one, LevelPair(0.0, 0.5)) + resistance(one, LevelPair(0.5, 1.0)) == doctest::Approx(1.0));
  CHECK(series_residual(one, 0.0, 0.5, 1.0) == 0.0);

  std::vector<double> t = uniform_levels(1.0, 2.0, 2001);
  t.push_back(std::sqrt(2.0));
  std::sort(t.begin(), t.end());
  const auto lin = WeightTable::synthetic(2.0, t, [](double x) { return x; });
  CHECK(resistance(lin, LevelPair(1.0, std::sqrt(2.0))) == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-6));
  CHECK(resistance(lin, LevelPair(std::sqrt(2.0), 2.0)) == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-6));
  CHECK(series_residual(lin, 1.0, std::sqrt(2.0), 2.0) == 0.0);
  CHECK_THROWS_AS(series_residual(one, 0.0, 0.55, 1.0), Error);

  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const auto table = support::random_table(rng, 1.5 + 0.1 * trial, 33);
    for (std::size_t i = 1; i + 1 < table.size(); ++i) {
      CHECK(series_residual(table, 0.0, table[i].t, 1.0) == 0.0);
    }
  }
}

TEST_CASE("reparametrization") {
  const auto one = table_of(2.0, 0.0, 1.0, 11, [](double) { return 1.0; });
  std::vector<double> phi;
  for (double t : one.levels()) phi.push_back(2.0 * t);
  const auto doubled = reparametrize_table(one, phi);
  for (const auto& r : doubled.rows()) CHECK(r.A == doctest::Approx(2.0));
  CHECK(resistance(doubled, LevelPair(0.0, 2.0)) == doctest::Approx(1.0).epsilon(1e-14));

  const auto same = reparametrize_table(one, one.levels());
  for (std::size_t i = 0; i < one.size(); ++i) CHECK(same[i].A == doctest::Approx(one[i].A).epsilon(1e-14));

  std::vector<double> bad = one.levels();
  std::swap(bad[3], bad[4]);
  CHECK_THROWS_AS(reparametrize_table(one, bad), Error);

  for (std::size_t n : {256, 1024, 4096}) {
    const auto rad = table_of(2.0, 1.0, std::exp(1.0), n, [](double t) { return 2.0 * kPi * t; });
    std::vector<double> cubic;
    for (double t : rad.levels()) cubic.push_back(t * t * t + t);
    const auto re = reparametrize_table(rad, cubic);
    const double b = std::exp(1.0);
    const double c0 = reduced_capacity(rad, LevelPair(1.0, b)).capacity;
    const double c1 = reduced_capacity(re, LevelPair(2.0, b * b * b + b)).capacity;
    CHECK(support::rel(c1, c0) < 1e-6);
  }
}

TEST_CASE("two-sided bounds") {
  const auto knots = uniform_levels(0.0, 1.0, 11);
  const std::vector<double> ones(11, 1.0);
  const auto exact = two_sided_bounds(knots, ones, ones, ones, ones, LevelPair(0.0, 1.0), 2.0);
  CHECK(exact.lower == doctest::Approx(1.0));
  CHECK(exact.upper == doctest::Approx(1.0));

  const std::vector<double> half(11, 0.5), two(11, 2.0);
  const auto spread = two_sided_bounds(knots, half, two, ones, ones, LevelPair(0.0, 1.0), 2.0);
  CHECK(spread.lower == doctest::Approx(0.5));
  CHECK(spread.upper == doctest::Approx(2.0));

  const auto rk = uniform_levels(1.0, std::exp(1.0), 2049);
  std::vector<double> circ;
  for (double t : rk) circ.push_back(2.0 * kPi * t);
  const std::vector<double> g1(rk.size(), 1.0);
  const auto rb = two_sided_bounds(rk, g1, g1, circ, circ, LevelPair(1.0, std::exp(1.0)), 2.0);
  CHECK(support::rel(rb.lower, 2.0 * kPi) < 1e-6);
  CHECK(support::rel(rb.upper, 2.0 * kPi) < 1e-6);

  CHECK_THROWS_AS(two_sided_bounds(knots, two, half, ones, ones, LevelPair(0.0, 1.0), 2.0), Error);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> A(11), m(11), M(11), glo(11), ghi(11);
    for (std::size_t i = 0; i < 11; ++i) {
      A[i] = u(rng);
      m[i] = A[i] * 0.8;
      M[i] = A[i] * 1.3;
      glo[i] = 1.0;
      ghi[i] = 1.0;
    }
    const auto table = WeightTable::synthetic(2.0, knots, A);
    const double cap = reduced_capacity(table, LevelPair(0.0, 1.0)).capacity;
    const auto b = two_sided_bounds(knots, glo, ghi, m, M, LevelPair(0.0, 1.0), 2.0);
    CHECK(b.lower <= cap);
    CHECK(cap <= b.upper);
  }
}

TEST_CASE("eikonal check") {
  const Grid sq = support::unit_square(33);
  const auto planar = weight_table(sample_phase(PhaseModel::planar(0), sq), 2.0, uniform_levels(0.1, 0.9, 17));
  CHECK(eikonal_check(planar, std::vector<double>(17, 1.0)) < 1e-10);

  const Grid box = Grid::box({129, 129}, {-2.0, -2.0}, {2.0, 2.0});
  const auto rad = weight_table(sample_phase(PhaseModel::radial({0.0, 0.0}), box), 3.0, uniform_levels(0.5, 1.5, 17));
  CHECK(eikonal_check(rad, std::vector<double>(17, 1.0)) < 5e-3);

  const Grid mono = Grid::box({257, 17}, {-1.0, 0.0}, {1.0, 1.0});
  const auto mt = weight_table(sample_phase(PhaseModel::monomial(2.0), mono), 2.0, uniform_levels(0.05, 0.9, 18));
  std::vector<double> gamma;
  for (double t : mt.levels()) gamma.push_back(2.0 * std::sqrt(t));
  CHECK(eikonal_check(mt, gamma) < 2e-2);
  CHECK_THROWS_AS(eikonal_check(mt, std::vector<double>(3, 1.0)), Error);
}

TEST_CASE("optimality and the Hoelder lower bound on random tables") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 25; ++trial) {
    const double p = 1.2 + 0.15 * trial;
    const auto table = support::random_table(rng, p, 25);
    const LevelPair lv(0.0, 1.0);
    const double cap = reduced_capacity(table, lv).capacity;
    const auto vstar = optimal_profile(table, lv);
    CHECK(support::rel(reduced_energy(vstar, table), cap) < 1e-12);
    for (int k = 0; k < 20; ++k) {
      CHECK(reduced_energy(random_profile(rng, 0.0, 1.0), table) >= cap * (1.0 - 1e-12));
    }
  }
}

TEST_CASE("capacity is monotone in the interval") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const auto table = support::random_table(rng, 2.5, 41);
    const double inner = reduced_capacity(table, LevelPair(0.3, 0.6)).capacity;
    CHECK(reduced_capacity(table, LevelPair(0.2, 0.6)).capacity < inner);
    CHECK(reduced_capacity(table, LevelPair(0.3, 0.7)).capacity < inner);
  }
}
