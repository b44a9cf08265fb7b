#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "pursuit/error.hpp"
#include "pursuit/geometry.hpp"

using namespace pursuit;
using doctest::Approx;

TEST_CASE("local polar coordinates cover every quadrant") {
  PolarCoord a = to_local_polar({3, 4}, {0, 0});
  CHECK(a.r == Approx(5.0));
  CHECK(a.alpha == Approx(std::atan(4.0 / 3.0)).epsilon(1e-12));
  CHECK(a.alpha == Approx(0.9273).epsilon(1e-4));

  PolarCoord b = to_local_polar({-1, 0}, {0, 0});
  CHECK(b.r == Approx(1.0));
  CHECK(b.alpha == Approx(kPi));

  PolarCoord c = to_local_polar({2, -2}, {0, 0});
  CHECK(c.r == Approx(2 * std::sqrt(2.0)));
  CHECK(c.alpha == Approx(7 * kPi / 4));

  // x = 0 is covered too.
  CHECK(to_local_polar({0, 2}, {0, 0}).alpha == Approx(kPi / 2));
  CHECK(to_local_polar({0, -2}, {0, 0}).alpha == Approx(3 * kPi / 2));
  // Relative to a displaced evader.
  CHECK(to_local_polar({5, 6}, {2, 2}).r == Approx(5.0));
}

TEST_CASE("coincident pursuer and evader are degenerate") {
  try {
    to_local_polar({1, 1}, {1, 1});
    FAIL("expected an error");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::kDegeneratePosition);
  }
}

TEST_CASE("polar round trip") {
  const Vec2 p{-3.25, 1.5};
  const Vec2 q = from_local_polar(to_local_polar(p, {0, 0}));
  CHECK(q.x == Approx(p.x).epsilon(1e-14));
  CHECK(q.y == Approx(p.y).epsilon(1e-14));
}

TEST_CASE("apollonius disk for a pursuer on the x axis") {
  const ApolloniusDisk d = apollonius_disk({1, 0}, 0.5);
  CHECK(d.center.x == Approx(4.0 / 3.0));
  CHECK(d.center.y == Approx(0.0));
  CHECK(d.radius == Approx(2.0 / 3.0));
  // Boundary sampling: every point is lambda times as far from the pursuer
  // as from the evader.
  for (int k = 0; k < 100; ++k) {
    const double phi = 2 * kPi * k / 100;
    const Vec2 m = d.center + d.radius * unit_from_angle(phi);
    CHECK(norm(m - Vec2{1, 0}) / norm(m) == Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("apollonius disk argument checks") {
  CHECK_THROWS_AS(apollonius_disk({1, 0}, 1.0), Error);
  CHECK_THROWS_AS(apollonius_disk({1, 0}, 0.0), Error);
  CHECK_THROWS_AS(apollonius_disk({0, 0}, 0.5), Error);
  try {
    apollonius_disk({1, 0}, 1.2);
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::kInvalidSpeedRatio);
  }
  try {
    apollonius_disk({0, 0}, 0.5);
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::kDegeneratePosition);
  }
}

TEST_CASE("occupied angle values") {
  CHECK(occupied_angle(0.5) == Approx(kPi / 3).epsilon(1e-14));
  const double bisected = oracle::bisect(
      [](double th) { return std::sin(th / 2) - 0.9; }, 0.0, kPi);
  CHECK(occupied_angle(0.9) == Approx(bisected).epsilon(1e-12));
  CHECK(occupied_angle(0.9) == Approx(2.2395).epsilon(1e-4));
  CHECK(occupied_angle(std::sin(3 * kPi / 8)) == Approx(3 * kPi / 4).epsilon(1e-12));
  CHECK(occupied_angle(0.8) / kPi == Approx(0.59).epsilon(0.005));
  CHECK(occupied_angle(std::nextafter(1.0, 0.0)) == Approx(kPi).epsilon(1e-7));
  CHECK_THROWS_AS(occupied_angle(1.0), Error);
  CHECK_THROWS_AS(occupied_angle(-0.1), Error);
}

TEST_CASE("occupied angle matches the disk seen from the evader") {
  const ApolloniusDisk d = apollonius_disk({3, -2}, 0.7);
  const double sampled = oracle::sampled_half_angle(d.center, d.radius, 200000);
  CHECK(d.occupied_angle == Approx(2 * sampled).epsilon(1e-6));
  CHECK(d.occupied_angle == Approx(occupied_angle(0.7)).epsilon(1e-12));
}

TEST_CASE("meeting points lie on the disk") {
  const ApolloniusDisk d = apollonius_disk({0, 5}, 0.6);
  for (double phi : {0.0, 1.0, 2.5, 4.0}) {
    const Vec2 m = meeting_point(d, phi).point;
    CHECK(distance(m, d.center) == Approx(d.radius).epsilon(1e-12));
  }
}

TEST_CASE("ring of two opposite pursuers") {
  const std::vector<PolarCoord> p{{5, 0}, {5, kPi}};
  const std::vector<double> lam{0.5, 0.5};
  const RingView v = ring_view(p, lam);
  REQUIRE(v.coverage.size() == 2);
  CHECK(v.coverage[0] == Approx(2 * kPi / 3));
  CHECK(v.coverage[1] == Approx(2 * kPi / 3));
  CHECK(v.group_occupied == Approx(2 * kPi / 3));
  CHECK(v.success_rate == Approx(1.0 / 3));
  CHECK(v.coverage[0] + v.coverage[1] == Approx(2 * kPi - 2 * kPi / 3));
}

TEST_CASE("evenly spaced fast pursuers close the ring") {
  const std::vector<PolarCoord> p{{4, 0}, {4, 2 * kPi / 3}, {4, 4 * kPi / 3}};
  const std::vector<double> lam{0.9, 0.9, 0.9};
  const RingView v = ring_view(p, lam);
  for (double e : v.coverage) CHECK(e < 0);
  CHECK(v.group_occupied == Approx(2 * kPi));
  CHECK(v.success_rate == Approx(1.0));
}

TEST_CASE("three pursuers at the covering threshold") {
  const double lam = std::sin(kPi / 3);
  CHECK(lam == Approx(0.86).epsilon(0.01));
  const std::vector<PolarCoord> p{{4, 0}, {4, 2 * kPi / 3}, {4, 4 * kPi / 3}};
  const std::vector<double> lams{lam, lam, lam};
  const RingView v = ring_view(p, lams, occupied_angle(lam));
  CHECK(v.n_min == Approx(3.0).epsilon(1e-12));
  CHECK(v.group_occupied == Approx(2 * kPi).epsilon(1e-12));
}

TEST_CASE("ring orders by angle and breaks ties by index") {
  const std::vector<PolarCoord> p{{3, 1.0}, {2, 0.5}, {4, 1.0}};
  const std::vector<double> lam{0.5, 0.5, 0.5};
  const RingView v = ring_view(p, lam);
  CHECK(v.order == std::vector<int>{1, 0, 2});
}

TEST_CASE("ring needs two pursuers") {
  const std::vector<PolarCoord> p{{3, 1.0}};
  const std::vector<double> lam{0.5};
  try {
    ring_view(p, lam);
    FAIL("expected an error");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::kRingUndefined);
  }
}

TEST_CASE("ring coverage identity and ranges on random configurations") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ang(0, 2 * kPi), rad(0.5, 50),
      lam(0.05, 0.99);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 2 + trial % 19;
    std::vector<PolarCoord> p(n);
    std::vector<double> l(n);
    double theta_sum = 0;
    for (int i = 0; i < n; ++i) {
      p[i] = {rad(rng), ang(rng)};
      l[i] = lam(rng);
      theta_sum += occupied_angle(l[i]);
    }
    const RingView v = ring_view(p, l);
    double sum = 0;
    bool all_overlap = true;
    for (double e : v.coverage) {
      sum += e;
      all_overlap = all_overlap && e <= 0;
    }
    CHECK(sum == Approx(2 * kPi - theta_sum).epsilon(1e-12).scale(2 * kPi));
    CHECK(v.success_rate >= 0.0);
    CHECK(v.success_rate <= 1.0);
    CHECK((v.group_occupied == 2 * kPi) == all_overlap);
  }
}

TEST_CASE("adding a pursuer never lowers theta_G for equal speed ratios") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ang(0, 2 * kPi), rad(1, 30),
      lam(0.1, 0.95);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 2 + trial % 10;
    const double l = lam(rng);
    std::vector<PolarCoord> p(n);
    for (auto &q : p) q = {rad(rng), ang(rng)};
    std::vector<double> ls(n, l);
    const double before = ring_view(p, ls).group_occupied;
    p.push_back({rad(rng), ang(rng)});
    ls.push_back(l);
    CHECK(ring_view(p, ls).group_occupied >= before - 1e-12);
  }
}

TEST_CASE("group occupied angle from a coverage vector") {
  const std::vector<double> cov{0.5, -0.2, -0.1};
  CHECK(group_occupied_from_coverage(cov, 2.0) == Approx(1.7));
  const std::vector<double> closed{-0.5, -0.2};
  CHECK(group_occupied_from_coverage(closed, 7.0) == Approx(2 * kPi));
}

TEST_CASE("pursuer count bound") {
  const PursuerCountBound b = required_pursuer_count(3.1, 0.95, 10);
  CHECK(b.bound == Approx(kPi / std::asin(0.2945)).epsilon(1e-12));
  CHECK(b.bound == Approx(10.51).epsilon(0.005));
  CHECK(b.minimum == 11);
  CHECK_FALSE(b.vacuous);

  const double rp = 10;
  const PursuerCountBound edge =
      required_pursuer_count(2 * rp * std::sin(kPi / 4), 0.5, rp);
  CHECK(edge.minimum == 5);

  CHECK(required_pursuer_count(1.0, 1e-6, 10).minimum > 1000000);

  const PursuerCountBound vac = required_pursuer_count(5, 0.9, 3);
  CHECK(vac.vacuous);
  CHECK(vac.minimum == 3);
}

TEST_CASE("included angle") {
  CHECK(included_angle({2, 0}, {2, kPi / 2}) == Approx(kPi / 2));
  const PolarCoord b = to_local_polar({2, 0.5}, {0, 0});
  CHECK(included_angle({2, 0}, b) ==
        Approx(oracle::law_of_cosines_angle({2, 0}, {2, 0.5})).epsilon(1e-12));
  CHECK(included_angle({2, 0}, b) == Approx(0.2450).epsilon(1e-4));
  CHECK(std::acos(4 / std::sqrt(17.0)) == Approx(included_angle({2, 0}, b)));
  CHECK(included_angle({2, 1}, {5, 1}) == Approx(0.0));
  CHECK(included_angle({2, 0.1}, {2, 2 * kPi - 0.1}) == Approx(0.2));
  CHECK_THROWS_AS(included_angle({0, 0}, {1, 1}), Error);
}
