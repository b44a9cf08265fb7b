#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "pursuit/capture.hpp"
#include "pursuit/error.hpp"
#include "pursuit/geometry.hpp"

using namespace pursuit;
using doctest::Approx;

namespace {

std::vector<Vec2> regular_polygon(int n, double radius) {
  std::vector<Vec2> out;
  for (int i = 0; i < n; ++i) {
    out.push_back(radius * unit_from_angle(2 * kPi * i / n));
  }
  return out;
}

const std::vector<Vec2> kTwelve{{10, 0},    {8.7, 5},    {5, 8.7},  {0, 10},
                                {-5, 8.7},  {-8.7, 5},   {-10, 0},  {-8.7, -5},
                                {-5, -8.7}, {0, -10},    {5, -8.7}, {8.7, -5}};

std::vector<NeighborSets> ring_sets(int n) {
  std::vector<NeighborSets> sets(n);
  for (int i = 0; i < n; ++i) {
    sets[i].polygon = {(i + n - 1) % n, (i + 1) % n};
    for (int j = 0; j < n; ++j) {
      if (j != i) sets[i].omega.push_back(j);
    }
  }
  return sets;
}

}  // namespace

TEST_CASE("close pursuers overlap") {
  const PolarCoord a = to_local_polar({2, 0}, {0, 0});
  const PolarCoord b = to_local_polar({2, 0.5}, {0, 0});
  CHECK(lemma1_holds(a, b, 0.95, 0.95, 1.0));
  const double phi = oracle::law_of_cosines_angle({2, 0}, {2, 0.5});
  CHECK(phi == Approx(0.2450).epsilon(1e-4));
  CHECK(phi - occupied_angle(0.95) < 0.0);
  CHECK(occupied_angle(0.95) == Approx(2 * std::asin(0.95)));
  CHECK(phi - occupied_angle(0.95) == Approx(0.2450 - 2.5065).epsilon(1e-3));

  const PolarCoord c = to_local_polar({0, 2}, {0, 0});
  CHECK(polar_distance(a, c) == Approx(2.828).epsilon(1e-3));
  CHECK_FALSE(lemma1_holds(a, c, 0.95, 0.95, 1.0));
  CHECK_FALSE(lemma1_holds(a, b, 1e-9, 1e-9, 1.0));
}

TEST_CASE("lemma 1 signals a pursuer already within capture distance") {
  try {
    lemma1_holds({0.5, 0}, {2, 1}, 0.9, 0.9, 1.0);
    FAIL("expected an error");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::kAlreadyCaptured);
  }
}

TEST_CASE("lemma 1 brute force on random pairs") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u01(0, 1), ang(0, 2 * kPi);
  int tested = 0;
  while (tested < 2000) {
    const double d_c = 0.2 + 3 * u01(rng);
    const double la = 0.05 + 0.94 * u01(rng), lb = 0.05 + 0.94 * u01(rng);
    const PolarCoord a{d_c * (1 + 5 * u01(rng)) + 1e-9, ang(rng)};
    const Vec2 pa = from_local_polar(a);
    const double d = 2 * d_c * std::min(la, lb) * u01(rng);
    const Vec2 pb = pa + d * unit_from_angle(ang(rng));
    if (norm(pb) <= d_c) continue;
    ++tested;
    const PolarCoord b = to_local_polar(pb, {0, 0});
    CHECK(lemma1_holds(a, b, la, lb, d_c));
    const double phi = oracle::law_of_cosines_angle(pa, pb);
    CHECK(phi - (occupied_angle(la) + occupied_angle(lb)) / 2 <= 1e-12);
  }
}

TEST_CASE("strict interiority by winding number") {
  const std::vector<Vec2> sq{{0, 0}, {2, 0}, {2, 2}, {0, 2}};
  CHECK(strictly_inside(sq, {1, 1}));
  CHECK_FALSE(strictly_inside(sq, {3, 1}));
  CHECK_FALSE(strictly_inside(sq, {2, 1}));
  CHECK_FALSE(strictly_inside(sq, {0, 0}));
  std::vector<Vec2> cw(sq.rbegin(), sq.rend());
  CHECK(strictly_inside(cw, {1, 1}));
}

TEST_CASE("regular 12-gon certifies full coverage") {
  const auto poly = regular_polygon(12, 10);
  CHECK(distance(poly[0], poly[1]) == Approx(2 * 10 * std::sin(kPi / 12)));
  CHECK(distance(poly[0], poly[1]) == Approx(5.176).epsilon(1e-3));
  CHECK(lemma2_holds(poly, {0, 0}, {3.1, 0.95}));
  std::vector<PolarCoord> polars;
  for (const Vec2 &p : poly) polars.push_back(to_local_polar(p, {0, 0}));
  const std::vector<double> lam(12, 0.95);
  CHECK(ring_view(polars, lam).group_occupied == Approx(2 * kPi));
}

TEST_CASE("lemma 2 rejects long edges and degenerate polygons") {
  const auto tri = regular_polygon(3, 10 / std::sqrt(3.0));
  CHECK(distance(tri[0], tri[1]) == Approx(10));
  CHECK_FALSE(lemma2_holds(tri, {0, 0}, {1.0, 0.9}));
  const std::vector<Vec2> two{{1, 0}, {-1, 0}};
  try {
    lemma2_holds(two, {0, 0}, {1, 0.9});
    FAIL("expected an error");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::kNotApplicable);
  }
  try {
    lemma2_holds(tri, {50, 0}, {1, 0.9});
    FAIL("expected an error");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::kNotApplicable);
  }
}

TEST_CASE("lemma 2 agrees with the ring on random polygons") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> jitter(-0.05, 0.05), rad(7, 9),
      lam(0.6, 0.99);
  int certified = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const int n = 8 + trial % 12;
    std::vector<Vec2> poly;
    for (int i = 0; i < n; ++i) {
      poly.push_back(rad(rng) * unit_from_angle(2 * kPi * i / n + jitter(rng)));
    }
    const double l = lam(rng);
    if (!lemma2_holds(poly, {0, 0}, {3.1, l})) continue;
    ++certified;
    std::vector<PolarCoord> polars;
    for (const Vec2 &p : poly) polars.push_back(to_local_polar(p, {0, 0}));
    const std::vector<double> ls(n, l);
    CHECK(ring_view(polars, ls).group_occupied == Approx(2 * kPi));
  }
  CHECK(certified > 20);
}

TEST_CASE("polygon cycle from neighbor sets") {
  const std::vector<std::vector<int>> s{{3, 1}, {0, 2}, {1, 3}, {2, 0}};
  const auto c = polygon_cycle(s);
  REQUIRE(c);
  CHECK(c->size() == 4);
  const std::vector<std::vector<int>> broken{{1, 2}, {0, 2}, {0, 1}, {0, 1}};
  CHECK_FALSE(polygon_cycle(broken));
}

TEST_CASE("twelve pursuer start is certified") {
  const FieldParams f{3.5, 5.7, 0.5, 3.0, 1.0};
  const auto sets = ring_sets(12);
  const CaptureCertificate c =
      theorem2_certificate(kTwelve, {0, 0}, f, {3.1, 0.95}, sets);
  CHECK(c.cond_edges_ok);
  CHECK(c.cond_separation_ok);
  CHECK(c.cond_radii_ok);
  CHECK(c.cond_topology_ok);
  CHECK(c.evader_inside);
  CHECK(c.guaranteed);
}

TEST_CASE("certificate failures") {
  const auto sets = ring_sets(12);
  SUBCASE("maintenance radius too large") {
    const FieldParams f{3.5, 6.0, 0.5, 3.0, 1.0};
    const CaptureCertificate c =
        theorem2_certificate(kTwelve, {0, 0}, f, {3.1, 0.95}, sets);
    CHECK_FALSE(c.cond_radii_ok);
    CHECK_FALSE(c.guaranteed);
  }
  SUBCASE("evader outside") {
    const FieldParams f{3.5, 5.7, 0.5, 3.0, 1.0};
    const CaptureCertificate c =
        theorem2_certificate(kTwelve, {30, 0}, f, {3.1, 0.95}, sets);
    CHECK_FALSE(c.evader_inside);
    CHECK_FALSE(c.guaranteed);
  }
  SUBCASE("polygon neighbor outside the sensed set") {
    const FieldParams f{3.5, 5.7, 0.5, 3.0, 1.0};
    auto bad = sets;
    bad[0].omega = {1};
    const CaptureCertificate c =
        theorem2_certificate(kTwelve, {0, 0}, f, {3.1, 0.95}, bad);
    CHECK_FALSE(c.cond_topology_ok);
    CHECK_FALSE(c.guaranteed);
  }
  SUBCASE("tightening a radius never helps") {
    const FieldParams base{3.5, 5.7, 0.5, 3.0, 1.0};
    for (double r_f : {5.7, 5.8, 5.9, 6.5}) {
      FieldParams f = base;
      f.r_f = r_f;
      const bool g =
          theorem2_certificate(kTwelve, {0, 0}, f, {3.1, 0.95}, sets).guaranteed;
      if (r_f > 2 * 3.1 * 0.95) CHECK_FALSE(g);
    }
    for (double r_o : {0.5, 2.0, 4.0, 5.0}) {
      FieldParams f = base;
      f.r_o = r_o;
      const bool g =
          theorem2_certificate(kTwelve, {0, 0}, f, {3.1, 0.95}, sets).guaranteed;
      if (r_o >= 3.0) CHECK_FALSE(g);
    }
  }
}

TEST_CASE("capture check") {
  const std::vector<Vec2> a{{0.99, 0}, {5, 5}};
  const auto hit = capture_check(a, {0, 0}, 1.0);
  REQUIRE(hit);
  CHECK(hit->pursuer == 0);
  const std::vector<Vec2> none{{3, 0}, {0, 2}};
  CHECK_FALSE(capture_check(none, {0, 0}, 1.0));
  const std::vector<Vec2> two{{0.5, 0}, {0, 0.3}};
  const auto best = capture_check(two, {0, 0}, 1.0);
  REQUIRE(best);
  CHECK(best->pursuer == 1);
  CHECK(best->distance == Approx(0.3));
  const std::vector<Vec2> boundary{{1.0, 0}};
  CHECK(capture_check(boundary, {0, 0}, 1.0));
}
