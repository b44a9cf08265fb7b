#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "pursuit/evader.hpp"
#include "pursuit/geometry.hpp"

using namespace pursuit;
using doctest::Approx;

namespace {
EvaderSpec flee_spec(double speed, bool origin_term = true) {
  EvaderSpec s;
  s.max_speed = speed;
  s.flee_gain = 140;
  s.origin_term = origin_term;
  return s;
}
}  // namespace

TEST_CASE("flee away from a single pursuer") {
  const std::vector<Vec2> p{{40, 0}};
  // 140 * (2 - 40) / 38 + 2 = -138
  const auto v = flee_velocity({2, 0}, p, flee_spec(2));
  REQUIRE(v);
  CHECK(v->x == Approx(-2.0));
  CHECK(v->y == Approx(0.0));

  const auto w = flee_velocity({0, 0}, p, flee_spec(1.5));
  REQUIRE(w);
  CHECK(w->x == Approx(-1.5));
  CHECK(w->y == Approx(0.0));
}

TEST_CASE("symmetric pursuers leave only the origin term") {
  const std::vector<Vec2> p{{1, 5}, {1, -5}};
  const auto v = flee_velocity({1, 0}, p, flee_spec(2));
  REQUIRE(v);
  CHECK(v->x == Approx(2.0));
  CHECK(v->y == Approx(0.0).scale(1.0).epsilon(1e-12));
  // Without the origin term the direction argument vanishes.
  CHECK_FALSE(flee_velocity({1, 0}, p, flee_spec(2, false)));
}

TEST_CASE("flee law is scale covariant in the pursuer term") {
  const std::vector<Vec2> near{{3, 1}, {-2, 4}, {0, -5}};
  std::vector<Vec2> far;
  for (const Vec2 &q : near) far.push_back(2.0 * q);
  const auto a = flee_velocity({0, 0}, near, flee_spec(1, false));
  const auto b = flee_velocity({0, 0}, far, flee_spec(1, false));
  REQUIRE(a);
  REQUIRE(b);
  CHECK(a->x == Approx(b->x));
  CHECK(a->y == Approx(b->y));
}

TEST_CASE("flee speed is exactly the maximum") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-50, 50);
  for (int k = 0; k < 1000; ++k) {
    const std::vector<Vec2> p{{u(rng), u(rng)}, {u(rng), u(rng)}};
    const auto v = flee_velocity({u(rng), u(rng)}, p, flee_spec(2));
    REQUIRE(v);
    CHECK(norm(*v) == Approx(2.0).epsilon(1e-15));
  }
}

TEST_CASE("flee holds its heading when the argument vanishes") {
  EvaderController c(flee_spec(2, false));
  const std::vector<Vec2> away{{5, 0}};
  const Vec2 first = c.velocity(0, 0.01, {0, 0}, away);
  CHECK(first.x == Approx(-2));
  const std::vector<Vec2> balanced{{5, 0}, {-5, 0}};
  const Vec2 held = c.velocity(0.01, 0.01, {0, 0}, balanced);
  CHECK(held == first);
}

TEST_CASE("external steering is a zero-order hold") {
  CHECK(external_command(std::nullopt, 2.0) == Vec2{0, 0});
  const Vec2 east = external_command(SteerCommand::towards(0.0), 2.0);
  CHECK(east.x == Approx(2.0));
  CHECK(east.y == Approx(0.0));
  const Vec2 west = external_command(SteerCommand::towards(kPi), 2.0);
  CHECK(west.x == Approx(-2.0));
  CHECK(external_command(SteerCommand::stop(), 2.0) == Vec2{0, 0});

  EvaderSpec spec;
  spec.max_speed = 1.0;
  spec.strategy = EvaderStrategy::kExternal;
  EvaderController c(spec);
  const std::vector<Vec2> p{{5, 0}};
  CHECK(c.velocity(0, 0.1, {0, 0}, p) == Vec2{0, 0});
  c.command(SteerCommand::towards(kPi / 2));
  // The command stays in force however old it gets.
  for (int k = 1; k < 100; ++k) {
    const Vec2 v = c.velocity(k * 0.1, 0.1, {0, 0}, p);
    CHECK(v.y == Approx(1.0));
  }
}

TEST_CASE("static evader does not move") {
  EvaderSpec spec;
  spec.max_speed = 1.0;
  spec.strategy = EvaderStrategy::kStatic;
  EvaderController c(spec);
  const std::vector<Vec2> p{{5, 0}};
  CHECK(c.velocity(0, 0.1, {0, 0}, p) == Vec2{0, 0});
}

TEST_CASE("scripted evader visits its waypoints and stops") {
  EvaderSpec spec;
  spec.max_speed = 1.0;
  spec.strategy = EvaderStrategy::kScripted;
  spec.waypoints = {{1, 0}, {1, 1}};
  EvaderController c(spec);
  Vec2 e{0, 0};
  const std::vector<Vec2> p{{9, 9}};
  for (int k = 0; k < 40; ++k) {
    const Vec2 v = c.velocity(k * 0.1, 0.1, e, p);
    CHECK(norm(v) <= 1.0 + 1e-12);
    e = e + 0.1 * v;
  }
  CHECK(e.x == Approx(1.0));
  CHECK(e.y == Approx(1.0));
}

TEST_CASE("random evader is seeded and piecewise constant") {
  EvaderSpec spec;
  spec.max_speed = 0.5;
  spec.strategy = EvaderStrategy::kRandom;
  spec.retarget_interval = 1.0;
  spec.seed = 42;
  EvaderController a(spec), b(spec);
  const std::vector<Vec2> p{{9, 9}};
  Vec2 prev;
  int changes = 0;
  for (int k = 0; k < 500; ++k) {
    const double t = k * 0.01;
    const Vec2 va = a.velocity(t, 0.01, {0, 0}, p);
    CHECK(va == b.velocity(t, 0.01, {0, 0}, p));
    CHECK(norm(va) == Approx(0.5));
    if (k > 0 && !(va == prev)) ++changes;
    prev = va;
  }
  CHECK(changes == 4);
  spec.seed = 43;
  EvaderController c(spec);
  CHECK_FALSE(c.velocity(0, 0.01, {0, 0}, p) ==
              EvaderController(EvaderSpec{a.spec()}).velocity(0, 0.01, {0, 0}, p));
}

TEST_CASE("strategy names round trip") {
  for (auto s : {EvaderStrategy::kFlee, EvaderStrategy::kStatic,
                 EvaderStrategy::kScripted, EvaderStrategy::kExternal,
                 EvaderStrategy::kRandom}) {
    CHECK(parse_evader_strategy(to_string(s)) == s);
  }
  CHECK_FALSE(parse_evader_strategy("teleport"));
}
