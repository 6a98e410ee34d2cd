#include "hcpack/geometry.hpp"
#include "support.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace hcpack;
using namespace testing_support;

TEST_CASE("volume of cuboids and item sets", "[geometry]") {
  REQUIRE(volume(unit(2)) == 1);
  REQUIRE(volume(Cuboid({0, 0}, {1, 2})) == 2);
  std::vector<Item> quarters = items_of({"1/2", "1/2", "1/2", "1/2"});
  REQUIRE(total_volume(quarters, 2) == 1);
}

TEST_CASE("surface", "[geometry]") {
  REQUIRE(surface(unit(3)) == 6);
  REQUIRE(surface(Cuboid({0, 0}, {1, 2})) == 6);
  REQUIRE(surface(Cuboid({0, 0, 0}, {1, 2, 3})) == 22);
}

TEST_CASE("cuboids reject non-positive sides", "[geometry]") {
  REQUIRE_THROWS_AS(Cuboid({0, 0}, {1, 0}), std::invalid_argument);
  REQUIRE_THROWS_AS(Cuboid({0}, {1, 1}), std::invalid_argument);
  REQUIRE_NOTHROW(Cuboid::degenerate({0, 0}, {1, 0}));
  REQUIRE_THROWS_AS(make_item(0, Q("3/2"), 1), std::invalid_argument);
  REQUIRE_THROWS_AS(make_item(0, Q("1/2"), 0), std::invalid_argument);
}

TEST_CASE("verify_packing", "[geometry]") {
  Item a = item(0, "1/2"), b = item(1, "1/2");
  SECTION("touching is allowed") {
    Packing p{unit(2), {{a, {0, 0}}, {b, {Q("1/2"), 0}}}};
    REQUIRE(verify_packing(p).ok());
  }
  SECTION("full overlap") {
    Packing p{unit(2), {{a, {0, 0}}, {b, {0, 0}}}};
    auto r = verify_packing(p);
    REQUIRE_FALSE(r.ok());
    REQUIRE(r.violation->kind == Violation::Kind::Overlap);
    REQUIRE(r.violation->first == 0);
    REQUIRE(r.violation->second == 1);
  }
  SECTION("containment") {
    Packing p{unit(2), {{a, {Q("3/4"), 0}}}};
    auto r = verify_packing(p);
    REQUIRE_FALSE(r.ok());
    REQUIRE(r.violation->kind == Violation::Kind::Containment);
    REQUIRE(r.violation->first == 0);
  }
  SECTION("duplicate ids") {
    Packing p{unit(2), {{a, {0, 0}}, {a, {Q("1/2"), 0}}}};
    REQUIRE(verify_packing(p).violation->kind == Violation::Kind::DuplicateId);
  }
}

TEST_CASE("project", "[geometry]") {
  Cuboid c({0, 0, 0}, {1, 2, 3});
  REQUIRE(project(c, {0, 2}).sides() == std::vector<Scalar>{1, 3});
  REQUIRE(project(c, {0, 1, 2}) == c);
  REQUIRE(project(Cuboid({0, 0}, {1, 2}), {1}).sides() == std::vector<Scalar>{2});
  REQUIRE_THROWS_AS(project(c, {}), std::invalid_argument);
  REQUIRE_THROWS_AS(project(c, {2, 0}), std::invalid_argument);
}

namespace {

Scalar rnd(std::mt19937_64& rng, long lo, long hi, long den) {
  return frac(std::uniform_int_distribution<long>(lo, hi)(rng), den);
}

Cuboid random_cuboid(std::mt19937_64& rng, std::size_t d) {
  Point lo(d);
  std::vector<Scalar> s(d);
  for (std::size_t i = 0; i < d; ++i) {
    lo[i] = rnd(rng, -20, 20, 7);
    s[i] = rnd(rng, 1, 40, 9);
  }
  return Cuboid(lo, s);
}

}  // namespace

TEST_CASE("surface equals 2 * sum VOL / l_i on random cuboids", "[geometry][property]") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 300; ++t) {
    Cuboid c = random_cuboid(rng, 1 + t % 5);
    Scalar s = 0;
    for (std::size_t i = 0; i < c.dim(); ++i) s += c.volume() / c.side(i);
    REQUIRE(c.surface() == 2 * s);
  }
}

TEST_CASE("verify_packing is order-symmetric and translation invariant", "[geometry][property]") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 200; ++t) {
    std::size_t d = 2 + t % 2;
    Packing p{Cuboid::unit(d), {}};
    int n = 2 + t % 5;
    for (int i = 0; i < n; ++i) {
      Scalar side = rnd(rng, 1, 4, 8);
      Point pos(d);
      for (auto& x : pos) x = rnd(rng, 0, 8 - side.get_num().get_si(), 8);
      p.placements.push_back({Item{i, side, 1}, pos});
    }
    bool ok = verify_packing(p).ok();
    Packing rev = p;
    std::reverse(rev.placements.begin(), rev.placements.end());
    REQUIRE(verify_packing(rev).ok() == ok);
    Point off(d);
    for (auto& x : off) x = rnd(rng, -9, 9, 5);
    Packing moved{p.container.translated(off), {}};
    for (auto pl : p.placements) {
      for (std::size_t i = 0; i < d; ++i) pl.pos[i] += off[i];
      moved.placements.push_back(pl);
    }
    REQUIRE(verify_packing(moved).ok() == ok);
  }
}

TEST_CASE("shrinking a cuboid by at most s per side keeps the V-budget", "[geometry][property]") {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 300; ++t) {
    std::size_t d = 1 + t % 4;
    Scalar s = rnd(rng, 1, 10, 10);
    Point lo(d, Scalar(0));
    std::vector<Scalar> big(d), small(d);
    for (std::size_t i = 0; i < d; ++i) {
      big[i] = s + rnd(rng, 1, 60, 6);
      small[i] = big[i] - s * rnd(rng, 0, 10, 10);
    }
    Cuboid B(lo, big), B2(lo, small);
    REQUIRE(B2.volume() - s * B2.surface() / 2 >= B.volume() - s * B.surface());
  }
}
