#include "hcpack/gen.hpp"
#include "hcpack/nfdh.hpp"
#include "support.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace hcpack;
using namespace testing_support;

TEST_CASE("four quarter squares fill the unit square in two levels", "[nfdh]") {
  NfdhResult r = nfdh_pack(items_of({"1/2", "1/2", "1/2", "1/2"}), unit(2));
  REQUIRE(r.all_packed());
  REQUIRE(verify_packing(r.packed).ok());
  std::vector<NfdhLevel> top;
  for (const auto& l : r.levels)
    if (l.depth == 0) top.push_back(l);
  REQUIRE(top.size() == 2);
  REQUIRE(top[0].height == Q("1/2"));
  REQUIRE(top[1].start == Q("1/2"));
}

TEST_CASE("3/5 blocks 1/2 in the unit square", "[nfdh]") {
  NfdhResult r = nfdh_pack(items_of({"3/5", "1/2"}), unit(2));
  REQUIRE(r.packed.placements.size() == 1);
  REQUIRE(r.packed.placements[0].item.side == Q("3/5"));
  REQUIRE(r.leftover_ids() == std::vector<int>{1});
}

TEST_CASE("fifteen cubes of side 1/3 in the unit cube", "[nfdh]") {
  std::vector<Item> items;
  for (int i = 0; i < 15; ++i) items.push_back(item(i, "1/3"));
  NfdhResult r = nfdh_pack(items, unit(3));
  REQUIRE(r.all_packed());
  REQUIRE(verify_packing(r.packed).ok());
  // shelf order: x fastest, then y, then z
  REQUIRE(r.packed.placements[1].pos == Qs({"1/3", "0", "0"}));
  REQUIRE(r.packed.placements[3].pos == Qs({"0", "1/3", "0"}));
  REQUIRE(r.packed.placements[14].pos == Qs({"2/3", "1/3", "1/3"}));
}

TEST_CASE("oversized items go straight to leftovers", "[nfdh]") {
  NfdhResult r = nfdh_pack(items_of({"1", "1/4"}), Cuboid({0, 0}, {2, Q("1/2")}));
  REQUIRE(r.leftover_ids() == std::vector<int>{0});
  REQUIRE(r.packed.placements.size() == 1);
}

TEST_CASE("ties on side are broken by ascending id", "[nfdh]") {
  std::vector<Item> items{item(5, "1/2"), item(2, "1/2"), item(9, "1/2")};
  NfdhResult r = nfdh_pack(items, unit(2));
  REQUIRE(r.packed.placements[0].item.id == 2);
  REQUIRE(r.packed.placements[1].item.id == 5);
  REQUIRE(r.packed.placements[2].item.id == 9);
}

TEST_CASE("check_guarantee", "[nfdh]") {
  SECTION("all packed is fine") {
    NfdhResult r = nfdh_pack(items_of({"1/2", "1/2"}), unit(2));
    REQUIRE(check_guarantee(r, Q("1/2")).ok);
  }
  SECTION("precondition") {
    NfdhResult r = nfdh_pack(items_of({"1/2"}), unit(2));
    REQUIRE_THROWS_AS(check_guarantee(r, Q("1/4")), std::invalid_argument);
  }
  SECTION("fabricated violation is caught") {
    std::vector<Item> items;
    for (int i = 0; i < 16; ++i) items.push_back(item(i, "1/4"));
    NfdhResult r = nfdh_pack(items, unit(2));
    // move twelve packed items to the leftovers: free volume 3/4 > (1/4)*4/2
    for (int i = 0; i < 12; ++i) {
      r.leftovers.push_back(r.packed.placements.back().item);
      r.packed.placements.pop_back();
    }
    auto g = check_guarantee(r, Q("1/4"));
    REQUIRE_FALSE(g.ok);
    REQUIRE(g.free_volume == Q("3/4"));
  }
}

TEST_CASE("NFDH leaves at most delta*SURF/2 free on random instances", "[nfdh][property]") {
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    std::size_t d = 2 + seed % 2;
    auto inst = random_instance(d, 5 + seed % 60, {Scalar(1, 30), Scalar(1, 3), 90}, {}, seed);
    NfdhResult r = nfdh_pack(inst.items, unit(d));
    REQUIRE(verify_packing(r.packed).ok());
    REQUIRE(r.packed.placements.size() + r.leftovers.size() == inst.items.size());
    REQUIRE(check_guarantee(r, max_side(inst.items)).ok);
  }
}

TEST_CASE("NFDH is deterministic and monotone under subsets", "[nfdh][property]") {
  std::mt19937_64 rng(3);
  for (std::uint64_t seed = 0; seed < 80; ++seed) {
    std::size_t d = 2 + seed % 2;
    auto inst = random_instance(d, 3 + seed % 20, {Scalar(1, 10), Scalar(1, 2), 20}, {}, 1000 + seed);
    NfdhResult a = nfdh_pack(inst.items, unit(d));
    NfdhResult b = nfdh_pack(inst.items, unit(d));
    REQUIRE(a.packed.placements.size() == b.packed.placements.size());
    for (std::size_t i = 0; i < a.packed.placements.size(); ++i) {
      REQUIRE(a.packed.placements[i].item.id == b.packed.placements[i].item.id);
      REQUIRE(a.packed.placements[i].pos == b.packed.placements[i].pos);
    }
    if (!a.all_packed()) continue;
    for (int t = 0; t < 5; ++t) {
      std::vector<Item> sub;
      for (const auto& it : inst.items)
        if (rng() % 2) sub.push_back(it);
      REQUIRE(nfdh_pack(sub, unit(d)).all_packed());
    }
  }
}
