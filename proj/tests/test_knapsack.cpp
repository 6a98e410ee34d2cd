#include <catch_amalgamated.hpp>

#include "hcpack/knapsack.hpp"
#include "hcpack/structure.hpp"
#include "support.hpp"

using namespace hcpack;
using namespace testing_support;

namespace {

KnapsackInstance inst(std::size_t d, std::initializer_list<std::pair<const char*, const char*>> items,
                      const char* eps = "1/4") {
  KnapsackInstance k;
  k.d = d;
  k.epsilon = Q(eps);
  int id = 0;
  for (const auto& [s, p] : items) k.items.push_back(item(id++, s, p));
  return k;
}

KnapsackInstance repeat(std::size_t d, const char* side, int n) {
  KnapsackInstance k;
  k.d = d;
  for (int i = 0; i < n; ++i) k.items.push_back(item(i, side));
  return k;
}

}  // namespace

// ---------------------------------------------------------------- oracle

TEST_CASE("oracle_opt: five half squares, only four fit") {
  auto r = oracle_opt(repeat(2, "1/2", 5));
  REQUIRE(r.profit == 4);
  REQUIRE(r.witness.placements.size() == 4);
  REQUIRE(verify_packing(r.witness).ok());
}

TEST_CASE("oracle_opt: 3/5 and 1/2 cannot coexist") {
  auto r = oracle_opt(inst(2, {{"3/5", "10"}, {"1/2", "1"}}));
  REQUIRE(r.profit == 10);
}

TEST_CASE("oracle_opt: single item and empty instance") {
  REQUIRE(oracle_opt(inst(2, {{"1", "7/2"}})).profit == Q("7/2"));
  REQUIRE(oracle_opt(inst(3, {})).profit == 0);
}

TEST_CASE("oracle_opt: values from an independent brute force") {
  REQUIRE(oracle_opt(inst(2, {{"2/5", "3"}, {"2/5", "3"}, {"2/5", "3"}, {"3/5", "7"}, {"1/3", "2"}, {"1/3", "2"}})).profit ==
          16);
  REQUIRE(oracle_opt(repeat(2, "1/3", 7)).profit == 7);
  REQUIRE(oracle_opt(inst(2, {{"7/10", "9"}, {"3/10", "2"}, {"3/10", "2"}, {"3/10", "2"}, {"3/10", "2"}, {"2/5", "5"}}))
              .profit == 17);
  REQUIRE(oracle_opt(inst(3, {{"3/5", "5"}, {"1/2", "2"}, {"2/5", "1"}, {"2/5", "1"}, {"2/5", "1"}})).profit == 8);
}

TEST_CASE("oracle_opt: eight half cubes in 3-D, nine do not fit") {
  KnapsackInstance k = repeat(3, "1/2", 9);
  auto r = oracle_opt(k, 9);
  REQUIRE(r.profit == 8);
}

TEST_CASE("oracle_opt: size cap") {
  REQUIRE_THROWS_AS(oracle_opt(repeat(2, "1/4", 8)), std::invalid_argument);
  REQUIRE_THROWS_AS(oracle_opt(repeat(4, "1/4", 2)), std::invalid_argument);
}

// ---------------------------------------------------------------- GAP

TEST_CASE("gap_solve: N-Box count cap") {
  GapInstance g;
  g.boxes.push_back(make_box(BoxKind::N, Cuboid(Point{0, 0}, Qs({"1/2", "1/4"})), Q("1/4")));
  g.items = {item(0, "1/4"), item(1, "1/5"), item(2, "1/8")};
  auto r = gap_solve(g);
  REQUIRE(r.profit == 2);
  REQUIRE(r.exact);
}

TEST_CASE("gap_solve: V-Box subset choice") {
  // d=1, scaled by 1/16: budget = length - s_hat = 1 - 1/2 = 8/16 for volumes 5/16, 4/16, 3/16.
  GapInstance g;
  g.boxes.push_back(make_box(BoxKind::V, Cuboid(Point{0}, Qs({"1"})), Q("1/2")));
  g.items = {item(0, "5/16", "5"), item(1, "4/16", "4"), item(2, "3/16", "3")};
  REQUIRE(g.capacity_of(0) == Q("8/16"));
  auto r = gap_solve(g);
  REQUIRE(r.profit == 8);
  REQUIRE(r.assignment[0] == 0u);
  REQUIRE_FALSE(r.assignment[1].has_value());
  REQUIRE(r.assignment[2] == 0u);
}

TEST_CASE("gap_solve: no boxes") {
  GapInstance g;
  g.items = {item(0, "1/4")};
  auto r = gap_solve(g);
  REQUIRE(r.profit == 0);
  REQUIRE_FALSE(r.assignment[0].has_value());
}

TEST_CASE("gap_solve: respects capacities; fallbacks report bounds") {
  std::mt19937_64 rng(3);
  for (int round = 0; round < 40; ++round) {
    GapInstance g;
    g.boxes.push_back(make_box(BoxKind::V, Cuboid(Point{0, 0}, Qs({"1/2", "1/2"})), Q("1/10")));
    g.boxes.push_back(make_box(BoxKind::N, Cuboid(Point{Q("1/2"), 0}, Qs({"1/5", "1/5"})), Q("1/10")));
    const int n = round < 30 ? 12 : 40;
    for (int i = 0; i < n; ++i)
      g.items.push_back(make_item(i, frac(std::uniform_int_distribution<long>(1, 12)(rng), 100),
                                  Scalar(std::uniform_int_distribution<long>(1, 9)(rng))));
    GapOptions opt;
    if (round >= 35) opt.lp_items = 0;
    auto r = gap_solve(g, opt);
    const auto groups = r.per_box(g);
    Scalar p = 0;
    for (std::size_t j = 0; j < g.boxes.size(); ++j) {
      REQUIRE(admissible(g.boxes[j], groups[j]).ok());
      p += total_profit(groups[j]);
      Packing pk = pack_box(g.boxes[j], groups[j]);
      REQUIRE(verify_packing(pk).ok());
    }
    REQUIRE(p == r.profit);
    if (!r.exact) {
      REQUIRE(r.upper_bound.has_value());
      REQUIRE(r.profit <= *r.upper_bound);
    }
  }
}

TEST_CASE("gap_solve: branch and bound matches brute force") {
  std::mt19937_64 rng(9);
  for (int round = 0; round < 30; ++round) {
    GapInstance g;
    g.boxes.push_back(make_box(BoxKind::V, Cuboid(Point{0, 0}, Qs({"2/5", "2/5"})), Q("1/10")));
    g.boxes.push_back(make_box(BoxKind::N, Cuboid(Point{0, Q("1/2")}, Qs({"1/5", "1/10"})), Q("1/10")));
    for (int i = 0; i < 8; ++i)
      g.items.push_back(make_item(i, frac(std::uniform_int_distribution<long>(3, 15)(rng), 100),
                                  Scalar(std::uniform_int_distribution<long>(1, 9)(rng))));
    auto r = gap_solve(g);
    // Every item into box 0, box 1 or nowhere: 3^8 choices.
    Scalar best = 0;
    for (int code = 0; code < 6561; ++code) {
      std::vector<std::vector<Item>> grp(2);
      int c = code;
      for (int i = 0; i < 8; ++i, c /= 3)
        if (c % 3 < 2) grp[c % 3].push_back(g.items[i]);
      if (admissible(g.boxes[0], grp[0]).ok() && admissible(g.boxes[1], grp[1]).ok())
        best = std::max(best, Scalar(total_profit(grp[0]) + total_profit(grp[1])));
    }
    REQUIRE(r.profit == best);
  }
}

// ---------------------------------------------------------------- greedy

TEST_CASE("greedy_baseline: empty, single, valid") {
  REQUIRE(greedy_baseline(inst(2, {})).profit == 0);
  REQUIRE(greedy_baseline(inst(2, {{"3/4", "5"}})).profit == 5);
  auto k = random_instance(2, 60, {Q("1/20"), Q("1/2"), 40}, {1, 9}, 4);
  auto r = greedy_baseline(k);
  REQUIRE(verify_packing(r.packing).ok());
  REQUIRE(r.profit == r.packing.profit());
}

TEST_CASE("greedy_baseline: density order") {
  // The dense small item comes first; the big one no longer fits beside it.
  auto r = greedy_baseline(inst(2, {{"3/5", "3"}, {"1/2", "10"}}));
  REQUIRE(r.profit == 10);
}

// ---------------------------------------------------------------- structured solver

TEST_CASE("structured_solve: empty instance") {
  auto r = structured_solve(inst(2, {}));
  REQUIRE(r.certificate.profit == 0);
  REQUIRE_FALSE(r.certificate.exhausted);
}

TEST_CASE("structured_solve: two large high-profit items are placed loose") {
  auto k = inst(2, {{"1/2", "10"}, {"1/2", "10"}, {"3/5", "1"}});
  auto o = oracle_opt(k);
  auto r = structured_solve(k);
  certify_against_oracle(r, o);
  REQUIRE(r.certificate.profit == 20);
  REQUIRE(r.loose.size() == 2);
  REQUIRE(r.boxes.empty());
  REQUIRE(*r.certificate.ratio_vs_oracle == 1);
}

TEST_CASE("structured_solve: micro-items that all fit") {
  // 100 squares of side 1/12 fit on the 12 x 12 grid, so OPT = 100.
  auto r = structured_solve(repeat(2, "1/12", 100));
  REQUIRE(r.certificate.profit >= Q("3/4") * 100);
  REQUIRE(verify_packing(r.packing).ok());
}

TEST_CASE("structured_solve: a loose item plus boxes beats the density order") {
  // Greedy takes the 100 micro-items (density 144) first and then has no room
  // for the 1/2 square (density 120). Loose 1/2 plus N-Boxes of 1 x 1/2 and
  // 1/2 x 1/2 hold 72 + 36 >= 100 micro-items: 130.
  KnapsackInstance k;
  k.d = 2;
  for (int i = 0; i < 100; ++i) k.items.push_back(item(i, "1/12", "1"));
  k.items.push_back(item(100, "1/2", "30"));
  REQUIRE(greedy_baseline(k).profit == 100);
  SolveBudgets b;
  b.max_large = 1;
  b.max_boxes = 2;
  auto r = structured_solve(k, b);
  REQUIRE(r.certificate.profit == 130);
  REQUIRE(r.certificate.source == "enumeration");
  REQUIRE(r.loose.size() == 1);
  REQUIRE(r.boxes.size() == 2);
  REQUIRE(verify_packing(r.packing).ok());
}

TEST_CASE("structured_solve: matches the oracle on small random instances") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    auto k = random_instance(2, 5, {Q("1/5"), Q("3/4"), 20}, {1, 9}, seed);
    auto o = oracle_opt(k);
    SolveBudgets b;
    b.max_large = 5;
    auto r = structured_solve(k, b);
    certify_against_oracle(r, o);
    REQUIRE(r.certificate.profit >= (1 - k.epsilon) * o.profit);
    REQUIRE(r.certificate.profit >= greedy_baseline(k).profit);
    REQUIRE(verify_packing(r.packing).ok());
  }
}

TEST_CASE("structured_solve: budget exhaustion is flagged") {
  auto k = random_instance(2, 30, {Q("1/20"), Q("1/3"), 60}, {1, 9}, 7);
  SolveBudgets b;
  b.max_candidates = 5;
  auto r = structured_solve(k, b);
  REQUIRE(r.certificate.exhausted);
  REQUIRE(verify_packing(r.packing).ok());
  REQUIRE(r.certificate.profit >= greedy_baseline(k).profit);
}

// ---------------------------------------------------------------- with the structure module

TEST_CASE("transform: oracle-optimal packings keep enough profit") {
  auto t = constants(2, Q("1/20")).alpha;
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    auto k = random_instance(2, 6, {Q("1/10"), Q("3/5"), 30}, {1, 9}, seed, Q("1/20"));
    auto o = oracle_opt(k);
    auto s = transform(o.witness, t);
    REQUIRE(verify_packing(s.packing).ok());
    REQUIRE(s.retained_profit >= (1 - 16 * Q("1/20")) * o.profit);
  }
}
