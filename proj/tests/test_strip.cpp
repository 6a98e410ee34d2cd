#include "hcpack/gen.hpp"
#include "hcpack/strip.hpp"
#include "support.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <set>

using namespace hcpack;
using namespace testing_support;

namespace {

Grid segment(std::initializer_list<const char*> bounds) { return Grid::full({Qs(bounds)}); }

StripInstance unit_strip(std::vector<Item> items, Scalar eps = Q("1/4")) {
  StripInstance in;
  in.d = 2;
  in.k = 1;
  in.A = segment({"0", "1"});
  in.items = std::move(items);
  in.epsilon = std::move(eps);
  in.alpha = 1 / max_side(in.items);
  in.N = 1;
  return in;
}

std::set<std::vector<unsigned long>> count_set(const ConfigEnumeration& e) {
  std::set<std::vector<unsigned long>> s;
  for (const auto& c : e.configs) s.insert(c.counts);
  return s;
}

void require_witnesses_valid(const ConfigEnumeration& e, const Grid& A) {
  auto cells = cells_of(A);
  for (const auto& c : e.configs) {
    std::vector<unsigned long> seen(c.counts.size(), 0);
    for (std::size_t a = 0; a < c.witness.size(); ++a) {
      ++seen[c.witness[a].group];
      REQUIRE(detail::covered_by(cells, c.witness[a].box));
      for (std::size_t b = a + 1; b < c.witness.size(); ++b)
        REQUIRE_FALSE(c.witness[a].box.interiors_intersect(c.witness[b].box));
    }
    REQUIRE(seen == c.counts);
  }
}

}  // namespace

TEST_CASE("classify: rho_1 and the trivial band", "[strip]") {
  StripInstance in;
  in.d = 2;
  in.k = 1;
  in.A = segment({"0", "1"});
  in.items = {item(0, "1"), item(1, "1/2")};
  in.alpha = 16;
  in.N = 1;
  in.epsilon = Q("1/4");
  auto c = classify(in);
  REQUIRE(c.rho[0] == Q("1/128"));
  REQUIRE(c.eta == 1);
  REQUIRE(c.medium.empty());
  REQUIRE(c.small.empty());
  REQUIRE(c.large.size() == 2);
}

TEST_CASE("classify: pigeonhole pushes eta to the first light band", "[strip]") {
  // alpha = 1, s_hat = 1: rho_1 = 1/8, rho_2 = 1/128, rho_3 = 1/2048.
  std::vector<Item> items{item(0, "1")};
  for (int i = 1; i <= 200; ++i) items.push_back(item(i, "1/10"));  // band 1 holds volume 2 of 3
  auto in = unit_strip(items);
  auto c = classify(in);
  REQUIRE(c.rho[0] == Q("1/8"));
  REQUIRE(c.rho[1] == Q("1/128"));
  REQUIRE(c.rho[2] == Q("1/2048"));
  REQUIRE(c.eta == 2);
  REQUIRE(c.large.size() == 201);
  REQUIRE(c.medium.empty());

  // With little band-1 volume it stays at eta = 1.
  std::vector<Item> few{item(0, "1"), item(1, "1/10"), item(2, "1/200")};
  auto c1 = classify(unit_strip(few));
  REQUIRE(c1.eta == 1);
  REQUIRE(c1.medium.size() == 1);
  REQUIRE(c1.small.size() == 1);
}

TEST_CASE("classify: general base volume matches the rescaled thresholds", "[strip]") {
  // Doubling every length of the instance doubles every threshold.
  StripInstance in;
  in.d = 3;
  in.k = 1;
  in.A = Grid::full({Qs({"0", "1"}), Qs({"0", "1"})});
  in.items = {item(0, "1/2"), item(1, "1/4")};
  in.alpha = 2;
  in.N = 1;
  in.epsilon = Q("1/4");
  auto c = classify(in);
  StripInstance big = in;
  big.A = Grid::full({Qs({"0", "2"}), Qs({"0", "2"})});
  big.items = {item(0, "1"), item(1, "1/2")};
  auto cb = classify(big);
  REQUIRE(cb.rho[0] == 2 * c.rho[0]);
  REQUIRE(cb.rho[1] == 2 * c.rho[1]);
}

TEST_CASE("classify rejects bad instances", "[strip]") {
  auto in = unit_strip({item(0, "1/2")});
  in.epsilon = Q("1/2");
  REQUIRE_THROWS_AS(classify(in), std::invalid_argument);
  in = unit_strip({item(0, "1/2")});
  in.alpha = 1;  // the unit cell is longer than alpha * s_hat
  REQUIRE_THROWS_AS(classify(in), std::invalid_argument);
  StripInstance k2;
  k2.d = 3;
  k2.k = 2;
  k2.A = segment({"0", "1"});
  k2.B = {Q("1/2")};
  k2.items = {item(0, "1")};
  REQUIRE_THROWS_AS(classify(k2), std::invalid_argument);  // B shorter than N alpha s_hat
}

TEST_CASE("linear grouping", "[strip]") {
  std::vector<Item> ten;
  for (int i = 0; i < 10; ++i) ten.push_back(make_item(i, frac(10 + i, 40), 1));
  auto g = linear_group(ten, 5);
  REQUIRE(g.groups.size() == 5);
  for (std::size_t j = 0; j < 5; ++j) {
    REQUIRE(g.groups[j].index == static_cast<unsigned long>(j));
    REQUIRE(g.groups[j].items.size() == 2);
    REQUIRE(g.groups[j].size == g.groups[j].items.front().side);
    REQUIRE(g.groups[j].size >= g.groups[j].items.back().side);
  }
  REQUIRE(g.groups[0].size == frac(19, 40));
  REQUIRE(g.groups[4].size == frac(11, 40));

  std::vector<BigInt> sizes;
  for (int j = 0; j < 5; ++j) sizes.push_back(Grouping::group_size(3, 5, j));
  REQUIRE(sizes == std::vector<BigInt>{0, 0, 1, 1, 1});
  auto g3 = linear_group(items_of({"1/2", "1/3", "1/4"}), 5);
  REQUIRE(g3.groups.size() == 3);
  REQUIRE(g3.groups[0].index == 2);
  REQUIRE(g3.groups[2].index == 4);

  auto same = linear_group(items_of({"1/3", "1/3", "1/3", "1/3"}), 2);
  REQUIRE(same.rounded_volume(2) == 4 * Q("1/9"));
  REQUIRE(linear_group({}, 7).groups.empty());

  // 7 items into 3 groups: sizes 2, 2, 3.
  std::vector<Item> seven;
  for (int i = 0; i < 7; ++i) seven.push_back(make_item(i, frac(i + 1, 8), 1));
  auto g7 = linear_group(seven, 3);
  REQUIRE(g7.groups[0].items.size() == 2);
  REQUIRE(g7.groups[1].items.size() == 2);
  REQUIRE(g7.groups[2].items.size() == 3);
}

TEST_CASE("n_sizes_for", "[strip]") {
  REQUIRE(n_sizes_for(Q("1/4"), Q("1/8"), 1, 2, 1) == 256);
  // u = 4, d - k = 2: ceil(sqrt((1/(eps rho^3))^2 * 4^3)) = 8 / (eps rho^3)
  REQUIRE(n_sizes_for(Q("1/4"), Q("1/2"), 4, 3, 1) == 256);
}

TEST_CASE("enumerate_configs on a unit segment", "[strip]") {
  auto A = segment({"0", "1"});
  auto e = enumerate_configs({Q("1/2"), Q("1/2")}, A, Q("1/2"));
  auto got = count_set(e);
  for (unsigned long a = 0; a <= 3; ++a)
    for (unsigned long b = 0; b <= 3; ++b)
      REQUIRE(got.count({a, b}) == (a + b <= 2 ? 1U : 0U));
  require_witnesses_valid(e, A);

  auto one = enumerate_configs({Q("1")}, A, Q("1"));
  REQUIRE(count_set(one) == std::set<std::vector<unsigned long>>{{0}, {1}});
}

TEST_CASE("enumerate_configs: item wider than every cell", "[strip]") {
  Grid A{{Qs({"0", "1/2", "1", "3/2"})}, {{0}, {2}}};
  auto e = enumerate_configs({Q("3/4")}, A, Q("3/4"));
  REQUIRE(count_set(e) == std::set<std::vector<unsigned long>>{{0}});
  // Adjacent cells form one run, so a straddling item fits.
  auto e2 = enumerate_configs({Q("3/4")}, segment({"0", "1/2", "1"}), Q("3/4"));
  REQUIRE(count_set(e2).count({1}) == 1);
}

TEST_CASE("enumerate_configs in two dimensions", "[strip]") {
  auto A = Grid::full({Qs({"0", "1"}), Qs({"0", "1"})});
  auto e = enumerate_configs({Q("1/2"), Q("1/4")}, A, Q("1/4"));
  auto got = count_set(e);
  // Power-of-two squares pack whenever their area fits.
  for (unsigned long a = 0; a <= 5; ++a)
    for (unsigned long b = 0; b <= 17; ++b)
      REQUIRE(got.count({a, b}) == (4 * a + b <= 16 ? 1U : 0U));
  require_witnesses_valid(e, A);

  // 3/5 squares: only one fits in the unit square.
  auto e3 = enumerate_configs({Q("3/5")}, A, Q("3/5"));
  REQUIRE(count_set(e3) == std::set<std::vector<unsigned long>>{{0}, {1}});
}

TEST_CASE("enumerate_configs budget", "[strip]") {
  auto A = segment({"0", "1"});
  EnumOptions opt;
  opt.budget = 3;
  REQUIRE_THROWS_AS(enumerate_configs({Q("1/8")}, A, Q("1/8"), opt), BudgetExceeded);
}

TEST_CASE("enumerate_configs budget: a wide one-cell base fails fast", "[strip]") {
  // 10^6 lattice positions for 1/1000 squares; walking them would take far longer.
  auto A = Grid::full({Qs({"0", "1"}), Qs({"0", "1"})});
  EnumOptions opt;
  opt.budget = 1000;
  REQUIRE_THROWS_AS(enumerate_configs({Q("1/1000")}, A, Q("1/1000"), opt), BudgetExceeded);
  // The lattice floor (4 + 16) is below the budget; the full walk over
  // 4a + b <= 16 needs 44 candidates for its 45 configurations.
  opt.budget = 44;
  auto e = enumerate_configs({Q("1/2"), Q("1/4")}, A, Q("1/4"), opt);
  REQUIRE(e.configs.size() == 45);
  opt.budget = 43;
  REQUIRE_THROWS_AS(enumerate_configs({Q("1/2"), Q("1/4")}, A, Q("1/4"), opt), BudgetExceeded);
}

TEST_CASE("configuration LP", "[strip]") {
  // one group, |G| = 2, side 1/2, k = 1, configs (0) and (1): x = 1
  std::vector<Configuration> cf{{{0}, {}}, {{1}, {}}};
  auto lp = solve_config_lp(cf, {Q("1")});
  REQUIRE(lp.x == std::vector<Scalar>{0, 1});
  REQUIRE(lp.objective == 1);

  REQUIRE(solve_config_lp(cf, {}).objective == 0);

  // Identical configurations: the objective is what is unique.
  std::vector<Configuration> twin{{{2}, {}}, {{2}, {}}};
  auto t = solve_config_lp(twin, {Q("3")});
  REQUIRE(t.objective == Q("3/2"));
  REQUIRE(t.x[0] + t.x[1] == Q("3/2"));

  // Infeasible: no config covers the second size.
  std::vector<Configuration> bad{{{1, 0}, {}}};
  REQUIRE_THROWS_AS(solve_config_lp(bad, {Q("1"), Q("1")}), std::logic_error);
}

TEST_CASE("configuration LP on enumerated configs", "[strip]") {
  auto A = segment({"0", "1"});
  std::vector<Scalar> sizes{Q("1/2"), Q("1/3"), Q("1/5")};
  auto e = enumerate_configs(sizes, A, Q("1/5"));
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<Scalar> demand;
    for (const auto& s : sizes) demand.push_back(Scalar(static_cast<long>(rng() % 6 + 1)) * s);
    auto lp = solve_config_lp(e.configs, demand);
    for (std::size_t j = 0; j < sizes.size(); ++j) {
      Scalar lhs = 0;
      for (std::size_t i = 0; i < e.configs.size(); ++i) lhs += lp.x[i] * e.configs[i].counts[j];
      REQUIRE(lhs == demand[j]);
    }
    for (const auto& x : lp.x) REQUIRE(x >= 0);
    auto shuffled = e.configs;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    REQUIRE(solve_config_lp(shuffled, demand).objective == lp.objective);
  }
}

TEST_CASE("build_layers: three items on a segment, k = 2", "[strip]") {
  StripInstance in;
  in.d = 3;
  in.k = 2;
  in.A = segment({"0", "1"});
  in.B = {Q("5/2")};
  in.items = {item(0, "1/2"), item(1, "1/4"), item(2, "1/4")};
  auto ctx = StripContext::of(in);
  std::vector<SizeClass> classes{{Q("1/2"), {in.items[0]}}, {Q("1/4"), {in.items[1], in.items[2]}}};
  Configuration cfg{{1, 2},
                    {{0, Cuboid({Q("0")}, {Q("1/2")})},
                     {1, Cuboid({Q("1/2")}, {Q("1/4")})},
                     {1, Cuboid({Q("3/4")}, {Q("1/4")})}}};
  std::vector<Configuration> cfgs{Configuration{{0, 0}, {}}, cfg};

  REQUIRE(build_layers(ctx, cfgs, {0, 0}, {}).empty());
  REQUIRE_THROWS_AS(build_layers(ctx, cfgs, {0, 0}, classes), std::logic_error);

  auto layers = build_layers(ctx, cfgs, {0, Q("1/8")}, classes);
  REQUIRE(layers.size() == 1);
  const auto& L = layers[0];
  REQUIRE(L.h == Q("1/20"));
  REQUIRE(L.n_boxes.size() == 3);
  // h < s: one cell of height s; B rounds up to a multiple of s.
  REQUIRE(L.n_boxes[0].shell == Cuboid({0, 0, 0}, {Q("1/2"), Q("5/2"), Q("1/2")}));
  REQUIRE(L.n_boxes[1].shell == Cuboid({Q("1/2"), 0, 0}, {Q("1/4"), Q("5/2"), Q("1/4")}));
  REQUIRE(L.placements.size() == 3);
  Packing p{Cuboid({0, 0, 0}, {1, Q("7/2"), Q("3/2")}), L.placements};
  REQUIRE(verify_packing(p).ok());
}

TEST_CASE("pack_top: nothing left", "[strip]") {
  auto in = unit_strip({item(0, "1")});
  auto top = pack_top(StripContext::of(in), {}, Q("1/8"), Q("1/8"), 3);
  REQUIRE(top.h == 0);
  REQUIRE(top.boxes.empty());
}

TEST_CASE("pack_top: a single medium item goes to the merged base", "[strip]") {
  StripInstance in;
  in.d = 2;
  in.k = 1;
  in.A = segment({"0", "1/2", "3/2", "2"});
  in.items = {item(0, "1"), item(1, "1/10")};
  in.alpha = 1;
  in.N = 3;
  auto ctx = StripContext::of(in);
  auto top = pack_top(ctx, {in.items[1]}, Q("1/8"), Q("1/10"), 0);
  REQUIRE(top.bases.size() == 2);
  REQUIRE(top.bases[0] == Cuboid({Q("0")}, {Q("3/2")}));
  REQUIRE(top.bases[1] == Cuboid({Q("3/2")}, {Q("1/2")}));
  REQUIRE(top.marked == std::vector<bool>{true, true});
  REQUIRE(top.placements.size() == 1);
  REQUIRE(top.placements[0].pos[0] == 0);
  REQUIRE(top.h == Q("3/22") + Q("1/100") / Q("11/8"));
}

TEST_CASE("pack_top: uniform micro-items stay balanced", "[strip]") {
  StripInstance in;
  in.d = 2;
  in.k = 1;
  in.A = segment({"0", "1", "2"});
  std::vector<Item> micro;
  for (int i = 0; i < 41; ++i) micro.push_back(item(i, "1/16"));
  in.items = micro;
  in.alpha = 16;
  in.N = 2;
  auto top = pack_top(StripContext::of(in), micro, Q("1/16"), Q("1/16"), 0);
  REQUIRE(top.marked == std::vector<bool>{true, true});
  Scalar diff = top.heights[0] - top.heights[1];
  if (diff < 0) diff = -diff;
  REQUIRE(diff <= Q("1/240"));
  REQUIRE(top.placements.size() == 41);
}

TEST_CASE("strip_pack: empty instance", "[strip]") {
  StripInstance in;
  in.A = segment({"0", "1"});
  auto r = strip_pack(in);
  REQUIRE(r.h_total == 0);
  REQUIRE(r.layers.empty());
  REQUIRE(r.packing.placements.empty());
}

TEST_CASE("strip_pack: all-small instance goes to the top layer", "[strip]") {
  // s_hat = 1 is a parameter here, larger than every item.
  StripInstance in;
  in.d = 2;
  in.k = 1;
  in.A = segment({"0", "1"});
  for (int i = 0; i < 30; ++i) in.items.push_back(item(i, "1/200"));
  in.alpha = 1;
  in.N = 1;
  in.s_hat = Q("1");
  auto c = classify(in);
  REQUIRE(c.small.size() == 30);
  auto r = strip_pack(in);
  REQUIRE(r.n_configs() == 1);  // only the empty configuration
  REQUIRE(r.layers.empty());
  // Strip height bound: (VOL + rho V) / (V - rho SURF / 2) with V = 1, SURF = 2.
  REQUIRE(r.top.h == (30 * Q("1/40000") + Q("1/8")) / Q("7/8"));
  REQUIRE(r.h_total == r.top.h + 1);
  REQUIRE(r.packing.placements.size() == 30);
}

TEST_CASE("strip_pack: small items go into the gap next to a 2/3 item", "[strip]") {
  // 1 + 2/3 > 1, so the 2/3 item gets its own layer with a gap of width 1/3.
  std::vector<Item> items{item(0, "1"), item(1, "2/3")};
  for (int i = 2; i < 400; ++i) items.push_back(item(i, "1/150"));
  auto in = unit_strip(items, Q("1/3"));
  auto c = classify(in);
  REQUIRE(c.eta == 1);
  REQUIRE(c.small.size() == 398);
  auto r = strip_pack(in);
  REQUIRE(r.packing.placements.size() == items.size());
  REQUIRE(verify_packing(r.packing).ok());
  for (const auto& b : r.bounds) REQUIRE(b.holds());
  bool gap_box = false;
  for (const auto& b : r.boxes) gap_box = gap_box || b.tag == "strip-gap";
  REQUIRE(gap_box);
  REQUIRE(r.small_all_in_gaps);
  REQUIRE(r.top.h == 0);
  // h_total adds s_hat per layer and for the top layer when used.
  Scalar h = 0;
  for (const auto& L : r.layers) h += L.h + r.s_hat;
  if (r.top.h > 0) h += r.top.h + r.s_hat;
  REQUIRE(r.h_total == h);
}

TEST_CASE("strip_pack: abundant micro-items hit the gap free-volume bound", "[strip]") {
  std::vector<Item> items{item(0, "1"), item(1, "1")};
  for (int i = 2; i < 3000; ++i) items.push_back(item(i, "1/80"));
  auto in = unit_strip(items, Q("1/3"));
  auto r = strip_pack(in);
  REQUIRE_FALSE(r.small_all_in_gaps);
  bool saw = false;
  for (const auto& b : r.bounds) saw = saw || b.name == "layer free volume";
  REQUIRE(saw);
  REQUIRE(r.packing.placements.size() == items.size());
}

TEST_CASE("strip_pack on shattered constructions", "[strip]") {
  struct Case {
    std::size_t d, k;
    unsigned long base, height;
    unsigned depth;
    double p;
  };
  std::vector<Case> cases{{2, 1, 1, 3, 3, 0.6}, {2, 1, 2, 2, 4, 0.5}, {3, 1, 1, 2, 2, 0.5}, {3, 2, 1, 2, 3, 0.4}};
  for (const auto& cs : cases) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      ShatterOptions opt;
      opt.depth = cs.depth;
      opt.split_probability = cs.p;
      opt.seed = seed;
      auto sh = shatter_strip(cs.d, cs.k, cs.base, cs.height, opt);
      REQUIRE(verify_packing(sh.witness).ok());
      auto r = strip_pack(sh.instance);
      REQUIRE(r.packing.placements.size() == sh.instance.items.size());
      const Scalar bound = (1 + 5 * sh.instance.epsilon) * sh.h0 +
                           2 * Scalar(static_cast<unsigned long>(r.n_configs() + 3)) * r.s_hat;
      REQUIRE(r.h_total <= bound);
      for (const auto& b : r.boxes) {
        for (std::size_t i = 0; i < b.shell.dim(); ++i) REQUIRE(Scalar(b.shell.side(i) / b.s_hat).get_den() == 1);
      }
    }
  }
}
