#include <catch_amalgamated.hpp>

#include "hcpack/io.hpp"
#include "hcpack/knapsack.hpp"
#include "hcpack/render.hpp"
#include "support.hpp"

using namespace hcpack;
using namespace testing_support;

TEST_CASE("io: instance round trip") {
  auto k = random_instance(3, 12, {Q("1/20"), Q("1/2"), 40}, {1, 9}, 11, Q("1/8"));
  Json j = to_json(k);
  auto back = instance_from(parse_json(dump(j)));
  REQUIRE(back.d == 3);
  REQUIRE(back.epsilon == Q("1/8"));
  REQUIRE(back.items.size() == 12);
  for (std::size_t i = 0; i < 12; ++i) {
    REQUIRE(back.items[i].id == k.items[i].id);
    REQUIRE(back.items[i].side == k.items[i].side);
    REQUIRE(back.items[i].profit == k.items[i].profit);
  }
  REQUIRE(to_json(back) == j);
}

TEST_CASE("io: instance literal from the documented format") {
  auto k = instance_from(parse_json(R"({"d": 2, "epsilon": "1/4",
      "items": [{"side": "3/5", "profit": "10"}, {"side": "1/2", "profit": 1}]})"));
  REQUIRE(k.items.size() == 2);
  REQUIRE(k.items[0].side == Q("3/5"));
  REQUIRE(k.items[1].profit == 1);
  REQUIRE(k.items[1].id == 1);
}

TEST_CASE("io: packing round trip with boxes, ids and unplaced items") {
  PackingDoc doc;
  doc.d = 2;
  doc.packing.container = Cuboid(Point{0, 0}, Qs({"2", "1"}));
  doc.packing.placements.push_back(Placement{item(7, "1/2", "3"), Point{Q("1/2"), 0}});
  doc.packing.placements.push_back(Placement{item(2, "1/4", "5/2"), Point{Q("3/2"), Q("1/4")}});
  doc.unplaced.push_back(item(4, "1", "1"));
  doc.boxes.push_back(make_box(BoxKind::V, Cuboid(Point{Q("3/2"), 0}, Qs({"1/2", "1"})), Q("1/4"), "top"));
  Json j = to_json(doc);
  REQUIRE(j.contains("container"));
  REQUIRE(j["items"][0]["id"] == 2);
  auto back = packing_from(parse_json(dump(j)));
  REQUIRE(back.packing.container == doc.packing.container);
  REQUIRE(back.packing.placements.size() == 2);
  REQUIRE(back.unplaced.size() == 1);
  REQUIRE(back.boxes.size() == 1);
  REQUIRE(back.boxes[0].tag == "top");
  REQUIRE(verify_packing(back.packing).ok());
  REQUIRE(to_json(back) == j);
}

TEST_CASE("io: unit container is implicit") {
  auto o = oracle_opt(KnapsackInstance{2, {item(0, "3/5", "10"), item(1, "1/2", "1")}, Q("1/4")});
  PackingDoc doc{2, Q("1/4"), o.witness, {}, {}};
  Json j = to_json(doc);
  REQUIRE_FALSE(j.contains("container"));
  REQUIRE(packing_from(j).packing.container == Cuboid::unit(2));
}

TEST_CASE("io: syntax errors carry the byte offset") {
  const std::string text = R"({"d": 2, "items": [ {"side": "1/2",, } ]})";
  try {
    parse_json(text);
    FAIL("parse should fail");
  } catch (const FormatError& e) {
    REQUIRE(e.byte().has_value());
    REQUIRE(*e.byte() == text.find(",,") + 2);
    REQUIRE(std::string(e.what()).rfind("byte ", 0) == 0);
  }
}

TEST_CASE("io: semantic errors") {
  REQUIRE_THROWS_AS(instance_from(parse_json(R"({"d": 2, "items": [{"side": "3/2"}]})")), FormatError);
  REQUIRE_THROWS_AS(instance_from(parse_json(R"({"d": 2, "items": [{"side": 0.5}]})")), FormatError);
  REQUIRE_THROWS_AS(instance_from(parse_json(R"({"items": []})")), FormatError);
  REQUIRE_THROWS_AS(packing_from(parse_json(R"({"d": 2, "items": [{"side": "1/2"}],
      "placements": [{"item": 3, "pos": ["0", "0"]}]})")),
                    FormatError);
  REQUIRE_THROWS_AS(packing_from(parse_json(R"({"d": 2, "items": [{"side": "1/2"}],
      "placements": [{"item": 0, "pos": ["0"]}]})")),
                    FormatError);
}

TEST_CASE("io: strip instance round trip") {
  StripInstance s;
  s.d = 3;
  s.k = 2;
  s.A = Grid::full({Qs({"0", "1", "3/2"})});
  s.B = Qs({"40"});
  s.items = {item(0, "1/2"), item(1, "1/3", "2")};
  s.alpha = 16;
  s.N = 2;
  s.s_hat = Q("1/2");
  Json j = to_json(s);
  auto back = strip_instance_from(parse_json(dump(j)));
  REQUIRE(back.k == 2);
  REQUIRE(back.A.cells.size() == 2);
  REQUIRE(back.B == s.B);
  REQUIRE(back.s_hat == s.s_hat);
  REQUIRE(to_json(back) == j);
}

TEST_CASE("render: deterministic SVG with tooltips") {
  auto k = random_instance(2, 30, {Q("1/20"), Q("1/3"), 60}, {1, 9}, 5);
  SolveBudgets bud;
  bud.max_candidates = 200;
  auto r = structured_solve(k, bud);
  const std::string a = render_svg(r.packing, r.boxes), b = render_svg(r.packing, r.boxes);
  REQUIRE(a == b);
  REQUIRE(a.rfind("<svg", 0) == 0);
  REQUIRE(a.find("profit " + to_string(r.packing.placements.front().item.profit)) != std::string::npos);
  // Parsing the JSON back yields the same picture.
  PackingDoc doc{2, k.epsilon, r.packing, r.boxes, {}};
  auto back = packing_from(parse_json(dump(to_json(doc))));
  REQUIRE(render_svg(back.packing, back.boxes) == a);
  REQUIRE_THROWS_AS(render_svg(Packing{Cuboid::unit(3), {}}), std::invalid_argument);
}
