#pragma once

// JSON formats. Every number that is not a count is written as an exact
// rational string ("3/4", "2"); integers are accepted as JSON numbers too.
//
//   instance: {"d": 2, "epsilon": "1/4", "items": [{"side": "1/2", "profit": "3"}, ...]}
//   packing:  instance fields plus "placements": [{"item": id, "pos": [...]}],
//             "boxes": [{"kind": "V", "s_hat": .., "lower": [..], "sides": [..]}],
//             and "container" when it is not the unit cube.

#include "hcpack/boxes.hpp"
#include "hcpack/gen.hpp"
#include "hcpack/grid.hpp"
#include "hcpack/knapsack.hpp"
#include "hcpack/strip.hpp"
#include "hcpack/structure.hpp"

#include <json.hpp>

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

namespace hcpack {

using Json = nlohmann::ordered_json;

/// Malformed or ill-typed input. `byte` is set for syntax errors.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::optional<std::size_t> byte = std::nullopt)
      : std::runtime_error(byte ? "byte " + std::to_string(*byte) + ": " + what : what), byte_(byte) {}
  std::optional<std::size_t> byte() const { return byte_; }

 private:
  std::optional<std::size_t> byte_;
};

inline Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(e.what(), e.byte);
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Json read_json_file(const std::string& path) { return parse_json(read_file(path)); }

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------- scalars

inline Json to_json(const Scalar& x) { return to_string(x); }

inline Scalar scalar_from(const Json& j, const std::string& where) {
  if (j.is_string()) {
    try {
      return parse_scalar(j.get<std::string>());
    } catch (const std::exception& e) {
      throw FormatError(where + ": " + e.what());
    }
  }
  if (j.is_number_integer()) return Scalar(j.get<long>());
  throw FormatError(where + ": expected a rational string such as \"3/4\"");
}

inline const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) throw FormatError(where + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw FormatError(where + ": missing \"" + key + "\"");
  return *it;
}

inline std::size_t count_from(const Json& j, const std::string& where) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long>() >= 0))
    throw FormatError(where + ": expected a non-negative integer");
  return j.get<std::size_t>();
}

inline Json to_json(const std::vector<Scalar>& xs) {
  Json a = Json::array();
  for (const auto& x : xs) a.push_back(to_json(x));
  return a;
}

inline std::vector<Scalar> scalars_from(const Json& j, const std::string& where) {
  if (!j.is_array()) throw FormatError(where + ": expected an array");
  std::vector<Scalar> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(scalar_from(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

// ---------------------------------------------------------------- items and instances

inline Json items_to_json(const std::vector<Item>& items) {
  bool plain = true;
  for (std::size_t i = 0; i < items.size(); ++i) plain = plain && items[i].id == static_cast<int>(i);
  Json a = Json::array();
  for (const auto& it : items) {
    Json o;
    if (!plain) o["id"] = it.id;
    o["side"] = to_json(it.side);
    o["profit"] = to_json(it.profit);
    a.push_back(o);
  }
  return a;
}

inline std::vector<Item> items_from(const Json& j, const std::string& where = "items") {
  if (!j.is_array()) throw FormatError(where + ": expected an array");
  std::vector<Item> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string w = where + "[" + std::to_string(i) + "]";
    int id = static_cast<int>(i);
    if (j[i].is_object() && j[i].contains("id")) id = static_cast<int>(count_from(j[i]["id"], w + ".id"));
    Scalar side = scalar_from(field(j[i], "side", w), w + ".side");
    Scalar profit = j[i].contains("profit") ? scalar_from(j[i]["profit"], w + ".profit") : Scalar(1);
    try {
      out.push_back(make_item(id, side, profit));
    } catch (const std::exception& e) {
      throw FormatError(w + ": " + e.what());
    }
  }
  return out;
}

inline Json to_json(const KnapsackInstance& k) {
  Json j;
  j["d"] = k.d;
  j["epsilon"] = to_json(k.epsilon);
  j["items"] = items_to_json(k.items);
  return j;
}

inline KnapsackInstance instance_from(const Json& j) {
  KnapsackInstance k;
  k.d = count_from(field(j, "d", "instance"), "d");
  if (k.d < 1) throw FormatError("d must be positive");
  k.epsilon = j.contains("epsilon") ? scalar_from(j["epsilon"], "epsilon") : Scalar(1, 4);
  k.items = items_from(field(j, "items", "instance"));
  return k;
}

// ---------------------------------------------------------------- geometry

inline Json to_json(const Cuboid& c) {
  Json j;
  j["lower"] = to_json(c.lower());
  std::vector<Scalar> s;
  for (std::size_t i = 0; i < c.dim(); ++i) s.push_back(c.side(i));
  j["sides"] = to_json(s);
  return j;
}

inline Cuboid cuboid_from(const Json& j, const std::string& where) {
  auto lo = scalars_from(field(j, "lower", where), where + ".lower");
  auto s = scalars_from(field(j, "sides", where), where + ".sides");
  if (lo.size() != s.size()) throw FormatError(where + ": lower and sides differ in length");
  try {
    return Cuboid(lo, s);
  } catch (const std::exception& e) {
    throw FormatError(where + ": " + e.what());
  }
}

inline Json to_json(const BoxSpec& b) {
  Json j;
  j["kind"] = to_string(b.kind);
  j["s_hat"] = to_json(b.s_hat);
  Json c = to_json(b.shell);
  j["lower"] = c["lower"];
  j["sides"] = c["sides"];
  if (!b.tag.empty()) j["tag"] = b.tag;
  return j;
}

inline BoxSpec box_from(const Json& j, const std::string& where) {
  const std::string kind = field(j, "kind", where).get<std::string>();
  if (kind != "V" && kind != "N") throw FormatError(where + ".kind: expected \"V\" or \"N\"");
  Cuboid shell = cuboid_from(j, where);
  Scalar s = scalar_from(field(j, "s_hat", where), where + ".s_hat");
  try {
    return make_box(kind == "V" ? BoxKind::V : BoxKind::N, shell, s, j.value("tag", std::string()));
  } catch (const std::exception& e) {
    throw FormatError(where + ": " + e.what());
  }
}

inline Json to_json(const Grid& g) {
  Json j;
  Json b = Json::array();
  for (const auto& bd : g.boundaries) b.push_back(to_json(bd));
  j["boundaries"] = b;
  Json cells = Json::array();
  for (const auto& c : g.cells) {
    Json idx = Json::array();
    for (auto v : c) idx.push_back(v);
    cells.push_back(idx);
  }
  j["cells"] = cells;
  return j;
}

inline Grid grid_from(const Json& j, const std::string& where) {
  Grid g;
  const Json& b = field(j, "boundaries", where);
  if (!b.is_array()) throw FormatError(where + ".boundaries: expected an array");
  for (std::size_t i = 0; i < b.size(); ++i)
    g.boundaries.push_back(scalars_from(b[i], where + ".boundaries[" + std::to_string(i) + "]"));
  if (j.contains("cells")) {
    for (const auto& c : j["cells"]) {
      CellIndex idx;
      for (const auto& v : c) idx.push_back(count_from(v, where + ".cells"));
      g.cells.push_back(idx);
    }
  } else {
    g = Grid::full(g.boundaries);
  }
  try {
    g.validate();
  } catch (const std::exception& e) {
    throw FormatError(where + ": " + e.what());
  }
  return g;
}

// ---------------------------------------------------------------- packings

/// Packing plus the boxes that hold part of it.
struct PackingDoc {
  std::size_t d = 2;
  Scalar epsilon = Scalar(1, 4);
  Packing packing;
  std::vector<BoxSpec> boxes;
  std::vector<Item> unplaced;  // instance items without a placement
};

inline Json to_json(const PackingDoc& doc) {
  Json j;
  j["d"] = doc.d;
  j["epsilon"] = to_json(doc.epsilon);
  std::vector<Item> items;
  for (const auto& p : doc.packing.placements) items.push_back(p.item);
  items.insert(items.end(), doc.unplaced.begin(), doc.unplaced.end());
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.id < b.id; });
  j["items"] = items_to_json(items);
  if (!(doc.packing.container == Cuboid::unit(doc.d))) j["container"] = to_json(doc.packing.container);
  Json pl = Json::array();
  for (const auto& p : doc.packing.placements) {
    Json o;
    o["item"] = p.item.id;
    o["pos"] = to_json(p.pos);
    pl.push_back(o);
  }
  j["placements"] = pl;
  Json bx = Json::array();
  for (const auto& b : doc.boxes) bx.push_back(to_json(b));
  j["boxes"] = bx;
  return j;
}

inline PackingDoc packing_from(const Json& j) {
  PackingDoc doc;
  KnapsackInstance k = instance_from(j);
  doc.d = k.d;
  doc.epsilon = k.epsilon;
  doc.packing.container = j.contains("container") ? cuboid_from(j["container"], "container") : Cuboid::unit(k.d);
  if (doc.packing.container.dim() != k.d) throw FormatError("container: dimension differs from d");
  std::map<int, Item> by_id;
  for (const auto& it : k.items)
    if (!by_id.emplace(it.id, it).second) throw FormatError("items: duplicate id " + std::to_string(it.id));
  std::set<int> placed;
  const Json& pl = j.contains("placements") ? j["placements"] : Json::array();
  if (!pl.is_array()) throw FormatError("placements: expected an array");
  for (std::size_t i = 0; i < pl.size(); ++i) {
    const std::string w = "placements[" + std::to_string(i) + "]";
    const int id = static_cast<int>(count_from(field(pl[i], "item", w), w + ".item"));
    auto it = by_id.find(id);
    if (it == by_id.end()) throw FormatError(w + ": unknown item " + std::to_string(id));
    Point pos = scalars_from(field(pl[i], "pos", w), w + ".pos");
    if (pos.size() != k.d) throw FormatError(w + ".pos: expected " + std::to_string(k.d) + " coordinates");
    doc.packing.placements.push_back(Placement{it->second, pos});
    placed.insert(id);
  }
  for (const auto& it : k.items)
    if (!placed.count(it.id)) doc.unplaced.push_back(it);
  if (j.contains("boxes"))
    for (std::size_t i = 0; i < j["boxes"].size(); ++i)
      doc.boxes.push_back(box_from(j["boxes"][i], "boxes[" + std::to_string(i) + "]"));
  return doc;
}

// ---------------------------------------------------------------- strip instances

inline Json to_json(const StripInstance& s) {
  Json j;
  j["d"] = s.d;
  j["k"] = s.k;
  j["epsilon"] = to_json(s.epsilon);
  j["alpha"] = to_json(s.alpha);
  j["N"] = s.N;
  if (s.s_hat) j["s_hat"] = to_json(*s.s_hat);
  j["A"] = to_json(s.A);
  j["B"] = to_json(s.B);
  j["items"] = items_to_json(s.items);
  return j;
}

inline StripInstance strip_instance_from(const Json& j) {
  StripInstance s;
  s.d = count_from(field(j, "d", "strip"), "d");
  s.k = count_from(field(j, "k", "strip"), "k");
  s.epsilon = j.contains("epsilon") ? scalar_from(j["epsilon"], "epsilon") : Scalar(1, 4);
  s.alpha = scalar_from(field(j, "alpha", "strip"), "alpha");
  s.N = count_from(field(j, "N", "strip"), "N");
  if (j.contains("s_hat")) s.s_hat = scalar_from(j["s_hat"], "s_hat");
  s.A = grid_from(field(j, "A", "strip"), "A");
  s.B = j.contains("B") ? scalars_from(j["B"], "B") : std::vector<Scalar>{};
  s.items = items_from(field(j, "items", "strip"));
  return s;
}

// ---------------------------------------------------------------- reports

inline Json to_json(const BoundCheck& b) {
  Json j;
  j["name"] = b.name;
  j["lhs"] = to_json(b.lhs);
  j["rhs"] = to_json(b.rhs);
  j["holds"] = b.holds();
  return j;
}

inline Json to_json(const std::vector<BoundCheck>& bs) {
  Json a = Json::array();
  for (const auto& b : bs) a.push_back(to_json(b));
  return a;
}

inline Json to_json(const PackingCheck& c) {
  Json j;
  j["ok"] = c.ok();
  if (c.violation) {
    j["first"] = c.violation->first;
    j["second"] = c.violation->second;
    j["message"] = c.violation->message;
  }
  return j;
}

inline Json to_json(const Magnitude& m) { return m.describe(); }

inline Json to_json(const std::vector<MagnitudeCheck>& cs) {
  Json a = Json::array();
  for (const auto& c : cs) a.push_back(Json{{"name", c.name}, {"holds", c.holds}});
  return a;
}

inline Json to_json(const AlphaTable& t) {
  Json j;
  j["N"] = t.N.get_str();
  j["desk"] = t.desk;
  Json a = Json::object();
  for (std::size_t k = 1; k <= t.d; ++k) a[std::to_string(k)] = to_json(t.at(k));
  j["alpha"] = a;
  Json c = Json::object();
  for (std::size_t k = 1; k < t.d; ++k) c[std::to_string(k)] = to_json(t.c_configs[k - 1]);
  j["c_configs"] = c;
  return j;
}

/// Exact values as rationals, towers as "2^2^(x)" approximations.
inline Json to_json(const ConstantsReport& r) {
  Json j;
  j["d"] = r.d;
  j["epsilon"] = to_json(r.epsilon);
  if (r.warning) j["warning"] = *r.warning;
  Json t = to_json(r.alpha);
  j["N"] = t["N"];
  j["alpha"] = t["alpha"];
  j["c_configs"] = t["c_configs"];
  j["depth_cap"] = r.depth_cap;
  j["c_layer"] = to_json(r.c_layer);
  j["c_n"] = r.c_n.get_str();
  j["c_cells"] = to_json(r.c_cells);
  j["c_rho"] = to_json(r.c_rho);
  j["c_large"] = to_json(r.c_large);
  j["c_boxes"] = to_json(r.c_boxes);
  Json bk = Json::object();
  for (std::size_t k = 0; k <= r.d; ++k) bk[std::to_string(k)] = to_json(r.c_boxes_k[k]);
  j["c_boxes_k"] = bk;
  j["checks"] = to_json(r.checks);
  return j;
}

inline Json to_json(const SolveBudgets& b) {
  Json j;
  j["max_large"] = b.max_large;
  j["max_boxes"] = b.max_boxes;
  j["max_side_choices"] = b.max_side_choices;
  j["max_sizes"] = b.max_sizes;
  j["max_candidates"] = b.max_candidates;
  j["arrange_nodes"] = b.arrange_nodes;
  j["gap_exact_items"] = b.gap.exact_items;
  j["gap_node_budget"] = b.gap.node_budget;
  j["gap_lp_items"] = b.gap.lp_items;
  return j;
}

inline Json to_json(const Certificate& c) {
  Json j;
  j["profit"] = to_json(c.profit);
  if (c.ratio_vs_oracle) j["ratio_vs_oracle"] = to_json(*c.ratio_vs_oracle);
  j["budgets"] = to_json(c.budgets);
  j["exhausted"] = c.exhausted;
  j["source"] = c.source;
  j["candidates"] = c.candidates;
  j["assertions"] = c.assertions;
  return j;
}

/// Height report for strip_pack.
inline Json height_report(const StripResult& r) {
  Json j;
  j["h_total"] = to_json(r.h_total);
  j["s_hat"] = to_json(r.s_hat);
  Json layers = Json::array();
  for (const auto& l : r.layers) layers.push_back(Json{{"config", l.config}, {"x", to_json(l.x)}, {"h", to_json(l.h)}});
  j["layers"] = layers;
  j["h_top"] = to_json(r.top.h);
  j["x"] = to_json(r.x);
  j["lp_objective"] = to_json(r.lp_objective);
  j["n_configs"] = r.n_configs();
  j["small_all_in_gaps"] = r.small_all_in_gaps;
  Json b = to_json(r.bounds);
  for (std::size_t i = 0; i < r.bounds.size(); ++i) b[i]["slack"] = to_json(Scalar(r.bounds[i].rhs - r.bounds[i].lhs));
  j["bounds"] = b;
  return j;
}

}  // namespace hcpack
