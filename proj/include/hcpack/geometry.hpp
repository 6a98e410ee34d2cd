#pragma once

// Axis-aligned exact geometry: cuboids, hypercube items, packings and the
// validity checker every other module is measured against.

#include "hcpack/rational.hpp"

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace hcpack {

using Point = std::vector<Scalar>;

class Cuboid {
 public:
  Cuboid() = default;

  /// Throws std::invalid_argument unless every side is strictly positive.
  Cuboid(Point lower, std::vector<Scalar> sides) : lower_(std::move(lower)), sides_(std::move(sides)) {
    validate(false);
  }

  /// Zero-length sides allowed; used only for the facet view of a cell.
  static Cuboid degenerate(Point lower, std::vector<Scalar> sides) {
    Cuboid c;
    c.lower_ = std::move(lower);
    c.sides_ = std::move(sides);
    c.validate(true);
    return c;
  }

  static Cuboid unit(std::size_t d) { return Cuboid(Point(d, Scalar(0)), std::vector<Scalar>(d, Scalar(1))); }

  static Cuboid from_bounds(const Point& lo, const Point& hi) {
    std::vector<Scalar> s(lo.size());
    for (std::size_t i = 0; i < lo.size(); ++i) s[i] = hi[i] - lo[i];
    return Cuboid(lo, std::move(s));
  }

  std::size_t dim() const { return sides_.size(); }
  const Point& lower() const { return lower_; }
  const std::vector<Scalar>& sides() const { return sides_; }
  const Scalar& lower(std::size_t i) const { return lower_[i]; }
  const Scalar& side(std::size_t i) const { return sides_[i]; }
  Scalar upper(std::size_t i) const { return lower_[i] + sides_[i]; }
  Point upper() const {
    Point u(dim());
    for (std::size_t i = 0; i < dim(); ++i) u[i] = upper(i);
    return u;
  }

  Scalar volume() const {
    Scalar v = 1;
    for (const auto& s : sides_) v *= s;
    return v;
  }

  /// 2 * sum_i prod_{j != i} l_j.
  Scalar surface() const {
    Scalar total = 0;
    for (std::size_t i = 0; i < dim(); ++i) {
      Scalar p = 1;
      for (std::size_t j = 0; j < dim(); ++j)
        if (j != i) p *= sides_[j];
      total += p;
    }
    return 2 * total;
  }

  bool contains(const Cuboid& o) const {
    for (std::size_t i = 0; i < dim(); ++i)
      if (o.lower_[i] < lower_[i] || o.upper(i) > upper(i)) return false;
    return true;
  }

  /// True iff the open interiors share a point (touching is not overlap).
  bool interiors_intersect(const Cuboid& o) const {
    for (std::size_t i = 0; i < dim(); ++i)
      if (!(o.lower_[i] < upper(i) && lower_[i] < o.upper(i))) return false;
    return true;
  }

  std::optional<Cuboid> intersection(const Cuboid& o) const {
    Point lo(dim()), hi(dim());
    for (std::size_t i = 0; i < dim(); ++i) {
      lo[i] = std::max(lower_[i], o.lower_[i]);
      hi[i] = std::min(upper(i), o.upper(i));
      if (!(lo[i] < hi[i])) return std::nullopt;
    }
    return from_bounds(lo, hi);
  }

  Cuboid translated(const Point& offset) const {
    Cuboid c = *this;
    for (std::size_t i = 0; i < dim(); ++i) c.lower_[i] += offset[i];
    return c;
  }

  Cuboid scaled(const Scalar& f) const {
    Cuboid c = *this;
    for (std::size_t i = 0; i < dim(); ++i) {
      c.lower_[i] *= f;
      c.sides_[i] *= f;
    }
    return c;
  }

  friend bool operator==(const Cuboid& a, const Cuboid& b) { return a.lower_ == b.lower_ && a.sides_ == b.sides_; }

 private:
  void validate(bool allow_zero) const {
    if (sides_.empty()) throw std::invalid_argument("cuboid needs d >= 1");
    if (lower_.size() != sides_.size()) throw std::invalid_argument("cuboid lower/sides dimension mismatch");
    for (const auto& s : sides_) {
      if (s < 0 || (!allow_zero && s == 0)) throw std::invalid_argument("cuboid sides must be positive");
    }
  }

  Point lower_;
  std::vector<Scalar> sides_;
};

inline Scalar volume(const Cuboid& c) { return c.volume(); }
inline Scalar surface(const Cuboid& c) { return c.surface(); }

/// Restriction to the listed dimensions (0-based, strictly increasing).
inline Cuboid project(const Cuboid& c, const std::vector<std::size_t>& dims) {
  if (dims.empty()) throw std::invalid_argument("projection onto an empty dimension set");
  Point lo;
  std::vector<Scalar> s;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (dims[k] >= c.dim()) throw std::invalid_argument("projection dimension out of range");
    if (k > 0 && dims[k] <= dims[k - 1]) throw std::invalid_argument("projection dimensions must increase");
    lo.push_back(c.lower(dims[k]));
    s.push_back(c.side(dims[k]));
  }
  return Cuboid::degenerate(std::move(lo), std::move(s));
}

struct Item {
  int id = 0;
  Scalar side;
  Scalar profit;
};

inline Item make_item(int id, Scalar side, Scalar profit) {
  if (!(side > 0 && side <= 1)) throw std::invalid_argument("item side must lie in (0,1]");
  if (!(profit > 0)) throw std::invalid_argument("item profit must be positive");
  return Item{id, std::move(side), std::move(profit)};
}

inline Scalar item_volume(const Item& it, std::size_t d) { return pow(it.side, static_cast<unsigned long>(d)); }

inline Scalar total_volume(const std::vector<Item>& items, std::size_t d) {
  Scalar v = 0;
  for (const auto& it : items) v += item_volume(it, d);
  return v;
}

inline Scalar total_profit(const std::vector<Item>& items) {
  Scalar p = 0;
  for (const auto& it : items) p += it.profit;
  return p;
}

inline Scalar max_side(const std::vector<Item>& items) {
  Scalar m = 0;
  for (const auto& it : items) m = std::max(m, it.side);
  return m;
}

/// Descending side, ties by ascending id.
inline void sort_by_side_desc(std::vector<Item>& items) {
  std::stable_sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
    if (a.side != b.side) return a.side > b.side;
    return a.id < b.id;
  });
}

struct Placement {
  Item item;
  Point pos;

  Cuboid region() const { return Cuboid(pos, std::vector<Scalar>(pos.size(), item.side)); }
};

struct Packing {
  Cuboid container;
  std::vector<Placement> placements;

  Scalar profit() const {
    Scalar p = 0;
    for (const auto& pl : placements) p += pl.item.profit;
    return p;
  }
  Scalar packed_volume() const {
    Scalar v = 0;
    for (const auto& pl : placements) v += item_volume(pl.item, container.dim());
    return v;
  }
  std::vector<Item> items() const {
    std::vector<Item> out;
    out.reserve(placements.size());
    for (const auto& pl : placements) out.push_back(pl.item);
    return out;
  }
};

struct Violation {
  enum class Kind { Dimension, Containment, Overlap, DuplicateId };
  Kind kind;
  int first = -1;
  int second = -1;
  std::string message;
};

struct PackingCheck {
  std::optional<Violation> violation;
  bool ok() const { return !violation.has_value(); }
  explicit operator bool() const { return ok(); }
};

/// Exact containment and pairwise interior-disjointness. The report names the
/// first violation found, scanning placements in their given order.
inline PackingCheck verify_packing(const Packing& p) {
  const std::size_t d = p.container.dim();
  std::vector<Cuboid> regions;
  regions.reserve(p.placements.size());
  std::vector<int> ids;
  for (const auto& pl : p.placements) {
    if (pl.pos.size() != d) {
      return {Violation{Violation::Kind::Dimension, pl.item.id, -1,
                        "item " + std::to_string(pl.item.id) + " has a position of the wrong dimension"}};
    }
    regions.push_back(pl.region());
    if (!p.container.contains(regions.back())) {
      return {Violation{Violation::Kind::Containment, pl.item.id, -1,
                        "item " + std::to_string(pl.item.id) + " is not inside the container"}};
    }
    ids.push_back(pl.item.id);
  }
  {
    std::vector<int> sorted = ids;
    std::sort(sorted.begin(), sorted.end());
    auto dup = std::adjacent_find(sorted.begin(), sorted.end());
    if (dup != sorted.end())
      return {Violation{Violation::Kind::DuplicateId, *dup, *dup, "item " + std::to_string(*dup) + " placed twice"}};
  }
  // Sweep along the container's longest axis (strips are long in one direction);
  // only pairs whose intervals overlap there are tested.
  std::size_t ax = 0;
  for (std::size_t i = 1; i < d; ++i)
    if (p.container.side(i) > p.container.side(ax)) ax = i;
  std::vector<std::size_t> order(regions.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (regions[a].lower(ax) != regions[b].lower(ax)) return regions[a].lower(ax) < regions[b].lower(ax);
    return a < b;
  });
  std::optional<std::pair<std::size_t, std::size_t>> worst;
  for (std::size_t x = 0; x < order.size(); ++x) {
    const Cuboid& a = regions[order[x]];
    const Scalar hi = a.upper(ax);
    for (std::size_t y = x + 1; y < order.size() && regions[order[y]].lower(ax) < hi; ++y) {
      if (a.interiors_intersect(regions[order[y]])) {
        std::pair<std::size_t, std::size_t> pr = std::minmax(order[x], order[y]);
        if (!worst || pr < *worst) worst = pr;
      }
    }
  }
  if (worst) {
    int a = ids[worst->first], b = ids[worst->second];
    return {Violation{Violation::Kind::Overlap, a, b,
                      "items " + std::to_string(a) + " and " + std::to_string(b) + " overlap"}};
  }
  return {};
}

}  // namespace hcpack
