#pragma once

// Next Fit Decreasing Height for hypercubes in any dimension.
//
// Levels are opened along the last active dimension; inside a level the same
// sorted list is handed to the (k-1)-dimensional routine, which packs a prefix.
// In one dimension items are laid next-fit until the first one that overflows.

#include "hcpack/geometry.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hcpack {

struct NfdhLevel {
  std::size_t dim;  // dimension the level was opened along
  Scalar start;     // coordinate of the level's floor
  Scalar height;    // side of the level's first item
  std::size_t depth;
};

struct NfdhResult {
  Packing packed;
  std::vector<Item> leftovers;
  std::vector<NfdhLevel> levels;

  std::vector<int> leftover_ids() const {
    std::vector<int> ids;
    for (const auto& it : leftovers) ids.push_back(it.id);
    return ids;
  }
  bool all_packed() const { return leftovers.empty(); }
};

namespace detail {

// Packs a prefix of items[next..] into the box spanned by dims [0, k) of
// `region`, with pos[k..d) already fixed by the caller. Returns the new `next`.
inline std::size_t nfdh_rec(const std::vector<Item>& items, std::size_t next, const Cuboid& region, std::size_t k,
                            Point& pos, NfdhResult& out) {
  const std::size_t dim = k - 1;
  const Scalar top = region.upper(dim);
  Scalar a = region.lower(dim);
  while (next < items.size()) {
    const Scalar& l = items[next].side;
    if (a + l > top) break;
    pos[dim] = a;
    if (k == 1) {
      out.packed.placements.push_back(Placement{items[next], pos});
      ++next;
    } else {
      out.levels.push_back(NfdhLevel{dim, a, l, region.dim() - k});
      std::size_t after = nfdh_rec(items, next, region, k - 1, pos, out);
      if (after == next) break;  // cannot happen once oversized items are gone
      next = after;
    }
    a += l;
  }
  return next;
}

}  // namespace detail

inline NfdhResult nfdh_pack(std::vector<Item> items, const Cuboid& region) {
  NfdhResult out;
  out.packed.container = region;
  sort_by_side_desc(items);
  Scalar min_side = region.side(0);
  for (std::size_t i = 1; i < region.dim(); ++i) min_side = std::min(min_side, region.side(i));

  std::vector<Item> fitting;
  for (auto& it : items) {
    if (it.side > min_side) out.leftovers.push_back(it);
    else fitting.push_back(it);
  }
  Point pos(region.dim());
  std::size_t next = detail::nfdh_rec(fitting, 0, region, region.dim(), pos, out);
  for (std::size_t i = next; i < fitting.size(); ++i) out.leftovers.push_back(fitting[i]);
  std::sort(out.leftovers.begin(), out.leftovers.end(), [](const Item& a, const Item& b) {
    if (a.side != b.side) return a.side > b.side;
    return a.id < b.id;
  });
  return out;
}

struct GuaranteeCheck {
  bool ok = true;
  Scalar free_volume;
  Scalar allowance;  // delta * SURF / 2
  std::string message;
};

/// All items packed, or VOL(region) - VOL(packed) <= delta * SURF(region) / 2.
inline GuaranteeCheck check_guarantee(const NfdhResult& r, const Scalar& delta) {
  const Cuboid& c = r.packed.container;
  for (const auto& pl : r.packed.placements)
    if (pl.item.side > delta) throw std::invalid_argument("check_guarantee: item side exceeds delta");
  for (const auto& it : r.leftovers)
    if (it.side > delta) throw std::invalid_argument("check_guarantee: item side exceeds delta");
  GuaranteeCheck g;
  g.free_volume = c.volume() - r.packed.packed_volume();
  g.allowance = delta * c.surface() / 2;
  if (r.leftovers.empty()) return g;
  if (g.free_volume > g.allowance) {
    g.ok = false;
    g.message = "free volume " + to_string(g.free_volume) + " exceeds " + to_string(g.allowance) + " with " +
                std::to_string(r.leftovers.size()) + " items left over";
  }
  return g;
}

}  // namespace hcpack
