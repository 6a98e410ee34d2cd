#pragma once

// V-Boxes (volume-budgeted, filled by NFDH) and N-Boxes (an s-hat grid holding
// one item per cell).

#include "hcpack/nfdh.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hcpack {

enum class BoxKind { V, N };

inline const char* to_string(BoxKind k) { return k == BoxKind::V ? "V" : "N"; }

struct BoxSpec {
  Cuboid shell;
  Scalar s_hat;
  BoxKind kind = BoxKind::V;
  std::vector<BigInt> grid_counts;
  std::string tag;  // which construction emitted the box
};

/// Throws unless every shell side is a positive integer multiple of s_hat.
inline BoxSpec make_box(BoxKind kind, Cuboid shell, Scalar s_hat, std::string tag = {}) {
  if (!(s_hat > 0)) throw std::invalid_argument("box size parameter must be positive");
  BoxSpec b{std::move(shell), std::move(s_hat), kind, {}, std::move(tag)};
  for (std::size_t i = 0; i < b.shell.dim(); ++i) {
    Scalar q = b.shell.side(i) / b.s_hat;
    if (q.get_den() != 1) throw std::invalid_argument("box side is not a multiple of its size parameter");
    b.grid_counts.push_back(q.get_num());
  }
  return b;
}

struct BoxCapacity {
  BoxKind kind = BoxKind::V;
  Scalar volume_budget;  // V: VOL - s_hat * SURF / 2 (may be negative)
  BigInt count;          // N: product of grid counts
};

inline BoxCapacity capacity(const BoxSpec& b) {
  BoxCapacity c;
  c.kind = b.kind;
  if (b.kind == BoxKind::V) {
    c.volume_budget = b.shell.volume() - b.s_hat * b.shell.surface() / 2;
  } else {
    c.count = 1;
    for (const auto& n : b.grid_counts) c.count *= n;
  }
  return c;
}

struct Admissibility {
  std::optional<std::string> violation;
  bool ok() const { return !violation; }
  explicit operator bool() const { return ok(); }
};

inline Admissibility admissible(const BoxSpec& b, const std::vector<Item>& items) {
  for (const auto& it : items)
    if (it.side > b.s_hat) return {"item " + std::to_string(it.id) + " is larger than the size parameter"};
  BoxCapacity c = capacity(b);
  if (b.kind == BoxKind::V) {
    Scalar v = total_volume(items, b.shell.dim());
    if (!items.empty() && v > c.volume_budget)
      return {"volume " + to_string(v) + " exceeds budget " + to_string(c.volume_budget)};
  } else if (BigInt(static_cast<unsigned long>(items.size())) > c.count) {
    return {std::to_string(items.size()) + " items exceed " + c.count.get_str() + " cells"};
  }
  return {};
}

inline Packing pack_box(const BoxSpec& b, const std::vector<Item>& items) {
  if (auto a = admissible(b, items); !a) throw std::invalid_argument("pack_box: " + *a.violation);
  if (b.kind == BoxKind::V) {
    NfdhResult r = nfdh_pack(items, b.shell);
    if (!r.all_packed()) throw std::logic_error("pack_box: NFDH left items outside an admissible V-Box");
    return r.packed;
  }
  Packing p{b.shell, {}};
  const std::size_t d = b.shell.dim();
  std::vector<BigInt> idx(d, 0);
  for (const auto& it : items) {
    Point pos(d);
    for (std::size_t i = 0; i < d; ++i) pos[i] = b.shell.lower(i) + Scalar(idx[i]) * b.s_hat;
    p.placements.push_back(Placement{it, std::move(pos)});
    // row-major: last index moves fastest
    for (std::size_t i = d; i-- > 0;) {
      if (++idx[i] < b.grid_counts[i]) break;
      idx[i] = 0;
    }
  }
  return p;
}

}  // namespace hcpack
