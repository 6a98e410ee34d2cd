#pragma once

// Grids: per-dimension boundary lists plus a subset of the index product.

#include "hcpack/geometry.hpp"

#include <algorithm>
#include <set>
#include <vector>

namespace hcpack {

using CellIndex = std::vector<std::size_t>;

struct Grid {
  std::vector<std::vector<Scalar>> boundaries;  // strictly increasing per dimension
  std::vector<CellIndex> cells;                 // kept in lexicographic order

  std::size_t dim() const { return boundaries.size(); }
  std::size_t layers(std::size_t i) const { return boundaries[i].size() - 1; }

  Cuboid cell(const CellIndex& c) const {
    Point lo(dim()), hi(dim());
    for (std::size_t i = 0; i < dim(); ++i) {
      lo[i] = boundaries[i][c[i]];
      hi[i] = boundaries[i][c[i] + 1];
    }
    return Cuboid::from_bounds(lo, hi);
  }

  Cuboid bounding_box() const {
    Point lo(dim()), hi(dim());
    for (std::size_t i = 0; i < dim(); ++i) {
      lo[i] = boundaries[i].front();
      hi[i] = boundaries[i].back();
    }
    return Cuboid::from_bounds(lo, hi);
  }

  void validate() const {
    if (boundaries.empty()) throw std::invalid_argument("grid needs d >= 1");
    for (const auto& b : boundaries) {
      if (b.size() < 2) throw std::invalid_argument("grid dimension needs at least one layer");
      for (std::size_t j = 1; j < b.size(); ++j)
        if (!(b[j - 1] < b[j])) throw std::invalid_argument("grid boundaries must strictly increase");
    }
    for (const auto& c : cells) {
      if (c.size() != dim()) throw std::invalid_argument("grid cell index has wrong dimension");
      for (std::size_t i = 0; i < dim(); ++i)
        if (c[i] >= layers(i)) throw std::invalid_argument("grid cell index out of range");
    }
  }

  /// Every cell of the index product.
  static Grid full(std::vector<std::vector<Scalar>> boundaries) {
    Grid g{std::move(boundaries), {}};
    CellIndex c(g.dim(), 0);
    g.validate();
    for (;;) {
      g.cells.push_back(c);
      std::size_t i = g.dim();
      while (i-- > 0) {
        if (++c[i] < g.layers(i)) break;
        c[i] = 0;
      }
      if (i == static_cast<std::size_t>(-1)) break;
    }
    return g;
  }

  static Grid single(const Cuboid& c) {
    std::vector<std::vector<Scalar>> b;
    for (std::size_t i = 0; i < c.dim(); ++i) b.push_back({c.lower(i), c.upper(i)});
    return full(std::move(b));
  }
};

inline std::vector<Cuboid> cells_of(const Grid& g) {
  std::vector<Cuboid> out;
  out.reserve(g.cells.size());
  for (const auto& c : g.cells) out.push_back(g.cell(c));
  return out;
}

/// Inserts every removed cuboid's boundaries, drops covered cells. A remaining
/// cell partially covered by a removed cuboid is impossible and is asserted.
inline Grid split_grid(const Grid& g, const std::vector<Cuboid>& removed) {
  g.validate();
  const std::size_t d = g.dim();
  const Cuboid bb = g.bounding_box();
  for (const auto& r : removed) {
    if (r.dim() != d) throw std::invalid_argument("split_grid: removed cuboid has wrong dimension");
    if (!bb.contains(r)) throw std::invalid_argument("split_grid: removed cuboid outside the grid");
  }
  Grid out;
  out.boundaries.resize(d);
  for (std::size_t i = 0; i < d; ++i) {
    std::set<Scalar> s(g.boundaries[i].begin(), g.boundaries[i].end());
    for (const auto& r : removed) {
      s.insert(r.lower(i));
      s.insert(r.upper(i));
    }
    out.boundaries[i].assign(s.begin(), s.end());
    if (out.layers(i) > g.layers(i) + 2 * removed.size())
      throw std::logic_error("split_grid: layer bound violated");
  }
  // Old boundary j sits at new index map[i][j].
  std::vector<std::vector<std::size_t>> map(d);
  for (std::size_t i = 0; i < d; ++i) {
    for (const auto& v : g.boundaries[i]) {
      auto it = std::lower_bound(out.boundaries[i].begin(), out.boundaries[i].end(), v);
      map[i].push_back(static_cast<std::size_t>(it - out.boundaries[i].begin()));
    }
  }
  for (const auto& c : g.cells) {
    CellIndex lo(d), hi(d), cur(d);
    for (std::size_t i = 0; i < d; ++i) {
      lo[i] = map[i][c[i]];
      hi[i] = map[i][c[i] + 1];
    }
    cur = lo;
    for (;;) {
      Cuboid sub = out.cell(cur);
      bool covered = false;
      for (const auto& r : removed) {
        if (r.contains(sub)) {
          covered = true;
          break;
        }
        if (r.interiors_intersect(sub)) throw std::logic_error("split_grid: cell partially covered");
      }
      if (!covered) out.cells.push_back(cur);
      std::size_t i = d;
      while (i-- > 0) {
        if (++cur[i] < hi[i]) break;
        cur[i] = lo[i];
      }
      if (i == static_cast<std::size_t>(-1)) break;
    }
  }
  std::sort(out.cells.begin(), out.cells.end());
  return out;
}

}  // namespace hcpack
