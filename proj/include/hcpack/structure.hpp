#pragma once

// Structural transformation of a packing into boxes and a few loose items:
// alpha values, k-elongated cells and collections, merging and item
// assignment, the per-collection repacking routines, and the constants that
// bound the output.

#include "hcpack/bounds.hpp"
#include "hcpack/boxes.hpp"
#include "hcpack/grid.hpp"
#include "hcpack/magnitude.hpp"
#include "hcpack/strip.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace hcpack {

// ---------------------------------------------------------------- constants

struct MagnitudeCheck {
  std::string name;
  bool holds = false;
};

namespace detail {

inline Magnitude mag(const BigInt& n) { return Magnitude(Scalar(n)); }
inline Magnitude mag(std::size_t n) { return Magnitude(Scalar(static_cast<unsigned long>(n))); }

inline void check(std::vector<MagnitudeCheck>& log, std::string name, bool holds) {
  log.push_back({name, holds});
  if (!holds) throw BoundViolation(name);
}

}  // namespace detail

/// ⌈log_{1-eps}(eps)⌉, the full recursion depth.
inline unsigned long full_depth_cap(const Scalar& eps) { return ceil_log(1 - eps, eps); }

/// Threshold constants of the strip algorithm for base dimension d-k and long-side factor alpha.
struct StripConstants {
  Magnitude rho1, rho, sizes, configs;
};

inline StripConstants strip_constants(std::size_t d, std::size_t k, const Magnitude& alpha, const Magnitude& N,
                                      const Scalar& eps, std::vector<MagnitudeCheck>* checks = nullptr) {
  const std::size_t dd = d - k;
  StripConstants c;
  c.rho1 = Magnitude(eps) / (detail::mag(2 * (d - 1)) * N * pow(alpha, dd));
  const BigInt i = ceil_int(1 / eps);
  if (i == 1) {
    c.rho = c.rho1;
  } else {
    // C_rho,i = C_rho1^(i dd^(2i-2)) / 2^((i-1) dd^(2i-3))
    const unsigned long e = to_ulong(i);
    const BigInt num_exp = i * pow(BigInt(static_cast<unsigned long>(dd)), 2 * e - 2);
    const BigInt den_exp = BigInt(i - 1) * pow(BigInt(static_cast<unsigned long>(dd)), 2 * e - 3);
    c.rho = pow(c.rho1, detail::mag(num_exp)) / pow(Magnitude(2), detail::mag(den_exp));
  }
  c.sizes = (pow(c.rho, d) * Magnitude(eps)).reciprocal() + Magnitude(1);
  c.configs = pow(pow(c.rho, dd).reciprocal() + Magnitude(1), c.sizes);
  if (checks) {
    // C_configs > 1/C_rho1 = (2(d-1)/eps) N alpha^(d-k) > N alpha^(d-k)
    detail::check(*checks, "C_configs(k=" + std::to_string(k) + ") > 1/C_rho1", c.configs > c.rho1.reciprocal());
    detail::check(*checks, "2(d-1)/eps > 1", Scalar(static_cast<long>(2 * (d - 1))) / eps > 1);
  }
  return c;
}

struct AlphaTable {
  std::size_t d = 2;
  Scalar epsilon;
  BigInt N = 1;
  std::vector<Magnitude> alpha;      // alpha[k-1] is alpha_k, k = 1..d
  std::vector<Magnitude> c_configs;  // c_configs[k-1] for k = 1..d-1
  bool desk = false;                 // c_configs supplied by the caller
  std::optional<std::string> warning;
  std::vector<MagnitudeCheck> checks;

  const Magnitude& at(std::size_t k) const { return alpha.at(k - 1); }
  Scalar exact(std::size_t k) const {
    if (!at(k).is_exact()) throw std::logic_error("alpha_" + std::to_string(k) + " is not a desk-size number");
    return at(k).exact();
  }
  Scalar exact_configs(std::size_t k) const {
    const Magnitude& c = c_configs.at(k - 1);
    if (!c.is_exact()) throw std::logic_error("C_configs for k=" + std::to_string(k) + " is not a desk-size number");
    return c.exact();
  }
};

namespace detail {

inline std::optional<std::string> epsilon_warning(std::size_t d, const Scalar& eps) {
  if (d < 2) throw std::invalid_argument("d must be at least 2");
  if (!(eps > 0 && eps < 1)) throw std::invalid_argument("epsilon must lie in (0,1)");
  const Scalar limit = pow(Scalar(1, 2), d + 2);
  if (eps < limit) return std::nullopt;
  return "epsilon " + to_string(eps) + " is not below 1/2^(d+2) = " + to_string(limit) +
         "; values are computed but the guarantees do not apply";
}

inline void finish_alpha(AlphaTable& t) {
  const std::size_t d = t.d;
  detail::check(t.checks, "alpha_d > 1", t.at(d) > Magnitude(1));
  for (std::size_t k = d - 1; k >= 1; --k) {
    detail::check(t.checks, "alpha_" + std::to_string(k) + " > alpha_" + std::to_string(k + 1), t.at(k) > t.at(k + 1));
    const Magnitude rhs = detail::mag(t.N) * pow(t.at(k + 1), d - k);
    detail::check(t.checks, "C_configs(k=" + std::to_string(k) + ") > N alpha_" + std::to_string(k + 1) + "^(d-k)",
                  t.c_configs[k - 1] > rhs);
  }
}

}  // namespace detail

/// alpha_d = 2d/eps, alpha_k = (2/eps)(C_configs(d, k, alpha_{k+1}, N, eps) + 3).
inline AlphaTable alpha_table(std::size_t d, const Scalar& eps, const BigInt& N = 1) {
  AlphaTable t;
  t.warning = detail::epsilon_warning(d, eps);
  if (N < 1) throw std::invalid_argument("alpha_table: N must be positive");
  t.d = d;
  t.epsilon = eps;
  t.N = N;
  t.alpha.assign(d, Magnitude(1));
  t.c_configs.assign(d - 1, Magnitude(1));
  t.alpha[d - 1] = Magnitude(Scalar(Scalar(static_cast<long>(2 * d)) / eps));
  for (std::size_t k = d - 1; k >= 1; --k) {
    StripConstants sc = strip_constants(d, k, t.at(k + 1), detail::mag(N), eps, &t.checks);
    t.c_configs[k - 1] = sc.configs;
    t.alpha[k - 1] = Magnitude(Scalar(2 / eps)) * (sc.configs + Magnitude(3));
  }
  detail::finish_alpha(t);
  return t;
}

/// Same recurrence with caller-chosen configuration constants, so that the
/// k-elongated cases become reachable at desk scale. Each C_k must exceed
/// N alpha_{k+1}^(d-k).
inline AlphaTable desk_alpha_table(std::size_t d, const Scalar& eps, const BigInt& N, const std::vector<Scalar>& c_configs) {
  AlphaTable t;
  t.warning = detail::epsilon_warning(d, eps);
  if (N < 1) throw std::invalid_argument("desk_alpha_table: N must be positive");
  if (c_configs.size() != d - 1) throw std::invalid_argument("desk_alpha_table: need d-1 configuration constants");
  t.d = d;
  t.epsilon = eps;
  t.N = N;
  t.desk = true;
  t.alpha.assign(d, Magnitude(1));
  t.c_configs.assign(d - 1, Magnitude(1));
  t.alpha[d - 1] = Magnitude(Scalar(Scalar(static_cast<long>(2 * d)) / eps));
  for (std::size_t k = d - 1; k >= 1; --k) {
    const Scalar& c = c_configs[k - 1];
    if (!(c > Scalar(N) * pow(t.exact(k + 1), d - k)))
      throw std::invalid_argument("desk_alpha_table: C_" + std::to_string(k) + " must exceed N alpha_" +
                                  std::to_string(k + 1) + "^(d-k)");
    t.c_configs[k - 1] = Magnitude(c);
    t.alpha[k - 1] = Magnitude(Scalar(2 / eps * (c + 3)));
  }
  detail::finish_alpha(t);
  return t;
}

/// rho'_0 = 1, rho'_{i+1} = (rho'_i^d / (4 d N alpha_1^d))^(d+1).
inline Magnitude rho_prime_next(const Magnitude& r, std::size_t d, const BigInt& N, const Magnitude& alpha1) {
  const Magnitude den = detail::mag(4 * d) * detail::mag(N) * pow(alpha1, d);
  return pow(pow(r, d) / den, d + 1);
}

struct ConstantsReport {
  std::size_t d = 2;
  Scalar epsilon;
  std::optional<std::string> warning;
  AlphaTable alpha;
  unsigned long depth_cap = 0;  // ⌈log_{1-eps}(eps)⌉
  Scalar c_layer;
  BigInt c_n;
  Magnitude c_cells, c_rho, c_large, c_boxes;
  std::vector<Magnitude> c_configs;  // k = 1..d-1
  std::vector<Magnitude> c_boxes_k;  // k = 0..d
  std::vector<MagnitudeCheck> checks;
};

/// Closed forms built on a given alpha table (its N is used for the strip constants).
inline ConstantsReport constants_for(const AlphaTable& t) {
  ConstantsReport r;
  const std::size_t d = t.d;
  const Scalar& eps = t.epsilon;
  r.d = d;
  r.epsilon = eps;
  r.warning = t.warning;
  r.alpha = t;
  r.c_configs = t.c_configs;
  r.depth_cap = full_depth_cap(eps);
  r.c_layer = Scalar(static_cast<long>(2 * r.depth_cap)) / eps + 1;
  r.c_n = ceil_int(pow(r.c_layer, d));
  if (Scalar(r.c_n) != pow(r.c_layer, d)) throw std::logic_error("C_layer is not an integer");
  r.c_cells = pow(detail::mag(r.c_n), r.depth_cap);
  Magnitude rp(1);
  const unsigned long steps = to_ulong(ceil_int(1 / eps));
  for (unsigned long i = 0; i < steps; ++i) rp = rho_prime_next(rp, d, r.c_n, t.at(1));
  r.c_rho = rp;
  const Magnitude a1d = pow(t.at(1), d);
  r.c_large = r.c_cells * detail::mag(r.c_n) * a1d / pow(r.c_rho, d);

  r.c_boxes_k.assign(d + 1, Magnitude(1));
  r.c_boxes_k[0] = Magnitude(1) + pow(Magnitude(r.c_layer) + Magnitude(2) * detail::mag(r.c_n) * a1d / pow(r.c_rho, d), d);
  for (std::size_t k = 1; k < d; ++k) {
    const std::size_t dd = d - k;
    StripConstants sc = strip_constants(d, k, t.at(k + 1), detail::mag(t.N), eps);
    const Magnitude& cfg = t.c_configs[k - 1];
    Magnitude n_boxes = cfg / pow(sc.rho, dd);
    Magnitude v_boxes = cfg * detail::mag(t.N) * pow(Magnitude(2), dd) / pow(sc.rho, dd * dd) + detail::mag(t.N);
    r.c_boxes_k[k] = n_boxes + v_boxes;
  }
  Magnitude best = r.c_boxes_k[0];
  for (std::size_t k = 1; k <= d; ++k) {
    try {
      if (r.c_boxes_k[k] > best) best = r.c_boxes_k[k];
    } catch (const Undecidable&) {
      best = best + r.c_boxes_k[k];  // too close to order; the sum still bounds both
    }
  }
  r.c_boxes = r.c_cells * best;

  r.checks = t.checks;
  detail::check(r.checks, "C_layer >= 1", r.c_layer >= 1);
  detail::check(r.checks, "C_boxes >= C_cells", r.c_boxes >= r.c_cells);
  return r;
}

/// Full-size constants: the alpha table uses N = C_N(d, eps).
inline ConstantsReport constants(std::size_t d, const Scalar& eps) {
  detail::epsilon_warning(d, eps);
  const unsigned long cap = full_depth_cap(eps);
  const Scalar layer = Scalar(static_cast<long>(2 * cap)) / eps + 1;
  const BigInt cn = ceil_int(pow(layer, d));
  return constants_for(alpha_table(d, eps, cn));
}

// ---------------------------------------------------------------- cells

/// Dimensions by non-increasing side; ties keep the lower index first.
inline std::vector<std::size_t> sigma_of(const Cuboid& c) {
  std::vector<std::size_t> s(c.dim());
  std::iota(s.begin(), s.end(), 0);
  std::stable_sort(s.begin(), s.end(), [&](std::size_t a, std::size_t b) { return c.side(a) > c.side(b); });
  return s;
}

/// The unique k with sides sigma(1..k) > alpha_k s and sigma(i) <= alpha_i s
/// for i > k. A cell that no item touches (s = 0) is d-elongated.
inline std::size_t classify_cell(const Cuboid& cell, const Scalar& s, const AlphaTable& a) {
  const std::size_t d = cell.dim();
  if (d != a.d) throw std::invalid_argument("classify_cell: dimension mismatch");
  if (s < 0) throw std::invalid_argument("classify_cell: negative size parameter");
  if (s == 0) return d;
  const auto sigma = sigma_of(cell);
  const Magnitude ms(s);
  std::vector<bool> long_at(d + 1), short_at(d + 1);  // side_{sigma(i)} > alpha_j s, <= alpha_i s
  std::optional<std::size_t> found;
  for (std::size_t k = 0; k <= d; ++k) {
    bool ok = true;
    for (std::size_t i = 1; i <= k && ok; ++i) ok = Magnitude(cell.side(sigma[i - 1])) > a.at(k) * ms;
    for (std::size_t i = k + 1; i <= d && ok; ++i) ok = Magnitude(cell.side(sigma[i - 1])) <= a.at(i) * ms;
    if (!ok) continue;
    if (found) throw std::logic_error("classify_cell: cell is elongated for two values of k");
    found = k;
  }
  if (!found) throw std::logic_error("classify_cell: no k fits the cell");
  return *found;
}

// ---------------------------------------------------------------- collections

struct Collection {
  std::vector<std::size_t> cells;      // indices into the grid's cell list, ascending
  std::size_t k = 0;
  Scalar s_hat;                        // max over the cells' s_hat
  std::vector<std::size_t> long_dims;  // sigma(1..k) of any cell
};

/// The ≺ key: long sides in descending order.
inline std::vector<Scalar> long_sides(const Grid& g, const Collection& c) {
  std::vector<Scalar> out;
  const Cuboid cell = g.cell(g.cells[c.cells.front()]);
  for (std::size_t j : c.long_dims) out.push_back(cell.side(j));
  return out;
}

/// Checks items (i) to (iv) of the collection definition. Returns a reason on failure.
inline std::optional<std::string> check_collection(const Grid& g, const Collection& c,
                                                   const std::vector<Scalar>& cell_s_hat, const AlphaTable& a) {
  if (c.cells.empty()) return "empty collection";
  Scalar s = 0;
  for (std::size_t i : c.cells) s = std::max(s, cell_s_hat[i]);
  if (s != c.s_hat) return "s_hat is not the maximum over the cells";
  const Cuboid first = g.cell(g.cells[c.cells.front()]);
  const auto sigma0 = sigma_of(first);
  for (std::size_t i : c.cells) {
    const Cuboid cell = g.cell(g.cells[i]);
    if (classify_cell(cell, s, a) != c.k) return "a cell is not " + std::to_string(c.k) + "-elongated for s_hat(C)";
    const auto sigma = sigma_of(cell);
    for (std::size_t j = 0; j < c.k; ++j) {
      if (sigma[j] != sigma0[j]) return "long dimensions differ between cells";
      if (cell.lower(sigma[j]) != first.lower(sigma[j]) || cell.side(sigma[j]) != first.side(sigma[j]))
        return "projections onto a long dimension differ";
    }
  }
  if (std::vector<std::size_t>(sigma0.begin(), sigma0.begin() + static_cast<long>(c.k)) != c.long_dims)
    return "recorded long dimensions are wrong";
  // Facet-connected: index-adjacent cells.
  std::vector<bool> seen(c.cells.size(), false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  std::size_t count = 1;
  while (!stack.empty()) {
    const CellIndex& ci = g.cells[c.cells[stack.back()]];
    stack.pop_back();
    for (std::size_t j = 0; j < c.cells.size(); ++j) {
      if (seen[j]) continue;
      const CellIndex& cj = g.cells[c.cells[j]];
      std::size_t diff = 0, gap = 0;
      for (std::size_t t = 0; t < ci.size(); ++t)
        if (ci[t] != cj[t]) {
          ++diff;
          gap = ci[t] > cj[t] ? ci[t] - cj[t] : cj[t] - ci[t];
        }
      if (diff == 1 && gap == 1) {
        seen[j] = true;
        ++count;
        stack.push_back(j);
      }
    }
  }
  if (count != c.cells.size()) return "cells are not facet-connected";
  return std::nullopt;
}

struct CollectionPartition {
  Grid grid;
  std::vector<Placement> items;
  std::vector<Scalar> cell_s_hat;
  std::vector<std::vector<std::size_t>> touched;  // per item: touched cells
  std::vector<Collection> collections;
  std::vector<std::size_t> assignment;            // per item: collection index
  std::size_t merges = 0;
  std::size_t boundary_items = 0;                 // items touching more than one collection
};

namespace detail {

inline bool is_long(const Collection& c, std::size_t dim) {
  return std::find(c.long_dims.begin(), c.long_dims.end(), dim) != c.long_dims.end();
}

// Index-adjacent pairs (a, b, dim) among a set of touched cells, a below b.
inline std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> adjacent_pairs(
    const Grid& g, const std::vector<std::size_t>& cells) {
  std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> out;
  for (std::size_t x : cells)
    for (std::size_t y : cells) {
      const CellIndex& a = g.cells[x];
      const CellIndex& b = g.cells[y];
      std::size_t diff = 0, dim = 0;
      bool up = false;
      for (std::size_t t = 0; t < a.size(); ++t)
        if (a[t] != b[t]) {
          ++diff;
          dim = t;
          up = b[t] == a[t] + 1;
        }
      if (diff == 1 && up) out.emplace_back(x, y, dim);
    }
  return out;
}

}  // namespace detail

/// Starts with one collection per cell and merges two collections whenever an
/// item crosses a common facet that is bad (orthogonal to a short dimension)
/// for both. Items are then assigned: an item inside one collection goes
/// there; a boundary item goes to a ≺-maximal collection it touches (ties:
/// lowest cell index), which it only leaves through good facets.
inline CollectionPartition merge_collections(const Grid& g, const std::vector<Placement>& items, const AlphaTable& a) {
  g.validate();
  if (g.dim() != a.d) throw std::invalid_argument("merge_collections: dimension mismatch");
  CollectionPartition P;
  P.grid = g;
  P.items = items;
  const std::size_t d = g.dim();
  const auto cells = cells_of(g);
  P.cell_s_hat.assign(cells.size(), Scalar(0));
  P.touched.resize(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    const Cuboid r = items[i].region();
    if (r.dim() != d) throw std::invalid_argument("merge_collections: item dimension mismatch");
    Scalar covered = 0;
    for (std::size_t c = 0; c < cells.size(); ++c)
      if (auto x = r.intersection(cells[c])) {
        covered += x->volume();
        P.touched[i].push_back(c);
        P.cell_s_hat[c] = std::max(P.cell_s_hat[c], items[i].item.side);
      }
    if (covered != r.volume())
      throw std::invalid_argument("merge_collections: item " + std::to_string(items[i].item.id) + " leaves the grid");
  }

  std::vector<std::size_t> owner(cells.size());
  P.collections.reserve(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    Collection col;
    col.cells = {c};
    col.s_hat = P.cell_s_hat[c];
    col.k = classify_cell(cells[c], col.s_hat, a);
    const auto sigma = sigma_of(cells[c]);
    col.long_dims.assign(sigma.begin(), sigma.begin() + static_cast<long>(col.k));
    owner[c] = P.collections.size();
    P.collections.push_back(std::move(col));
  }
  std::vector<bool> alive(P.collections.size(), true);

  std::vector<std::size_t> order(items.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return items[x].item.id < items[y].item.id; });
  std::vector<std::vector<std::tuple<std::size_t, std::size_t, std::size_t>>> pairs(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) pairs[i] = detail::adjacent_pairs(g, P.touched[i]);

  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i : order)
      for (const auto& [x, y, dim] : pairs[i]) {
        const std::size_t C = owner[x], D = owner[y];
        if (C == D) continue;
        const Collection& cc = P.collections[C];
        const Collection& dc = P.collections[D];
        if (detail::is_long(cc, dim) || detail::is_long(dc, dim)) continue;
        Collection m;
        m.cells = cc.cells;
        m.cells.insert(m.cells.end(), dc.cells.begin(), dc.cells.end());
        std::sort(m.cells.begin(), m.cells.end());
        m.k = std::min(cc.k, dc.k);
        m.s_hat = std::max(cc.s_hat, dc.s_hat);
        const auto sigma = sigma_of(cells[m.cells.front()]);
        m.long_dims.assign(sigma.begin(), sigma.begin() + static_cast<long>(m.k));
        if (auto why = check_collection(g, m, P.cell_s_hat, a))
          throw std::logic_error("merge_collections: merged collections do not form a collection: " + *why);
        P.collections[C] = std::move(m);
        alive[D] = false;
        for (std::size_t c : P.collections[C].cells) owner[c] = C;
        ++P.merges;
        changed = true;
      }
  }

  // Compact.
  std::vector<std::size_t> remap(P.collections.size(), 0);
  std::vector<Collection> kept;
  for (std::size_t c = 0; c < P.collections.size(); ++c)
    if (alive[c]) {
      remap[c] = kept.size();
      kept.push_back(std::move(P.collections[c]));
    }
  P.collections = std::move(kept);
  for (auto& o : owner) o = remap[o];
  for (const auto& col : P.collections)
    if (auto why = check_collection(g, col, P.cell_s_hat, a))
      throw std::logic_error("merge_collections: " + *why);

  P.assignment.assign(items.size(), 0);
  for (std::size_t i = 0; i < items.size(); ++i) {
    std::vector<std::size_t> H;
    for (std::size_t c : P.touched[i]) H.push_back(owner[c]);
    std::sort(H.begin(), H.end());
    H.erase(std::unique(H.begin(), H.end()), H.end());
    if (H.size() > 1) ++P.boundary_items;
    std::size_t best = H.front();  // collections are ordered by their lowest cell
    auto key = long_sides(g, P.collections[best]);
    for (std::size_t h : H) {
      auto kh = long_sides(g, P.collections[h]);
      if (key < kh) {
        best = h;
        key = std::move(kh);
      }
    }
    for (const auto& [x, y, dim] : pairs[i]) {
      const bool in_x = owner[x] == best, in_y = owner[y] == best;
      if (in_x != in_y && !detail::is_long(P.collections[best], dim))
        throw std::logic_error("merge_collections: item " + std::to_string(items[i].item.id) +
                               " crosses a bad outer facet of its collection");
    }
    P.assignment[i] = best;
  }
  return P;
}

// ---------------------------------------------------------------- repacking

struct RepackResult {
  std::vector<BoxSpec> boxes;
  std::vector<Placement> placements;  // every kept item
  std::vector<Placement> loose;       // kept items outside boxes
  std::vector<Item> discarded;
  Scalar input_profit = 0;
  Scalar loss = 0;
  std::vector<BoundCheck> bounds;
  std::size_t max_depth = 0;
  bool depth_truncated = false;

  void absorb(RepackResult&& o) {
    for (auto& b : o.boxes) boxes.push_back(std::move(b));
    for (auto& p : o.placements) placements.push_back(std::move(p));
    for (auto& p : o.loose) loose.push_back(std::move(p));
    for (auto& x : o.discarded) discarded.push_back(std::move(x));
    for (auto& b : o.bounds) bounds.push_back(std::move(b));
    loss += o.loss;
    max_depth = std::max(max_depth, o.max_depth);
    depth_truncated = depth_truncated || o.depth_truncated;
  }
};

namespace detail {

inline Scalar profit_of(const std::vector<Placement>& ps) {
  Scalar p = 0;
  for (const auto& x : ps) p += x.item.profit;
  return p;
}

inline Scalar max_side_of(const std::vector<Placement>& ps) {
  Scalar m = 0;
  for (const auto& x : ps) m = std::max(m, x.item.side);
  return m;
}

/// Splits [lo, lo + len) into `count` equal slices along `dim` and returns
/// the indices of items fully inside the slice with least such profit
/// (ties: lowest slice).
inline std::vector<std::size_t> cheapest_slice(const std::vector<Placement>& ps, std::size_t dim, const Scalar& lo,
                                               const Scalar& len, unsigned long count) {
  const Scalar w = len / Scalar(count);
  std::vector<Scalar> profit(count, Scalar(0));
  std::vector<std::vector<std::size_t>> members(count);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const Scalar a = ps[i].pos[dim] - lo;
    const Scalar b = a + ps[i].item.side;
    if (a < 0 || b > len) continue;
    BigInt j = floor_int(a / w);
    if (j >= BigInt(count)) continue;
    const unsigned long jj = to_ulong(j);
    if (b <= w * Scalar(jj + 1)) {
      profit[jj] += ps[i].item.profit;
      members[jj].push_back(i);
    }
  }
  std::size_t best = 0;
  for (std::size_t j = 1; j < count; ++j)
    if (profit[j] < profit[best]) best = j;
  return members[best];
}

inline void discard(RepackResult& r, const std::vector<Placement>& ps, const std::vector<bool>& gone) {
  for (std::size_t i = 0; i < ps.size(); ++i)
    if (gone[i]) {
      r.discarded.push_back(ps[i].item);
      r.loss += ps[i].item.profit;
    }
}

inline std::vector<Item> items_of(const std::vector<Placement>& ps) {
  std::vector<Item> out;
  for (const auto& p : ps) out.push_back(p.item);
  return out;
}

}  // namespace detail

/// Single d-elongated cell: per dimension clear the cheapest of ⌊1/(2 eps)⌋
/// slices, then the survivors go into one V-Box whose sides are the cell's
/// rounded down to multiples of s_hat.
inline RepackResult repack_d_elongated(const Cuboid& cell, const std::vector<Placement>& items, const Scalar& eps) {
  RepackResult r;
  r.input_profit = detail::profit_of(items);
  if (items.empty()) return r;
  const std::size_t d = cell.dim();
  if (!(eps > 0 && eps <= frac(1, 3) && eps <= pow(Scalar(1, 2), d)))
    throw std::invalid_argument("repack_d_elongated: epsilon must lie in (0, min(1/3, 1/2^d)]");
  const Scalar s = detail::max_side_of(items);
  for (std::size_t i = 0; i < d; ++i)
    if (!(cell.side(i) > Scalar(static_cast<long>(2 * d)) / eps * s))
      throw std::invalid_argument("repack_d_elongated: cell is not d-elongated for its items");

  const unsigned long slices = to_ulong(floor_int(1 / (2 * eps)));
  std::vector<bool> gone(items.size(), false);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j : detail::cheapest_slice(items, i, cell.lower(i), cell.side(i), slices)) gone[j] = true;
  detail::discard(r, items, gone);
  std::vector<Item> keep;
  for (std::size_t i = 0; i < items.size(); ++i)
    if (!gone[i]) keep.push_back(items[i].item);

  std::vector<Scalar> sides;
  for (std::size_t i = 0; i < d; ++i) sides.push_back(round_down_to(cell.side(i), s));
  BoxSpec box = make_box(BoxKind::V, Cuboid(cell.lower(), sides), s, "d-elongated");
  require_bound(r.bounds, "d-elongated: survivors fit the V-Box budget", total_volume(keep, d),
                capacity(box).volume_budget);
  require_bound(r.bounds, "d-elongated: loss <= 6 d eps p(Q)", r.loss,
                Scalar(static_cast<long>(6 * d)) * eps * r.input_profit);
  if (!keep.empty()) {
    Packing p = pack_box(box, keep);
    r.placements = p.placements;
    r.boxes.push_back(std::move(box));
  }
  return r;
}

/// k-elongated collection, 1 <= k < d: shrink by clearing a slice along the
/// height (the first long dimension) and one along each other long dimension,
/// then strip-pack the rest on the collection's own base and map back.
inline RepackResult repack_k_elongated(const Grid& g, const Collection& coll, const std::vector<Placement>& items,
                                       const AlphaTable& a, const EnumOptions& opt = {}) {
  RepackResult r;
  r.input_profit = detail::profit_of(items);
  const std::size_t d = g.dim(), k = coll.k;
  if (!(k >= 1 && k < d)) throw std::invalid_argument("repack_k_elongated: need 1 <= k < d");
  const Scalar& eps = a.epsilon;
  if (!(eps < pow(Scalar(1, 2), d + 2))) throw std::invalid_argument("repack_k_elongated: epsilon must be below 1/2^(d+2)");
  if (items.empty()) return r;

  const Cuboid first = g.cell(g.cells[coll.cells.front()]);
  const std::size_t height = coll.long_dims.front();
  std::vector<std::size_t> others(coll.long_dims.begin() + 1, coll.long_dims.end());
  std::sort(others.begin(), others.end());
  std::vector<std::size_t> shorts;
  for (std::size_t i = 0; i < d; ++i)
    if (!detail::is_long(coll, i)) shorts.push_back(i);

  const unsigned long two_k = 1UL << (k - 1);
  const long c = 4 + static_cast<long>(std::max(3UL, two_k));
  std::vector<bool> gone(items.size(), false);
  const unsigned long n_h = to_ulong(floor_int(1 / (Scalar(c) * eps)));
  for (std::size_t j : detail::cheapest_slice(items, height, first.lower(height), first.side(height), n_h)) gone[j] = true;
  const unsigned long n_o = to_ulong(ceil_int(1 / eps));
  for (std::size_t dim : others)
    for (std::size_t j : detail::cheapest_slice(items, dim, first.lower(dim), first.side(dim), n_o)) gone[j] = true;
  detail::discard(r, items, gone);
  const Scalar bound = Scalar(static_cast<long>(k + 7 + std::max(6UL, 2 * two_k))) * eps;
  require_bound(r.bounds, "k-elongated: loss <= (k+7+max(6,2^k)) eps p(Q)", r.loss, bound * r.input_profit);
  std::vector<Item> keep;
  for (std::size_t i = 0; i < items.size(); ++i)
    if (!gone[i]) keep.push_back(items[i].item);
  if (keep.empty()) return r;

  StripInstance in;
  in.d = d;
  in.k = k;
  for (std::size_t i : shorts) in.A.boundaries.push_back(g.boundaries[i]);
  for (std::size_t ci : coll.cells) {
    CellIndex p;
    for (std::size_t i : shorts) p.push_back(g.cells[ci][i]);
    in.A.cells.push_back(p);
  }
  std::sort(in.A.cells.begin(), in.A.cells.end());
  if (std::adjacent_find(in.A.cells.begin(), in.A.cells.end()) != in.A.cells.end())
    throw std::logic_error("repack_k_elongated: two cells share a short projection");
  const Scalar s_c = coll.s_hat;
  for (std::size_t dim : others) in.B.push_back(first.side(dim) - s_c);
  in.items = keep;
  in.epsilon = eps;
  in.N = to_ulong(a.N);
  // Prefer s_hat(C); fall back to the items' own maximum when an s_hat(C)
  // cube does not fit on the base.
  const Scalar s_q = detail::max_side_of(items);
  detail::WitnessSearch ws(in.A, 1);
  const Scalar s_strip = ws.first_fit(s_c, {}, nullptr) ? s_c : s_q;
  in.s_hat = s_strip;
  Scalar alpha = a.exact(k + 1);
  for (const auto& cell : cells_of(in.A))
    for (std::size_t i = 0; i < cell.dim(); ++i) alpha = std::max(alpha, Scalar(cell.side(i) / s_strip));
  in.alpha = alpha;

  StripResult sr = strip_pack(in, opt);
  for (auto& b : sr.bounds) r.bounds.push_back(std::move(b));
  // Each configuration is a count vector in [0, max_count]^sizes. A desk table's
  // C_configs is a caller-chosen constant rather than this bound, so it is only
  // compared when the table was derived from the formula.
  const Scalar n_cfg(static_cast<unsigned long>(sr.n_configs()));
  require_bound(r.bounds, "k-elongated: configurations <= (max_count + 1)^sizes", n_cfg,
                pow(Scalar(sr.configs.max_count + 1), sr.classes.size()));
  if (!a.desk && !(Magnitude(n_cfg) <= a.c_configs.at(k - 1)))
    throw std::logic_error("repack_k_elongated: more configurations than C_configs");
  const Scalar h = first.side(height);
  require_bound(r.bounds, "k-elongated: strip height fits the collection", sr.h_total, h);

  // Strip coordinates: shorts, others, height.
  std::vector<std::size_t> to_global = shorts;
  to_global.insert(to_global.end(), others.begin(), others.end());
  to_global.push_back(height);
  auto map_point = [&](const Point& p) {
    Point q(d);
    for (std::size_t i = 0; i < d; ++i) {
      const std::size_t gdim = to_global[i];
      q[gdim] = i < shorts.size() ? p[i] : Scalar(first.lower(gdim) + p[i]);
    }
    return q;
  };
  auto map_cuboid = [&](const Cuboid& c0) {
    std::vector<Scalar> s(d);
    for (std::size_t i = 0; i < d; ++i) s[to_global[i]] = c0.side(i);
    return Cuboid(map_point(c0.lower()), s);
  };
  for (const auto& p : sr.packing.placements) r.placements.push_back(Placement{p.item, map_point(p.pos)});
  for (const auto& b : sr.boxes) {
    BoxSpec nb = make_box(b.kind, map_cuboid(b.shell), b.s_hat, "k-elongated/" + b.tag);
    r.boxes.push_back(std::move(nb));
  }
  return r;
}

struct StructureOptions {
  std::optional<unsigned long> depth_cap;  // default min(full cap, 6)
  EnumOptions strip;

  unsigned long cap(const Scalar& eps) const { return depth_cap ? *depth_cap : std::min(full_depth_cap(eps), 6UL); }
};

struct RhoPrimeTable {
  std::vector<Magnitude> rho_prime;  // rho'_0 .. rho'_eta
  std::size_t eta = 1;
  Scalar s_hat;

  Magnitude rho(std::size_t i) const { return rho_prime.at(i) * Magnitude(s_hat); }
};

/// Smallest eta >= 1 whose band (rho_eta, rho_{eta-1}) holds at most eps of the profit.
inline RhoPrimeTable rho_prime_table(const std::vector<Placement>& items, const AlphaTable& a) {
  RhoPrimeTable t;
  t.s_hat = detail::max_side_of(items);
  if (!(t.s_hat > 0)) throw std::invalid_argument("rho_prime_table: no items");
  const Scalar p = detail::profit_of(items);
  const unsigned long cap = to_ulong(ceil_int(1 / a.epsilon));
  t.rho_prime.push_back(Magnitude(1));
  for (std::size_t i = 1;; ++i) {
    t.rho_prime.push_back(rho_prime_next(t.rho_prime.back(), a.d, a.N, a.at(1)));
    const Magnitude lo = t.rho(i), hi = t.rho(i - 1);
    Scalar band = 0;
    for (const auto& x : items) {
      const Magnitude s(x.item.side);
      if (s > lo && s < hi) band += x.item.profit;
    }
    if (band <= a.epsilon * p) {
      t.eta = i;
      return t;
    }
    if (i >= cap) throw std::logic_error("rho_prime_table: no light band within ⌈1/eps⌉ steps");
  }
}

inline RepackResult structure_grid(const Grid& g, const std::vector<Placement>& items, const AlphaTable& a,
                                   std::size_t depth, const StructureOptions& opt,
                                   std::size_t* collections_out = nullptr);

namespace detail {

inline Grid sub_grid(const Grid& g, const Collection& c) {
  Grid out{g.boundaries, {}};
  for (std::size_t i : c.cells) out.cells.push_back(g.cells[i]);
  std::sort(out.cells.begin(), out.cells.end());
  return out;
}

}  // namespace detail

/// 0-elongated collection. Items must lie inside the collection.
inline RepackResult repack_0_elongated(const Grid& g, const Collection& coll, const std::vector<Placement>& items,
                                       const AlphaTable& a, std::size_t depth, const StructureOptions& opt = {}) {
  RepackResult r;
  r.input_profit = detail::profit_of(items);
  r.max_depth = depth;
  if (items.empty()) return r;
  const std::size_t d = g.dim();
  const Scalar& eps = a.epsilon;
  const Grid cg = detail::sub_grid(g, coll);
  const auto cells = cells_of(cg);
  for (const auto& x : items) {
    Scalar v = 0;
    for (const auto& c : cells)
      if (auto i = x.region().intersection(c)) v += i->volume();
    if (v != x.region().volume()) throw std::invalid_argument("repack_0_elongated: an item is not inside the collection");
  }
  const unsigned long cap = opt.cap(eps);
  if (depth >= cap) {
    if (cap < full_depth_cap(eps)) {
      // Early stop below the proven depth: keep everything where it is.
      r.depth_truncated = true;
      r.placements = items;
      r.loose = items;
    } else {
      std::vector<bool> all(items.size(), true);
      detail::discard(r, items, all);
    }
    return r;
  }

  const RhoPrimeTable t = rho_prime_table(items, a);
  const Magnitude rho_eta = t.rho(t.eta), rho_prev = t.rho(t.eta - 1);
  std::vector<Placement> L, M, S;
  for (const auto& x : items) {
    const Magnitude s(x.item.side);
    if (s >= rho_prev) L.push_back(x);
    else if (s > rho_eta) M.push_back(x);
    else S.push_back(x);
  }
  if (L.empty()) throw std::logic_error("repack_0_elongated: no large item");
  const Scalar p = r.input_profit;
  const std::size_t cheap = static_cast<std::size_t>(
      std::min_element(L.begin(), L.end(), [](const Placement& x, const Placement& y) {
        if (x.item.profit != y.item.profit) return x.item.profit < y.item.profit;
        return x.item.id < y.item.id;
      }) - L.begin());

  std::vector<Cuboid> large_regions;
  for (const auto& x : L) large_regions.push_back(x.region());

  if (L[cheap].item.profit <= eps * p) {
    // Low-profit case: drop the medium items and the cheapest large item.
    for (const auto& x : M) {
      r.discarded.push_back(x.item);
      r.loss += x.item.profit;
    }
    r.discarded.push_back(L[cheap].item);
    r.loss += L[cheap].item.profit;
    for (std::size_t i = 0; i < L.size(); ++i)
      if (i != cheap) {
        r.placements.push_back(L[i]);
        r.loose.push_back(L[i]);
      }
    require_bound(r.bounds, "0-elongated low profit: loss <= 2 eps p(Q)", r.loss, 2 * eps * p);
    if (!S.empty()) {
      std::vector<Item> small = detail::items_of(S);
      sort_by_side_desc(small);
      const Scalar sc = small.front().side;
      const Grid free = split_grid(cg, large_regions);
      std::size_t next = 0;
      auto fill = [&](const Cuboid& c, bool last) {
        std::vector<Scalar> sides;
        for (std::size_t i = 0; i < d; ++i) sides.push_back(round_down_to(c.side(i), sc));
        if (std::any_of(sides.begin(), sides.end(), [](const Scalar& v) { return v == 0; })) return;
        BoxSpec box = make_box(BoxKind::V, Cuboid(c.lower(), sides), sc, "0-elongated");
        const Scalar budget = capacity(box).volume_budget;
        std::vector<Item> chunk;
        Scalar vol = 0;
        if (last) {
          chunk.assign(small.begin() + static_cast<long>(next), small.end());
          vol = total_volume(chunk, d);
          next = small.size();
          require_bound(r.bounds, "0-elongated low profit: remaining small items fit the freed large item", vol, budget);
        } else {
          while (next < small.size() && vol + item_volume(small[next], d) <= budget) {
            vol += item_volume(small[next], d);
            chunk.push_back(small[next++]);
          }
        }
        if (chunk.empty()) return;
        Packing pk = pack_box(box, chunk);
        r.placements.insert(r.placements.end(), pk.placements.begin(), pk.placements.end());
        r.boxes.push_back(std::move(box));
      };
      for (const auto& c : cells_of(free)) {
        if (next == small.size()) break;
        fill(c, false);
      }
      if (next < small.size()) fill(L[cheap].region(), true);
      if (next < small.size()) throw BoundViolation("0-elongated low profit: small items left over");
    }
  } else {
    // High-profit case: keep the large items, recurse on the space around them.
    for (const auto& x : L) {
      r.placements.push_back(x);
      r.loose.push_back(x);
    }
    std::vector<Placement> rest = M;
    rest.insert(rest.end(), S.begin(), S.end());
    if (!rest.empty()) {
      const Grid sub = split_grid(cg, large_regions);
      r.absorb(structure_grid(sub, rest, a, depth + 1, opt));
    }
  }
  if (depth == 0) {
    const long f = std::max({6L * static_cast<long>(d) + 1, static_cast<long>(d) + 13,
                             static_cast<long>(d) + 7 + (1L << (d - 1))});
    require_bound(r.bounds, "0-elongated: loss <= max(6d+1, d+13, d+7+2^(d-1)) eps p(Q)", r.loss, Scalar(f) * eps * p);
  }
  return r;
}

/// Classify, merge and assign on a grid, then repack every collection.
inline RepackResult structure_grid(const Grid& g, const std::vector<Placement>& items, const AlphaTable& a,
                                   std::size_t depth, const StructureOptions& opt, std::size_t* collections_out) {
  RepackResult r;
  r.input_profit = detail::profit_of(items);
  r.max_depth = depth;
  const CollectionPartition P = merge_collections(g, items, a);
  if (collections_out) *collections_out = P.collections.size();
  std::vector<std::vector<Placement>> per(P.collections.size());
  for (std::size_t i = 0; i < items.size(); ++i) per[P.assignment[i]].push_back(items[i]);
  for (std::size_t c = 0; c < P.collections.size(); ++c) {
    const Collection& col = P.collections[c];
    if (per[c].empty()) continue;
    if (col.k == g.dim()) {
      r.absorb(repack_d_elongated(g.cell(g.cells[col.cells.front()]), per[c], a.epsilon));
    } else if (col.k >= 1) {
      r.absorb(repack_k_elongated(g, col, per[c], a, opt.strip));
    } else {
      r.absorb(repack_0_elongated(g, col, per[c], a, depth, opt));
    }
  }
  return r;
}

struct StructuredPacking {
  Packing packing;  // every kept item inside the unit cube
  std::vector<BoxSpec> boxes;
  std::vector<Placement> loose;
  std::vector<Item> discarded;
  Scalar input_profit = 0;
  Scalar retained_profit = 0;
  std::size_t top_collections = 0;
  std::size_t max_depth = 0;
  bool depth_truncated = false;
  std::vector<BoundCheck> bounds;
  std::vector<MagnitudeCheck> count_checks;
};

/// Full pipeline on a packing of the unit cube, treated as a one-cell grid.
inline StructuredPacking transform(const Packing& in, const AlphaTable& a, const StructureOptions& opt = {}) {
  const std::size_t d = in.container.dim();
  if (d != a.d) throw std::invalid_argument("transform: dimension mismatch");
  if (!(in.container == Cuboid::unit(d))) throw std::invalid_argument("transform: container must be the unit cube");
  if (!(a.epsilon < pow(Scalar(1, 2), d + 2))) throw std::invalid_argument("transform: epsilon must be below 1/2^(d+2)");
  if (auto chk = verify_packing(in); !chk.ok()) throw std::invalid_argument("transform: input packing is invalid");

  StructuredPacking out;
  out.input_profit = in.profit();
  RepackResult r = structure_grid(Grid::single(in.container), in.placements, a, 0, opt, &out.top_collections);
  out.packing = Packing{in.container, r.placements};
  out.boxes = std::move(r.boxes);
  out.loose = std::move(r.loose);
  out.discarded = std::move(r.discarded);
  out.retained_profit = out.packing.profit();
  out.max_depth = r.max_depth;
  out.depth_truncated = r.depth_truncated;
  out.bounds = std::move(r.bounds);
  if (out.retained_profit + total_profit(out.discarded) != out.input_profit)
    throw std::logic_error("transform: profit accounting is off");
  if (auto chk = verify_packing(out.packing); !chk.ok()) throw std::logic_error("transform: output packing is invalid");
  require_bound(out.bounds, "transform: loss <= 2^(d+2) eps p(I)", out.input_profit - out.retained_profit,
                pow(Scalar(2), d + 2) * a.epsilon * out.input_profit);
  // The count bounds are proven for the full constants only; desk tables record them.
  const ConstantsReport cr = constants_for(a);
  const bool boxes_ok = out.boxes.empty() || detail::mag(out.boxes.size()) <= cr.c_boxes;
  const bool loose_ok = out.loose.empty() || detail::mag(out.loose.size()) <= cr.c_large;
  out.count_checks.push_back({"boxes <= C_boxes", boxes_ok});
  out.count_checks.push_back({"loose items <= C_large", loose_ok});
  if (!a.desk && !(boxes_ok && loose_ok)) throw BoundViolation("transform: box or loose-item count above its bound");
  return out;
}

}  // namespace hcpack
