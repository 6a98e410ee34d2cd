#pragma once

// Knapsack solvers: an exact brute-force oracle for tiny instances, the GAP
// step that fills boxes, a budgeted structured solver (loose items plus boxes),
// and a greedy baseline.

#include "hcpack/boxes.hpp"
#include "hcpack/gen.hpp"
#include "hcpack/lp.hpp"
#include "hcpack/nfdh.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace hcpack {

namespace detail {

inline void check_instance(const KnapsackInstance& inst) {
  if (inst.d < 1) throw std::invalid_argument("instance: d must be positive");
  for (const auto& it : inst.items) {
    if (!(it.side > 0 && it.side <= 1)) throw std::invalid_argument("instance: item sides must lie in (0,1]");
    if (it.profit < 0) throw std::invalid_argument("instance: profits must be non-negative");
  }
}

// All subset sums of `xs`, deduplicated, at most `cap`.
inline std::vector<Scalar> subset_sums(const std::vector<Scalar>& xs, const Scalar& cap) {
  std::set<Scalar> sums{Scalar(0)};
  for (const auto& x : xs) {
    std::vector<Scalar> next;
    for (const auto& s : sums)
      if (s + x <= cap) next.push_back(s + x);
    sums.insert(next.begin(), next.end());
  }
  return {sums.begin(), sums.end()};
}

// Exhaustive placement of axis-aligned boxes into [0,1]^d. Every packing can
// be pushed towards the origin until each coordinate is a sum of other
// objects' sides, so anchoring at those sums is complete.
class Arranger {
 public:
  Arranger(std::vector<std::vector<Scalar>> sides, long node_limit)
      : sides_(std::move(sides)), nodes_left_(node_limit) {
    n_ = sides_.size();
    d_ = n_ ? sides_[0].size() : 0;
    order_.resize(n_);
    std::iota(order_.begin(), order_.end(), 0);
    auto vol = [&](std::size_t i) {
      Scalar v = 1;
      for (const auto& s : sides_[i]) v *= s;
      return v;
    };
    std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
      if (vol(a) != vol(b)) return vol(a) > vol(b);
      return sides_[a] > sides_[b];
    });
    anchors_.assign(n_, std::vector<std::vector<Scalar>>(d_));
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t k = 0; k < d_; ++k) {
        std::vector<Scalar> others;
        for (std::size_t j = 0; j < n_; ++j)
          if (j != i) others.push_back(sides_[j][k]);
        anchors_[i][k] = subset_sums(others, 1 - sides_[i][k]);
      }
  }

  std::optional<std::vector<Point>> run() {
    for (const auto& s : sides_)
      for (const auto& x : s)
        if (!(x > 0 && x <= 1)) return std::nullopt;
    pos_.assign(n_, Point());
    if (!place(0)) return std::nullopt;
    return pos_;
  }
  bool aborted() const { return aborted_; }

 private:
  bool overlaps(std::size_t a, const Point& p, std::size_t b) const {
    for (std::size_t k = 0; k < d_; ++k)
      if (!(p[k] < pos_[b][k] + sides_[b][k] && pos_[b][k] < p[k] + sides_[a][k])) return false;
    return true;
  }

  bool place(std::size_t t) {
    if (t == n_) return true;
    if (nodes_left_-- <= 0) {
      aborted_ = true;
      return false;
    }
    const std::size_t i = order_[t];
    const bool twin = t > 0 && sides_[order_[t - 1]] == sides_[i];
    std::vector<std::size_t> idx(d_, 0);
    Point p(d_);
    for (;;) {
      for (std::size_t k = 0; k < d_; ++k) p[k] = anchors_[i][k][idx[k]];
      bool ok = !twin || pos_[order_[t - 1]] < p;  // identical objects in increasing order
      for (std::size_t u = 0; u < t && ok; ++u) ok = !overlaps(i, p, order_[u]);
      if (ok) {
        pos_[i] = p;
        if (place(t + 1)) return true;
        if (aborted_) return false;
      }
      std::size_t k = d_;
      while (k-- > 0) {
        if (++idx[k] < anchors_[i][k].size()) break;
        idx[k] = 0;
      }
      if (k == static_cast<std::size_t>(-1)) return false;
    }
  }

  std::vector<std::vector<Scalar>> sides_;
  long nodes_left_;
  std::size_t n_ = 0, d_ = 0;
  std::vector<std::size_t> order_;
  std::vector<std::vector<std::vector<Scalar>>> anchors_;
  std::vector<Point> pos_;
  bool aborted_ = false;
};

// Hypercubes of the given sides in [0,1]^d, searched independently of Arranger.
inline std::optional<std::vector<Point>> cubes_fit(const std::vector<Scalar>& sides, std::size_t d) {
  const std::size_t n = sides.size();
  Scalar vol = 0;
  for (const auto& s : sides) vol += pow(s, d);
  if (vol > 1) return std::nullopt;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (sides[i] + sides[j] > 1) return std::nullopt;  // no axis separates them
  std::vector<std::size_t> ord(n);
  std::iota(ord.begin(), ord.end(), 0);
  std::stable_sort(ord.begin(), ord.end(), [&](std::size_t a, std::size_t b) { return sides[a] > sides[b]; });
  std::vector<std::vector<Scalar>> anchors(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Scalar> others;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) others.push_back(sides[j]);
    anchors[i] = subset_sums(others, 1 - sides[i]);
  }
  std::vector<Point> pos(n);
  auto clash = [&](std::size_t a, const Point& p, std::size_t b) {
    for (std::size_t k = 0; k < d; ++k)
      if (p[k] >= pos[b][k] + sides[b] || pos[b][k] >= p[k] + sides[a]) return false;
    return true;
  };
  auto rec = [&](auto&& self, std::size_t t) -> bool {
    if (t == n) return true;
    const std::size_t i = ord[t];
    const auto& A = anchors[i];
    std::vector<std::size_t> idx(d, 0);
    for (;;) {
      Point p(d);
      for (std::size_t k = 0; k < d; ++k) p[k] = A[idx[k]];
      bool ok = !(t > 0 && sides[ord[t - 1]] == sides[i]) || pos[ord[t - 1]] < p;
      for (std::size_t u = 0; u < t && ok; ++u) ok = !clash(i, p, ord[u]);
      if (ok) {
        pos[i] = p;
        if (self(self, t + 1)) return true;
      }
      std::size_t k = d;
      while (k-- > 0) {
        if (++idx[k] < A.size()) break;
        idx[k] = 0;
      }
      if (k == static_cast<std::size_t>(-1)) return false;
    }
  };
  if (!rec(rec, 0)) return std::nullopt;
  return pos;
}

}  // namespace detail

// ---------------------------------------------------------------- oracle

struct OracleResult {
  Scalar profit = 0;
  Packing witness;
  unsigned long subsets_tested = 0;
};

/// Exact optimum: subsets in order of decreasing profit, the first one that
/// fits wins.
inline OracleResult oracle_opt(const KnapsackInstance& inst, std::size_t max_items = 7) {
  detail::check_instance(inst);
  const std::size_t n = inst.items.size(), d = inst.d;
  if (n > max_items) throw std::invalid_argument("oracle_opt: more than " + std::to_string(max_items) + " items");
  if (d > 3) throw std::invalid_argument("oracle_opt: d must be at most 3");
  if (n > 20) throw std::invalid_argument("oracle_opt: too many items to enumerate");
  std::vector<std::pair<Scalar, unsigned long>> masks;
  for (unsigned long m = 0; m < (1UL << n); ++m) {
    Scalar p = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (m >> i & 1UL) p += inst.items[i].profit;
    masks.emplace_back(p, m);
  }
  std::stable_sort(masks.begin(), masks.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    const int pa = __builtin_popcountl(a.second), pb = __builtin_popcountl(b.second);
    if (pa != pb) return pa < pb;
    return a.second < b.second;
  });
  OracleResult r;
  r.witness.container = Cuboid::unit(d);
  for (const auto& [p, m] : masks) {
    std::vector<Scalar> sides;
    std::vector<std::size_t> ids;
    for (std::size_t i = 0; i < n; ++i)
      if (m >> i & 1UL) {
        sides.push_back(inst.items[i].side);
        ids.push_back(i);
      }
    ++r.subsets_tested;
    if (auto pos = detail::cubes_fit(sides, d)) {
      r.profit = p;
      for (std::size_t j = 0; j < ids.size(); ++j) r.witness.placements.push_back(Placement{inst.items[ids[j]], (*pos)[j]});
      if (!verify_packing(r.witness).ok()) throw std::logic_error("oracle_opt: witness does not verify");
      return r;
    }
  }
  throw std::logic_error("oracle_opt: even the empty set failed");
}

// ---------------------------------------------------------------- GAP

/// Items against a fixed set of boxes. An item costs its volume in a V-Box,
/// one cell in an N-Box, and cannot go into a box whose size parameter it exceeds.
struct GapInstance {
  std::vector<BoxSpec> boxes;
  std::vector<Item> items;

  std::optional<Scalar> size(std::size_t i, std::size_t j) const {
    const BoxSpec& b = boxes[j];
    if (items[i].side > b.s_hat) return std::nullopt;
    if (b.kind == BoxKind::N) return Scalar(1);
    return item_volume(items[i], b.shell.dim());
  }
  Scalar capacity_of(std::size_t j) const {
    BoxCapacity c = capacity(boxes[j]);
    return c.kind == BoxKind::V ? c.volume_budget : Scalar(c.count);
  }
};

struct GapOptions {
  std::size_t max_boxes = 8;
  std::size_t exact_items = 20;        // exact branch and bound up to this many items
  unsigned long node_budget = 2000000;
  std::size_t lp_items = 60;           // LP rounding up to this many items, greedy beyond
};

struct GapResult {
  std::vector<std::optional<std::size_t>> assignment;  // per item
  Scalar profit = 0;
  bool exact = true;
  bool budget_hit = false;
  std::optional<Scalar> upper_bound;  // set when not exact
  std::string method;

  std::vector<std::vector<Item>> per_box(const GapInstance& g) const {
    std::vector<std::vector<Item>> out(g.boxes.size());
    for (std::size_t i = 0; i < assignment.size(); ++i)
      if (assignment[i]) out[*assignment[i]].push_back(g.items[i]);
    return out;
  }
};

namespace detail {

inline void gap_greedy_fill(const GapInstance& g, std::vector<Scalar>& left, GapResult& r) {
  std::vector<std::size_t> ord(g.items.size());
  std::iota(ord.begin(), ord.end(), 0);
  std::stable_sort(ord.begin(), ord.end(), [&](std::size_t a, std::size_t b) {
    const Scalar da = g.items[a].profit / pow(g.items[a].side, g.boxes.empty() ? 1 : g.boxes[0].shell.dim());
    const Scalar db = g.items[b].profit / pow(g.items[b].side, g.boxes.empty() ? 1 : g.boxes[0].shell.dim());
    return da > db;
  });
  for (std::size_t i : ord) {
    if (r.assignment[i]) continue;
    for (std::size_t j = 0; j < g.boxes.size(); ++j) {
      auto s = g.size(i, j);
      if (s && *s <= left[j]) {
        left[j] -= *s;
        r.assignment[i] = j;
        r.profit += g.items[i].profit;
        break;
      }
    }
  }
}

}  // namespace detail

inline GapResult gap_solve(const GapInstance& g, const GapOptions& opt = {}) {
  const std::size_t n = g.items.size(), K = g.boxes.size();
  if (K > opt.max_boxes) throw std::invalid_argument("gap_solve: more than " + std::to_string(opt.max_boxes) + " boxes");
  GapResult r;
  r.assignment.assign(n, std::nullopt);
  if (K == 0 || n == 0) {
    r.method = "trivial";
    return r;
  }
  std::vector<Scalar> cap(K);
  for (std::size_t j = 0; j < K; ++j) cap[j] = g.capacity_of(j);

  if (n <= opt.exact_items) {
    r.method = "branch-and-bound";
    std::vector<std::size_t> ord;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < K; ++j)
        if (auto s = g.size(i, j); s && *s <= cap[j]) {
          ord.push_back(i);
          break;
        }
    std::stable_sort(ord.begin(), ord.end(), [&](std::size_t a, std::size_t b) {
      return g.items[a].profit > g.items[b].profit;
    });
    std::vector<Scalar> suffix(ord.size() + 1, Scalar(0));
    for (std::size_t t = ord.size(); t-- > 0;) suffix[t] = suffix[t + 1] + g.items[ord[t]].profit;
    std::vector<std::optional<std::size_t>> cur(n);
    std::vector<Scalar> left = cap;
    Scalar best = -1, now = 0;
    unsigned long nodes = 0;
    auto rec = [&](auto&& self, std::size_t t) -> void {
      if (now > best) {
        best = now;
        r.assignment = cur;
      }
      if (t == ord.size() || now + suffix[t] <= best) return;
      if (++nodes > opt.node_budget) {
        r.budget_hit = true;
        return;
      }
      const std::size_t i = ord[t];
      for (std::size_t j = 0; j < K && !r.budget_hit; ++j) {
        auto s = g.size(i, j);
        if (!s || *s > left[j]) continue;
        // Boxes with the same shape and remaining room are interchangeable.
        bool dup = false;
        for (std::size_t u = 0; u < j && !dup; ++u)
          dup = left[u] == left[j] && g.boxes[u].kind == g.boxes[j].kind && g.boxes[u].s_hat == g.boxes[j].s_hat &&
                g.boxes[u].shell.dim() == g.boxes[j].shell.dim();
        if (dup) continue;
        left[j] -= *s;
        cur[i] = j;
        now += g.items[i].profit;
        self(self, t + 1);
        now -= g.items[i].profit;
        cur[i].reset();
        left[j] += *s;
      }
      if (!r.budget_hit) self(self, t + 1);
    };
    rec(rec, 0);
    r.profit = std::max(best, Scalar(0));
    if (r.budget_hit) {
      r.exact = false;
      r.upper_bound = suffix[0];
    }
    return r;
  }

  r.exact = false;
  std::vector<Scalar> left = cap;
  if (n <= opt.lp_items) {
    // max p.x  s.t.  sum_i size_ij x_ij <= cap_j,  sum_j x_ij <= 1,  x >= 0
    r.method = "lp-rounding";
    std::vector<std::pair<std::size_t, std::size_t>> vars;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < K; ++j)
        if (auto s = g.size(i, j); s && *s <= cap[j]) vars.emplace_back(i, j);
    const std::size_t nv = vars.size(), m = K + n;
    std::vector<std::vector<Scalar>> A(m, std::vector<Scalar>(nv + m, Scalar(0)));
    std::vector<Scalar> b(m), c(nv + m, Scalar(0));
    for (std::size_t v = 0; v < nv; ++v) {
      const auto [i, j] = vars[v];
      A[j][v] = *g.size(i, j);
      A[K + i][v] = 1;
      c[v] = -g.items[i].profit;
    }
    for (std::size_t row = 0; row < m; ++row) {
      A[row][nv + row] = 1;
      b[row] = row < K ? std::max(cap[row], Scalar(0)) : Scalar(1);
    }
    LpResult lp = solve_lp(A, b, c);
    if (lp.status != LpResult::Status::Optimal) throw std::logic_error("gap_solve: LP relaxation failed");
    r.upper_bound = -lp.objective;
    for (std::size_t v = 0; v < nv; ++v)
      if (lp.x[v] == 1) {
        const auto [i, j] = vars[v];
        left[j] -= *g.size(i, j);
        r.assignment[i] = j;
        r.profit += g.items[i].profit;
      }
  } else {
    r.method = "greedy";
    Scalar ub = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < K; ++j)
        if (auto s = g.size(i, j); s && *s <= cap[j]) {
          ub += g.items[i].profit;
          break;
        }
    r.upper_bound = ub;
  }
  detail::gap_greedy_fill(g, left, r);
  return r;
}

// ---------------------------------------------------------------- greedy

struct GreedyResult {
  Packing packing;
  Scalar profit = 0;
};

/// Items by profit density, each kept if NFDH still packs the chosen set into the unit cube.
inline GreedyResult greedy_baseline(const KnapsackInstance& inst) {
  detail::check_instance(inst);
  const std::size_t d = inst.d;
  std::vector<Item> ord = inst.items;
  std::stable_sort(ord.begin(), ord.end(), [&](const Item& a, const Item& b) {
    const Scalar da = a.profit / pow(a.side, d), db = b.profit / pow(b.side, d);
    if (da != db) return da > db;
    return a.id < b.id;
  });
  GreedyResult r;
  r.packing.container = Cuboid::unit(d);
  std::vector<Item> chosen;
  Scalar vol = 0;
  for (const auto& it : ord) {
    if (vol + item_volume(it, d) > 1) continue;
    chosen.push_back(it);
    NfdhResult nr = nfdh_pack(chosen, Cuboid::unit(d));
    if (nr.all_packed()) {
      r.packing = nr.packed;
      vol += item_volume(it, d);
    } else {
      chosen.pop_back();
    }
  }
  r.profit = r.packing.profit();
  if (!verify_packing(r.packing).ok()) throw std::logic_error("greedy_baseline: invalid packing");
  return r;
}

// ---------------------------------------------------------------- structured solver

struct SolveBudgets {
  std::size_t max_large = 3;         // loose items per candidate
  std::size_t max_boxes = 1;         // boxes per candidate
  std::size_t max_side_choices = 3;  // box side lengths tried per dimension
  std::size_t max_sizes = 4;         // size parameters tried per loose set
  unsigned long max_candidates = 20000;
  long arrange_nodes = 50000;
  GapOptions gap;
};

struct Certificate {
  Scalar profit = 0;
  std::optional<Scalar> ratio_vs_oracle;
  SolveBudgets budgets;
  bool exhausted = false;  // a budget ran out before the enumeration finished
  std::string source;      // "greedy" or "enumeration"
  unsigned long candidates = 0;
  std::vector<std::string> assertions;
};

struct SolveResult {
  Packing packing;
  std::vector<BoxSpec> boxes;
  std::vector<Placement> loose;
  Certificate certificate;
};

namespace detail {

struct Shell {
  BoxKind kind;
  std::vector<Scalar> sides;
  bool operator<(const Shell& o) const {
    if (kind != o.kind) return kind < o.kind;
    return sides < o.sides;
  }
};

// Combinations of `k` indices out of `n`, lexicographic.
template <class F>
inline bool for_each_combination(std::size_t n, std::size_t k, F&& f) {
  std::vector<std::size_t> c(k);
  std::iota(c.begin(), c.end(), 0);
  if (k > n) return true;
  for (;;) {
    if (!f(c)) return false;
    std::size_t i = k;
    while (i-- > 0) {
      if (c[i] < n - k + i) break;
    }
    if (i == static_cast<std::size_t>(-1)) return true;
    ++c[i];
    for (std::size_t j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
  }
}

}  // namespace detail

/// Enumerates loose-item sets, size parameters and box shells within the
/// budgets; each arrangement that fits is filled by gap_solve and realized by
/// pack_box. The greedy baseline is always a candidate.
inline SolveResult structured_solve(const KnapsackInstance& inst, const SolveBudgets& bud = {}) {
  detail::check_instance(inst);
  const std::size_t d = inst.d, n = inst.items.size();
  SolveResult best;
  best.certificate.budgets = bud;
  {
    GreedyResult g = greedy_baseline(inst);
    best.packing = g.packing;
    best.loose = g.packing.placements;
    best.certificate.profit = g.profit;
    best.certificate.source = "greedy";
  }
  const Scalar greedy_profit = best.certificate.profit;
  Scalar total = total_profit(inst.items);

  // Items by profit, highest first, so good loose sets come early.
  std::vector<std::size_t> ord(n);
  std::iota(ord.begin(), ord.end(), 0);
  std::stable_sort(ord.begin(), ord.end(),
                   [&](std::size_t a, std::size_t b) { return inst.items[a].profit > inst.items[b].profit; });

  unsigned long& cands = best.certificate.candidates;
  bool stop = false;
  auto budget_ok = [&]() {
    if (cands >= bud.max_candidates) {
      best.certificate.exhausted = true;
      stop = true;
    }
    return !stop;
  };

  auto consider = [&](const std::vector<std::size_t>& L, const std::vector<std::vector<Scalar>>& objects,
                      const std::vector<detail::Shell>& shells, const Scalar& s_hat,
                      const std::vector<std::size_t>& rest) {
    ++cands;
    detail::Arranger ar(objects, bud.arrange_nodes);
    auto pos = ar.run();
    if (ar.aborted()) best.certificate.exhausted = true;
    if (!pos) return;
    std::vector<Placement> loose;
    Scalar p = 0;
    for (std::size_t t = 0; t < L.size(); ++t) {
      loose.push_back(Placement{inst.items[L[t]], (*pos)[t]});
      p += inst.items[L[t]].profit;
    }
    GapInstance g;
    for (std::size_t t = 0; t < shells.size(); ++t)
      g.boxes.push_back(make_box(shells[t].kind, Cuboid((*pos)[L.size() + t], shells[t].sides), s_hat));
    for (std::size_t i : rest) g.items.push_back(inst.items[i]);
    GapResult gr = gap_solve(g, bud.gap);
    if (gr.budget_hit) best.certificate.exhausted = true;
    if (!(p + gr.profit > best.certificate.profit)) return;
    Packing pk{Cuboid::unit(d), loose};
    std::vector<BoxSpec> used;
    const auto groups = gr.per_box(g);
    for (std::size_t j = 0; j < g.boxes.size(); ++j) {
      if (groups[j].empty()) continue;
      Packing bp = pack_box(g.boxes[j], groups[j]);
      pk.placements.insert(pk.placements.end(), bp.placements.begin(), bp.placements.end());
      used.push_back(g.boxes[j]);
    }
    best.packing = std::move(pk);
    best.boxes = std::move(used);
    best.loose = std::move(loose);
    best.certificate.profit = best.packing.profit();
    best.certificate.source = "enumeration";
  };

  for (std::size_t size = 0; size <= std::min(bud.max_large, n) && !stop; ++size) {
    detail::for_each_combination(n, size, [&](const std::vector<std::size_t>& comb) {
      if (!budget_ok()) return false;
      std::vector<std::size_t> L;
      std::vector<bool> in(n, false);
      Scalar pl = 0;
      for (std::size_t c : comb) {
        L.push_back(ord[c]);
        in[ord[c]] = true;
        pl += inst.items[ord[c]].profit;
      }
      if (pl + (total - pl) <= best.certificate.profit) return true;
      std::vector<std::vector<Scalar>> objects;
      std::vector<Scalar> lsides;
      for (std::size_t i : L) {
        objects.push_back(std::vector<Scalar>(d, inst.items[i].side));
        lsides.push_back(inst.items[i].side);
      }
      std::vector<std::size_t> rest;
      for (std::size_t i = 0; i < n; ++i)
        if (!in[i]) rest.push_back(i);
      // Loose items alone.
      if (pl > best.certificate.profit) consider(L, objects, {}, Scalar(1), {});
      if (rest.empty() || bud.max_boxes == 0) return budget_ok();

      std::vector<Scalar> sizes;
      for (std::size_t i : rest) sizes.push_back(inst.items[i].side);
      std::sort(sizes.begin(), sizes.end(), std::greater<>());
      sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
      if (sizes.size() > bud.max_sizes) sizes.resize(bud.max_sizes);
      const auto gaps = detail::subset_sums(lsides, Scalar(1));
      for (const Scalar& s : sizes) {
        Scalar reach = pl;
        std::vector<std::size_t> fit;
        for (std::size_t i : rest)
          if (inst.items[i].side <= s) {
            fit.push_back(i);
            reach += inst.items[i].profit;
          }
        if (reach <= best.certificate.profit) continue;
        // Side lengths: what is left of the unit after some loose items, rounded down.
        std::set<Scalar, std::greater<>> lens;
        for (const auto& gsum : gaps) {
          Scalar v = round_down_to(1 - gsum, s);
          if (v > 0) lens.insert(v);
        }
        std::vector<Scalar> len(lens.begin(), lens.end());
        if (len.size() > bud.max_side_choices) len.resize(bud.max_side_choices);
        std::vector<detail::Shell> shells;
        for (BoxKind kind : {BoxKind::V, BoxKind::N}) {
          std::vector<std::size_t> idx(d, 0);
          for (;;) {
            std::vector<Scalar> sd(d);
            for (std::size_t k = 0; k < d; ++k) sd[k] = len[idx[k]];
            shells.push_back({kind, sd});
            std::size_t k = d;
            while (k-- > 0) {
              if (++idx[k] < len.size()) break;
              idx[k] = 0;
            }
            if (k == static_cast<std::size_t>(-1)) break;
          }
        }
        // Multisets of 1..max_boxes shells.
        for (std::size_t nb = 1; nb <= bud.max_boxes && !stop; ++nb) {
          std::vector<std::size_t> pick(nb, 0);
          for (;;) {
            if (!budget_ok()) return false;
            std::vector<detail::Shell> chosen;
            auto objs = objects;
            Scalar vol = 0;
            for (std::size_t t : pick) {
              chosen.push_back(shells[t]);
              objs.push_back(shells[t].sides);
            }
            for (const auto& o : objs) {
              Scalar v = 1;
              for (const auto& x : o) v *= x;
              vol += v;
            }
            if (vol <= 1) consider(L, objs, chosen, s, fit);
            std::size_t k = nb;
            while (k-- > 0) {
              if (++pick[k] < shells.size()) {
                for (std::size_t u = k + 1; u < nb; ++u) pick[u] = pick[k];
                break;
              }
            }
            if (k == static_cast<std::size_t>(-1)) break;
          }
        }
      }
      return budget_ok();
    });
  }

  // Certificate checks.
  auto& A = best.certificate.assertions;
  const auto chk = verify_packing(best.packing);
  if (!chk.ok()) throw std::logic_error("structured_solve: packing does not verify");
  A.push_back("verify_packing: ok");
  for (std::size_t j = 0; j < best.boxes.size(); ++j) {
    std::vector<Item> inside;
    for (const auto& p : best.packing.placements)
      if (best.boxes[j].shell.contains(p.region())) inside.push_back(p.item);
    if (!admissible(best.boxes[j], inside)) throw std::logic_error("structured_solve: box content is not admissible");
    A.push_back("box " + std::to_string(j) + " admissible: ok");
  }
  if (best.certificate.profit < greedy_profit) throw std::logic_error("structured_solve: below the greedy baseline");
  A.push_back("profit >= greedy baseline: ok");
  return best;
}

/// Records profit / OPT in the certificate.
inline void certify_against_oracle(SolveResult& r, const OracleResult& o) {
  r.certificate.ratio_vs_oracle = o.profit == 0 ? Scalar(1) : Scalar(r.certificate.profit / o.profit);
  if (r.certificate.profit > o.profit) throw std::logic_error("certify: profit above the oracle optimum");
  r.certificate.assertions.push_back("profit <= oracle optimum: ok");
}

}  // namespace hcpack
