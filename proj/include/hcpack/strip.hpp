#pragma once

// Strip packing with resource augmentation on a grid base A x B.
//
// Coordinates: dimensions [0, d-k) are the short base A, [d-k, d-1) the long
// sides B, and d-1 is the height. Large items go through linear grouping and a
// configuration LP into layers of N-Boxes, small items fill the gaps between
// them as V-Boxes, and medium plus leftover small items are balanced over a top
// layer. Thresholds are expressed for an arbitrary VOL(A) = u, which is the
// same as scaling the instance so that VOL(A) = 1 and scaling the result back.

#include "hcpack/bounds.hpp"
#include "hcpack/boxes.hpp"
#include "hcpack/grid.hpp"
#include "hcpack/lp.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hcpack {

struct StripInstance {
  std::size_t d = 2;
  std::size_t k = 1;
  Grid A;                 // (d-k)-dimensional base
  std::vector<Scalar> B;  // k-1 long sides
  std::vector<Item> items;
  Scalar epsilon = frac(1, 4);
  Scalar alpha = 1;
  unsigned long N = 1;
  std::optional<Scalar> s_hat;  // size parameter; defaults to the largest item
};

inline Scalar effective_s_hat(const StripInstance& inst) {
  if (inst.s_hat) return *inst.s_hat;
  return inst.items.empty() ? Scalar(1) : max_side(inst.items);
}

namespace detail {

inline Scalar product(const std::vector<Scalar>& v) {
  Scalar p = 1;
  for (const auto& x : v) p *= x;
  return p;
}

inline Scalar covered_volume(const std::vector<Cuboid>& cells, const Cuboid& box) {
  Scalar v = 0;
  for (const auto& c : cells)
    if (auto x = c.intersection(box)) v += x->volume();
  return v;
}

inline bool covered_by(const std::vector<Cuboid>& cells, const Cuboid& box) {
  return covered_volume(cells, box) == box.volume();
}

/// base x prod [0, longs_j] x [z, z + h]
inline Cuboid lift(const Cuboid& base, const std::vector<Scalar>& longs, const Scalar& z, const Scalar& h) {
  Point lo = base.lower();
  std::vector<Scalar> sides = base.sides();
  for (const auto& b : longs) {
    lo.push_back(0);
    sides.push_back(b);
  }
  lo.push_back(z);
  sides.push_back(h);
  return Cuboid(std::move(lo), std::move(sides));
}

inline bool revlex_less(const Point& a, const Point& b) {
  for (std::size_t i = a.size(); i-- > 0;)
    if (a[i] != b[i]) return a[i] < b[i];
  return false;
}

// Lower-justified placement of cubes into the union of a grid's cells.
class WitnessSearch {
 public:
  WitnessSearch(const Grid& A, long node_limit)
      : cells_(cells_of(A)), bbox_(A.bounding_box()), base_(A.boundaries), limit_(node_limit) {}

  const std::vector<Cuboid>& cells() const { return cells_; }

  /// First anchor (last dimension most significant) where a cube of side s fits,
  /// not before `floor` when given.
  std::optional<Point> first_fit(const Scalar& s, const std::vector<Cuboid>& placed, const Point* floor) const {
    std::optional<Point> hit;
    for_each_anchor(s, placed, floor, [&](const Point& p) {
      if (!fits(Cuboid(p, std::vector<Scalar>(p.size(), s)), placed)) return true;
      hit = p;
      return false;
    });
    return hit;
  }

  /// Depth-first search for a placement of all sizes (non-increasing).
  bool search(const std::vector<Scalar>& sizes, std::vector<Cuboid>& placed) {
    nodes_ = 0;
    aborted_ = false;
    placed.clear();
    return dfs(sizes, placed);
  }

  bool aborted() const { return aborted_; }

 private:
  // Calls f on candidate corners in revlex order (last dimension most
  // significant), skipping those before floor; stops when f returns false.
  template <class F>
  void for_each_anchor(const Scalar& s, const std::vector<Cuboid>& placed, const Point* floor, F&& f) const {
    const std::size_t dd = bbox_.dim();
    std::vector<std::vector<Scalar>> coords(dd);
    for (std::size_t i = 0; i < dd; ++i) {
      std::vector<Scalar> c = base_[i];
      for (const auto& p : placed) c.push_back(p.upper(i));
      std::sort(c.begin(), c.end());
      c.erase(std::unique(c.begin(), c.end()), c.end());
      const Scalar top = bbox_.upper(i) - s;
      for (const auto& v : c)
        if (v <= top) coords[i].push_back(v);
      if (coords[i].empty()) return;
    }
    std::vector<std::size_t> idx(dd, 0);
    if (floor) {
      auto& last = coords[dd - 1];
      idx[dd - 1] = static_cast<std::size_t>(std::lower_bound(last.begin(), last.end(), (*floor)[dd - 1]) - last.begin());
      if (idx[dd - 1] == last.size()) return;
    }
    Point p(dd);
    for (;;) {
      for (std::size_t i = 0; i < dd; ++i) p[i] = coords[i][idx[i]];
      if (!(floor && revlex_less(p, *floor)) && !f(p)) return;
      std::size_t i = 0;
      while (i < dd && ++idx[i] == coords[i].size()) idx[i++] = 0;
      if (i == dd) return;
    }
  }

  bool fits(const Cuboid& box, const std::vector<Cuboid>& placed) const {
    if (!bbox_.contains(box)) return false;
    for (const auto& p : placed)
      if (p.interiors_intersect(box)) return false;
    return covered_by(cells_, box);
  }

  bool dfs(const std::vector<Scalar>& sizes, std::vector<Cuboid>& placed) {
    const std::size_t i = placed.size();
    if (i == sizes.size()) return true;
    if (++nodes_ > limit_) {
      aborted_ = true;
      return false;
    }
    const Scalar& s = sizes[i];
    const Point* floor = (i > 0 && sizes[i - 1] == s) ? &placed.back().lower() : nullptr;
    Point fl;
    if (floor) fl = *floor;
    bool done = false;
    for_each_anchor(s, placed, floor ? &fl : nullptr, [&](const Point& p) {
      Cuboid box(p, std::vector<Scalar>(p.size(), s));
      if (!fits(box, placed)) return true;
      placed.push_back(box);
      if (dfs(sizes, placed)) {
        done = true;
        return false;
      }
      placed.pop_back();
      return !aborted_;
    });
    return done;
  }

  std::vector<Cuboid> cells_;
  Cuboid bbox_;
  std::vector<std::vector<Scalar>> base_;
  long limit_;
  long nodes_ = 0;
  bool aborted_ = false;
};

}  // namespace detail

inline Scalar base_volume(const Grid& A) {
  Scalar u = 0;
  for (const auto& c : cells_of(A)) u += c.volume();
  return u;
}

/// Throws std::invalid_argument when the instance breaks a precondition.
inline void validate_strip(const StripInstance& inst) {
  if (inst.d < 2) throw std::invalid_argument("strip: d must be at least 2");
  if (inst.k < 1 || inst.k >= inst.d) throw std::invalid_argument("strip: k must lie in [1, d-1]");
  const std::size_t dd = inst.d - inst.k;
  inst.A.validate();
  if (inst.A.dim() != dd) throw std::invalid_argument("strip: base grid must have dimension d-k");
  if (inst.A.cells.empty()) throw std::invalid_argument("strip: base grid has no cells");
  if (inst.B.size() != inst.k - 1) throw std::invalid_argument("strip: B must have k-1 sides");
  if (inst.N < 1 || inst.A.cells.size() > inst.N) throw std::invalid_argument("strip: base grid has more than N cells");
  if (!(inst.epsilon > 0 && inst.epsilon <= frac(1, 3))) throw std::invalid_argument("strip: epsilon must lie in (0, 1/3]");
  if (!(inst.alpha >= 1)) throw std::invalid_argument("strip: alpha must be at least 1");
  for (const auto& it : inst.items)
    if (!(it.side > 0) || !(it.profit > 0)) throw std::invalid_argument("strip: bad item " + std::to_string(it.id));
  if (inst.s_hat && !(*inst.s_hat >= max_side(inst.items) && *inst.s_hat > 0))
    throw std::invalid_argument("strip: s_hat below the largest item");
  if (inst.items.empty() && !inst.s_hat) return;
  const Scalar s_hat = effective_s_hat(inst);
  for (const auto& c : cells_of(inst.A))
    for (std::size_t i = 0; i < dd; ++i)
      if (c.side(i) > inst.alpha * s_hat) throw std::invalid_argument("strip: a base cell is longer than alpha * s_hat");
  const Scalar min_b = Scalar(static_cast<long>(inst.N)) * pow(inst.alpha, dd) * s_hat;
  for (const auto& b : inst.B)
    if (b < min_b) throw std::invalid_argument("strip: a long side is shorter than N * alpha^(d-k) * s_hat");
  detail::WitnessSearch ws(inst.A, 1);
  if (!ws.first_fit(s_hat, {}, nullptr)) throw std::invalid_argument("strip: the largest item does not fit on the base");
}

struct StripClassification {
  std::vector<Scalar> rho;  // rho[i] is rho_{i+1}; holds rho_1 .. rho_{eta+1}
  std::size_t eta = 1;      // 1-based
  std::vector<Item> large, medium, small;

  const Scalar& rho_eta() const { return rho[eta - 1]; }
  const Scalar& rho_next() const { return rho[eta]; }
};

/// rho_1 = eps*s*u / (2(d-1) N (alpha*s)^(d-k)); eta is the first band whose
/// medium volume is at most eps * VOL(items).
inline StripClassification classify(const StripInstance& inst) {
  validate_strip(inst);
  StripClassification c;
  const std::size_t d = inst.d, dd = inst.d - inst.k;
  const Scalar u = base_volume(inst.A);
  const Scalar s_hat = effective_s_hat(inst);
  const Scalar rho1 = inst.epsilon * s_hat * u /
                      (Scalar(static_cast<long>(2 * (d - 1) * inst.N)) * pow(inst.alpha * s_hat, dd));
  const Scalar step = pow(u, dd) * pow(Scalar(2), dd);
  auto next = [&](const Scalar& r) -> Scalar { return rho1 * pow(r, dd * dd) / step; };
  const Scalar vol_all = total_volume(inst.items, d);
  const unsigned long cap = to_ulong(ceil_int(1 / inst.epsilon));
  c.rho.push_back(rho1);
  for (std::size_t i = 1;; ++i) {
    c.rho.push_back(next(c.rho.back()));
    const Scalar& hi = c.rho[i - 1];
    const Scalar& lo = c.rho[i];
    Scalar band = 0;
    for (const auto& it : inst.items)
      if (it.side > lo && it.side < hi) band += item_volume(it, d);
    if (band <= inst.epsilon * vol_all) {
      c.eta = i;
      break;
    }
    if (i >= cap) throw std::logic_error("strip classify: no band with small medium volume");
  }
  for (const auto& it : inst.items) {
    if (it.side >= c.rho_eta()) c.large.push_back(it);
    else if (it.side > c.rho_next()) c.medium.push_back(it);
    else c.small.push_back(it);
  }
  return c;
}

/// N_sizes = ceil(1 / (eps * rho'^d)) for the normalised rho' = rho * u^(-1/(d-k)).
inline BigInt n_sizes_for(const Scalar& epsilon, const Scalar& rho_eta, const Scalar& u, std::size_t d, std::size_t k) {
  const std::size_t dd = d - k;
  // (1/(eps rho^d))^(d-k) * u^d, then the (d-k)-th root.
  Scalar x = pow(1 / (epsilon * pow(rho_eta, d)), dd) * pow(u, d);
  return ceil_root(x, dd);
}

struct Group {
  BigInt index;  // 0-based position among the N_sizes groups
  std::vector<Item> items;
  Scalar size;   // rounded side: the group maximum
};

struct Grouping {
  BigInt n_sizes;
  std::vector<Group> groups;  // non-empty groups only, in order

  /// Cardinality of group j under the m / m+1 split.
  static BigInt group_size(const BigInt& n_items, const BigInt& n_sizes, const BigInt& j) {
    BigInt m = n_items / n_sizes;
    BigInt l = n_sizes - n_items % n_sizes;
    return j < l ? m : BigInt(m + 1);
  }

  Scalar rounded_volume(std::size_t d) const {
    Scalar v = 0;
    for (const auto& g : groups) v += Scalar(static_cast<long>(g.items.size())) * pow(g.size, d);
    return v;
  }
};

/// Sorted by decreasing side; the first l = N_sizes - |L| mod N_sizes groups get
/// floor(|L|/N_sizes) items, the rest one more. Sizes round up to the group maximum.
inline Grouping linear_group(std::vector<Item> large, const BigInt& n_sizes) {
  if (n_sizes < 1) throw std::invalid_argument("linear_group: N_sizes must be positive");
  sort_by_side_desc(large);
  Grouping g;
  g.n_sizes = n_sizes;
  const BigInt n = static_cast<unsigned long>(large.size());
  const BigInt m = n / n_sizes;
  const BigInt l = n_sizes - n % n_sizes;
  // The first non-empty group: with m = 0 the leading l groups are empty.
  BigInt j = (m == 0) ? l : BigInt(0);
  std::size_t pos = 0;
  while (pos < large.size()) {
    std::size_t cnt = to_ulong(Grouping::group_size(n, n_sizes, j));
    Group grp{j, {}, large[pos].side};
    for (std::size_t t = 0; t < cnt; ++t) grp.items.push_back(large[pos++]);
    g.groups.push_back(std::move(grp));
    ++j;
  }
  return g;
}

struct SizeClass {
  Scalar size;
  std::vector<Item> items;  // actual items, sides <= size
};

/// Groups merged by equal rounded size, in decreasing size.
inline std::vector<SizeClass> size_classes(const Grouping& g) {
  std::vector<SizeClass> out;
  for (const auto& grp : g.groups) {
    if (out.empty() || out.back().size != grp.size) out.push_back(SizeClass{grp.size, {}});
    out.back().items.insert(out.back().items.end(), grp.items.begin(), grp.items.end());
  }
  return out;
}

struct ConfigItem {
  std::size_t group;  // index into the size list
  Cuboid box;         // (d-k)-dimensional, inside A
};

struct Configuration {
  std::vector<unsigned long> counts;
  std::vector<ConfigItem> witness;

  bool empty() const {
    return std::all_of(counts.begin(), counts.end(), [](unsigned long c) { return c == 0; });
  }
};

struct EnumOptions {
  unsigned long budget = 1000000;  // candidate count vectors
  long witness_nodes = 20000;      // per full witness search
};

struct ConfigEnumeration {
  std::vector<Configuration> configs;  // valid ones, lexicographic by counts
  unsigned long candidates = 0;
  unsigned long aborted_searches = 0;  // searches cut off by the node limit, counted invalid
  BigInt max_count;                    // floor(u / rho^(d-k))
};

/// All valid count vectors over `sizes` (non-increasing). Valid vectors are
/// down-closed, so each coordinate is raised until the witness search fails.
inline ConfigEnumeration enumerate_configs(const std::vector<Scalar>& sizes, const Grid& A, const Scalar& rho_eta,
                                           const EnumOptions& opt = {}) {
  for (std::size_t j = 1; j < sizes.size(); ++j)
    if (sizes[j] > sizes[j - 1]) throw std::invalid_argument("enumerate_configs: sizes must be non-increasing");
  const std::size_t dd = A.dim();
  const Scalar u = base_volume(A);
  ConfigEnumeration out;
  out.max_count = floor_int(u / pow(rho_eta, dd));
  detail::WitnessSearch ws(A, opt.witness_nodes);
  const std::size_t J = sizes.size();
  // On a one-cell base, first fit reaches every single-size count up to the
  // lattice capacity, one candidate each: fail fast when those alone exceed
  // the budget.
  BigInt floor_candidates = 0;
  if (ws.cells().size() == 1)
    for (std::size_t j = 0; j < J; ++j) {
      BigInt n = 1;
      for (std::size_t i = 0; i < dd; ++i) n *= floor_int(ws.cells()[0].side(i) / sizes[j]);
      floor_candidates += std::min(n, out.max_count);
    }
  if (floor_candidates > opt.budget)
    throw BudgetExceeded("enumerate_configs: more than " + std::to_string(opt.budget) + " candidate vectors");

  struct Rec {
    const std::vector<Scalar>& sizes;
    const EnumOptions& opt;
    detail::WitnessSearch& ws;
    ConfigEnumeration& out;
    Scalar u;
    std::size_t J, dd;

    bool try_extend(const Configuration& cur, std::size_t j, Configuration& next) {
      std::vector<Cuboid> placed;
      for (const auto& w : cur.witness) placed.push_back(w.box);
      const Point* floor = nullptr;
      if (!cur.witness.empty() && sizes[cur.witness.back().group] == sizes[j]) floor = &cur.witness.back().box.lower();
      next = cur;
      ++next.counts[j];
      if (auto p = ws.first_fit(sizes[j], placed, floor)) {
        next.witness.push_back(ConfigItem{j, Cuboid(*p, std::vector<Scalar>(dd, sizes[j]))});
        return true;
      }
      std::vector<Scalar> all;
      std::vector<std::size_t> grp;
      for (std::size_t t = 0; t < J; ++t)
        for (unsigned long c = 0; c < next.counts[t]; ++c) {
          all.push_back(sizes[t]);
          grp.push_back(t);
        }
      std::vector<Cuboid> boxes;
      bool ok = ws.search(all, boxes);
      if (ws.aborted()) ++out.aborted_searches;
      if (!ok) return false;
      next.witness.clear();
      for (std::size_t t = 0; t < boxes.size(); ++t) next.witness.push_back(ConfigItem{grp[t], boxes[t]});
      return true;
    }

    void run(std::size_t j, const Configuration& cur, const Scalar& vol) {
      if (j == J) {
        out.configs.push_back(cur);
        return;
      }
      Configuration node = cur;
      Scalar v = vol;
      const Scalar item = pow(sizes[j], dd);
      for (;;) {
        run(j + 1, node, v);
        if (BigInt(node.counts[j] + 1) > out.max_count) break;
        if (v + item > u) break;
        if (++out.candidates > opt.budget)
          throw BudgetExceeded("enumerate_configs: more than " + std::to_string(opt.budget) + " candidate vectors");
        Configuration next;
        if (!try_extend(node, j, next)) break;
        node = std::move(next);
        v += item;
      }
    }
  };
  Rec rec{sizes, opt, ws, out, u, J, dd};
  Configuration zero{std::vector<unsigned long>(J, 0), {}};
  rec.run(0, zero, 0);
  return out;
}

struct ConfigLp {
  std::vector<Scalar> x;  // per configuration, k-dimensional volume
  Scalar objective;
};

/// min sum x_i  s.t.  sum_i x_i c_ij = demand_j, x >= 0.
inline ConfigLp solve_config_lp(const std::vector<Configuration>& configs, const std::vector<Scalar>& demand) {
  ConfigLp res;
  res.x.assign(configs.size(), Scalar(0));
  res.objective = 0;
  if (demand.empty()) return res;
  std::vector<std::size_t> cols;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    if (configs[i].counts.size() != demand.size()) throw std::invalid_argument("solve_config_lp: size mismatch");
    if (!configs[i].empty()) cols.push_back(i);
  }
  std::vector<std::vector<Scalar>> A(demand.size(), std::vector<Scalar>(cols.size()));
  for (std::size_t j = 0; j < demand.size(); ++j)
    for (std::size_t c = 0; c < cols.size(); ++c) A[j][c] = static_cast<unsigned long>(configs[cols[c]].counts[j]);
  LpResult lp = solve_lp(A, demand, std::vector<Scalar>(cols.size(), Scalar(1)));
  if (lp.status != LpResult::Status::Optimal) {
    std::string why = lp.status == LpResult::Status::Infeasible ? "infeasible" : "unbounded";
    throw std::logic_error("solve_config_lp: configuration LP is " + why + " over " + std::to_string(cols.size()) +
                           " configurations and " + std::to_string(demand.size()) + " sizes");
  }
  for (std::size_t c = 0; c < cols.size(); ++c) res.x[cols[c]] = lp.x[c];
  res.objective = lp.objective;
  for (std::size_t j = 0; j < demand.size(); ++j) {
    Scalar lhs = 0;
    for (std::size_t i = 0; i < configs.size(); ++i) lhs += res.x[i] * static_cast<unsigned long>(configs[i].counts[j]);
    if (lhs != demand[j]) throw std::logic_error("solve_config_lp: constraint not met exactly");
  }
  return res;
}

struct StripContext {
  std::size_t d = 2, k = 1, dd = 1;
  std::vector<Cuboid> cells;
  Grid A;
  std::vector<Scalar> B;
  Scalar u, vol_b, s_hat, epsilon;

  static StripContext of(const StripInstance& inst) {
    StripContext c;
    c.d = inst.d;
    c.k = inst.k;
    c.dd = inst.d - inst.k;
    c.A = inst.A;
    c.cells = cells_of(inst.A);
    c.B = inst.B;
    c.u = base_volume(inst.A);
    c.vol_b = detail::product(inst.B);
    c.s_hat = effective_s_hat(inst);
    c.epsilon = inst.epsilon;
    return c;
  }

  std::vector<Scalar> longs_rounded(const Scalar& unit) const {
    std::vector<Scalar> out;
    for (const auto& b : B) out.push_back(round_up_to(b, unit));
    return out;
  }
};

struct Layer {
  std::size_t config = 0;
  Scalar x, h, z;  // LP mass, height, floor
  std::vector<BoxSpec> n_boxes, v_boxes;
  std::vector<Cuboid> gaps;  // (d-k)-dimensional
  std::vector<Placement> placements;
  Scalar free_volume;        // FVOL after the gaps are filled
};

/// One layer per configuration with positive mass. Every config item becomes an
/// N-Box s x ceil-extended B x s*ceil(h/s); the actual large items of a size
/// class are dealt into that class's N-Boxes in order.
inline std::vector<Layer> build_layers(const StripContext& ctx, const std::vector<Configuration>& configs,
                                       const std::vector<Scalar>& x, const std::vector<SizeClass>& classes) {
  std::vector<Layer> layers;
  Scalar z = 0;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    if (!(x[i] > 0)) continue;
    Layer L;
    L.config = i;
    L.x = x[i];
    L.h = x[i] / ctx.vol_b;
    L.z = z;
    for (const auto& w : configs[i].witness) {
      const Scalar& s = classes[w.group].size;
      Cuboid shell = detail::lift(w.box, ctx.longs_rounded(s), z, round_up_to(L.h, s));
      L.n_boxes.push_back(make_box(BoxKind::N, shell, s, "strip-layer"));
    }
    z += L.h + ctx.s_hat;
    layers.push_back(std::move(L));
  }
  // Containment in the enlarged layers and disjointness.
  for (const auto& L : layers) {
    std::vector<Scalar> longs;
    for (const auto& b : ctx.B) longs.push_back(b + ctx.s_hat);
    Cuboid region = detail::lift(ctx.A.bounding_box(), longs, L.z, L.h + ctx.s_hat);
    for (std::size_t a = 0; a < L.n_boxes.size(); ++a) {
      if (!region.contains(L.n_boxes[a].shell)) throw std::logic_error("build_layers: N-Box leaves its enlarged layer");
      for (std::size_t b = a + 1; b < L.n_boxes.size(); ++b)
        if (L.n_boxes[a].shell.interiors_intersect(L.n_boxes[b].shell))
          throw std::logic_error("build_layers: N-Boxes overlap");
    }
  }
  // Deal the items.
  for (std::size_t c = 0; c < classes.size(); ++c) {
    std::vector<Item> queue = classes[c].items;
    sort_by_side_desc(queue);
    std::size_t next = 0;
    for (auto& L : layers) {
      const auto& wit = configs[L.config].witness;
      for (std::size_t w = 0; w < wit.size() && next < queue.size(); ++w) {
        if (wit[w].group != c) continue;
        const BoxSpec& box = L.n_boxes[w];
        BoxCapacity cap = capacity(box);
        std::vector<Item> chunk;
        while (next < queue.size() && BigInt(static_cast<unsigned long>(chunk.size())) < cap.count)
          chunk.push_back(queue[next++]);
        Packing p = pack_box(box, chunk);
        L.placements.insert(L.placements.end(), p.placements.begin(), p.placements.end());
      }
    }
    if (next != queue.size()) throw std::logic_error("build_layers: N-Box capacity short for a size class");
  }
  return layers;
}

/// Gaps of each layer get a V-Box rounded to multiples of s_small; small items
/// are assigned greedily (descending volume, then id) up to
/// VOL(ext') - rho_next * SURF(ext') / 2. Returns the items left over.
inline std::vector<Item> fill_gaps(const StripContext& ctx, std::vector<Layer>& layers,
                                   const std::vector<Configuration>& configs, std::vector<Item> small,
                                   const Scalar& rho_next) {
  const std::size_t d = ctx.d;
  std::sort(small.begin(), small.end(), [](const Item& a, const Item& b) {
    if (a.side != b.side) return a.side > b.side;
    return a.id < b.id;
  });
  const Scalar s_small = small.empty() ? Scalar(0) : max_side(small);
  std::vector<bool> used(small.size(), false);
  std::size_t left = small.size();
  for (auto& L : layers) {
    for (const auto& cell : ctx.cells) {
      std::vector<Cuboid> removed;
      for (const auto& w : configs[L.config].witness)
        if (auto x = cell.intersection(w.box)) removed.push_back(*x);
      for (const auto& g : cells_of(split_grid(Grid::single(cell), removed))) L.gaps.push_back(g);
    }
    Scalar gap_volume = 0;
    Scalar small_volume = 0;
    for (const auto& g : L.gaps) {
      gap_volume += g.volume() * ctx.vol_b * L.h;
      if (small.empty()) continue;
      std::vector<Scalar> rs;
      bool zero = false;
      for (std::size_t i = 0; i < ctx.dd; ++i) {
        rs.push_back(round_down_to(g.side(i), s_small));
        if (rs.back() == 0) zero = true;
      }
      if (zero) continue;
      const Cuboid short_box(g.lower(), rs);
      const Cuboid ext_r = detail::lift(short_box, ctx.B, L.z, L.h);
      const Scalar budget = ext_r.volume() - rho_next * ext_r.surface() / 2;
      std::vector<Item> chosen;
      Scalar vol = 0;
      for (std::size_t t = 0; t < small.size() && left > 0; ++t) {
        if (used[t]) continue;
        Scalar v = item_volume(small[t], d);
        if (vol + v <= budget) {
          vol += v;
          used[t] = true;
          --left;
          chosen.push_back(small[t]);
        }
      }
      if (chosen.empty()) continue;
      Cuboid shell = detail::lift(short_box, ctx.longs_rounded(s_small), L.z, round_up_to(L.h, s_small));
      BoxSpec box = make_box(BoxKind::V, shell, s_small, "strip-gap");
      Packing p = pack_box(box, chosen);
      L.placements.insert(L.placements.end(), p.placements.begin(), p.placements.end());
      L.v_boxes.push_back(std::move(box));
      small_volume += vol;
    }
    L.free_volume = gap_volume - small_volume;
  }
  std::vector<Item> rest;
  for (std::size_t t = 0; t < small.size(); ++t)
    if (!used[t]) rest.push_back(small[t]);
  return rest;
}

struct TopLayer {
  Scalar z, h;                    // floor and h_top (0 when nothing is left)
  Scalar s_medium;                // rounding unit for the bases
  std::vector<Cuboid> bases;      // (d-k)-dimensional rounded cells of A''
  std::size_t merged = 0;         // index of the merged base
  std::vector<bool> marked;
  std::vector<Scalar> heights;    // balanced per-base heights
  std::vector<BoxSpec> boxes;
  std::vector<Placement> placements;
  Scalar free_volume;             // FVOL(L_top)
  bool boxes_admissible = true;   // whether the rounded shells also meet the V-Box budget
};

/// Balances the remaining items over the marked strips of A'' and packs each
/// strip with NFDH up to the common height h_top.
inline TopLayer pack_top(const StripContext& ctx, std::vector<Item> rest, const Scalar& rho_eta,
                         const Scalar& s_medium, const Scalar& z) {
  TopLayer top;
  top.z = z;
  top.h = 0;
  top.s_medium = s_medium;
  if (rest.empty()) return top;
  const std::size_t d = ctx.d, dd = ctx.dd;

  // Temporarily place an s_hat-cube on A; the cells it meets merge into one box.
  detail::WitnessSearch ws(ctx.A, 1);
  auto anchor = ws.first_fit(ctx.s_hat, {}, nullptr);
  if (!anchor) throw std::logic_error("pack_top: the largest item does not fit on the base");
  const Cuboid cube(*anchor, std::vector<Scalar>(dd, ctx.s_hat));
  std::vector<Cuboid> others;
  std::optional<Cuboid> merged;
  for (const auto& c : ctx.cells) {
    if (!c.interiors_intersect(cube)) {
      others.push_back(c);
      continue;
    }
    if (!merged) {
      merged = c;
      continue;
    }
    Point lo(dd), hi(dd);
    for (std::size_t i = 0; i < dd; ++i) {
      lo[i] = std::min(merged->lower(i), c.lower(i));
      hi[i] = std::max(merged->upper(i), c.upper(i));
    }
    merged = Cuboid::from_bounds(lo, hi);
  }
  auto rounded = [&](const Cuboid& c) -> std::optional<Cuboid> {
    std::vector<Scalar> s;
    for (std::size_t i = 0; i < dd; ++i) {
      s.push_back(round_down_to(c.side(i), s_medium));
      if (s.back() == 0) return std::nullopt;
    }
    return Cuboid(c.lower(), s);
  };
  auto rm = rounded(*merged);
  if (!rm) throw std::logic_error("pack_top: merged base rounds to nothing");
  top.bases.push_back(*rm);
  top.merged = 0;
  for (const auto& c : others)
    if (auto r = rounded(c)) top.bases.push_back(*r);

  // Mark, then balance.
  std::vector<Scalar> denom;
  for (const auto& b : top.bases) {
    // (d-1)-dimensional measures of b x B
    Point lo = b.lower();
    std::vector<Scalar> sides = b.sides();
    for (const auto& x : ctx.B) {
      lo.push_back(0);
      sides.push_back(x);
    }
    const Cuboid c(lo, sides);
    const Scalar vol = c.volume(), surf = c.surface();
    const bool m = 2 * vol > rho_eta * surf;
    top.marked.push_back(m);
    denom.push_back(m ? Scalar(vol - rho_eta * surf / 2) : Scalar(0));
    top.heights.push_back(m ? Scalar(rho_eta * vol / denom.back()) : Scalar(0));
  }
  if (std::none_of(top.marked.begin(), top.marked.end(), [](bool b) { return b; }))
    throw std::logic_error("pack_top: no marked base");

  sort_by_side_desc(rest);
  std::vector<std::vector<Item>> assigned(top.bases.size());
  for (const auto& it : rest) {
    const Scalar v = item_volume(it, d);
    std::size_t best = top.bases.size();
    Scalar best_h;
    for (std::size_t a = 0; a < top.bases.size(); ++a) {
      if (!top.marked[a]) continue;
      Scalar h = top.heights[a] + v / denom[a];
      if (best == top.bases.size() || h < best_h) {
        best = a;
        best_h = h;
      }
    }
    top.heights[best] = best_h;
    assigned[best].push_back(it);
  }
  for (std::size_t a = 0; a < top.bases.size(); ++a)
    if (!assigned[a].empty()) top.h = std::max(top.h, top.heights[a]);

  const Scalar packed = total_volume(rest, d);
  for (std::size_t a = 0; a < top.bases.size(); ++a) {
    if (assigned[a].empty()) continue;
    const Cuboid region = detail::lift(top.bases[a], ctx.B, z, top.h);
    NfdhResult r = nfdh_pack(assigned[a], region);
    if (!r.all_packed()) throw std::logic_error("pack_top: NFDH left items in a balanced strip");
    top.placements.insert(top.placements.end(), r.packed.placements.begin(), r.packed.placements.end());
    Cuboid shell = detail::lift(top.bases[a], ctx.longs_rounded(s_medium), z, round_up_to(top.h, s_medium));
    BoxSpec box = make_box(BoxKind::V, shell, s_medium, "strip-top");
    if (!admissible(box, assigned[a])) top.boxes_admissible = false;
    top.boxes.push_back(std::move(box));
  }
  top.free_volume = ctx.u * ctx.vol_b * top.h - packed;
  return top;
}

struct StripResult {
  Packing packing;
  std::vector<BoxSpec> boxes;
  StripClassification classification;
  Grouping grouping;
  std::vector<SizeClass> classes;
  ConfigEnumeration configs;
  std::vector<Scalar> x;
  Scalar lp_objective;
  std::vector<Layer> layers;
  TopLayer top;
  Scalar s_hat;
  Scalar h_total;
  bool small_all_in_gaps = true;
  std::vector<BoundCheck> bounds;

  std::size_t n_configs() const { return configs.configs.size(); }
};

/// Packs every item into A x (B + s_hat) x [0, h_total] with
/// h_total = sum (h_i + s_hat) + (h_top + s_hat when the top layer is used).
inline StripResult strip_pack(const StripInstance& inst, const EnumOptions& opt = {}) {
  StripResult r;
  r.classification = classify(inst);
  const StripContext ctx = StripContext::of(inst);
  const std::size_t d = ctx.d, k = ctx.k, dd = ctx.dd;
  const Scalar& eps = ctx.epsilon;
  const Scalar& rho_eta = r.classification.rho_eta();
  const Scalar& rho_next = r.classification.rho_next();
  r.s_hat = ctx.s_hat;
  const Scalar vol_items = total_volume(inst.items, d);

  // Large items.
  const auto& L = r.classification.large;
  r.grouping = linear_group(L, n_sizes_for(eps, rho_eta, ctx.u, d, k));
  const Scalar vol_l = total_volume(L, d);
  const Scalar vol_up = r.grouping.rounded_volume(d);
  require_bound(r.bounds, "linear grouping keeps volume", vol_l, vol_up);
  require_bound(r.bounds, "linear grouping adds little volume", vol_up,
                (1 + eps) * vol_l + ctx.u * ctx.vol_b * ctx.s_hat);
  r.classes = size_classes(r.grouping);
  std::vector<Scalar> sizes, demand;
  for (const auto& c : r.classes) {
    sizes.push_back(c.size);
    demand.push_back(Scalar(static_cast<unsigned long>(c.items.size())) * pow(c.size, k));
  }
  r.configs = enumerate_configs(sizes, inst.A, rho_eta, opt);
  ConfigLp lp = solve_config_lp(r.configs.configs, demand);
  r.x = lp.x;
  r.lp_objective = lp.objective;
  r.layers = build_layers(ctx, r.configs.configs, r.x, r.classes);

  // Small items in the gaps.
  std::vector<Item> rest = fill_gaps(ctx, r.layers, r.configs.configs, r.classification.small, rho_next);
  r.small_all_in_gaps = rest.empty();
  if (!rest.empty()) {
    for (const auto& layer : r.layers)
      require_bound(r.bounds, "layer free volume", layer.free_volume,
                    frac(3, 2) * eps * ctx.u * layer.x +
                        eps / Scalar(static_cast<long>(d - 1)) * ctx.u * ctx.vol_b * ctx.s_hat);
  }

  // Medium and leftover small items on top.
  Scalar z = 0;
  for (const auto& layer : r.layers) z += layer.h + ctx.s_hat;
  rest.insert(rest.end(), r.classification.medium.begin(), r.classification.medium.end());
  Scalar s_medium = !r.classification.medium.empty() ? max_side(r.classification.medium)
                                                      : max_side(r.classification.small);
  r.top = pack_top(ctx, rest, rho_eta, s_medium, z);
  r.h_total = z;
  if (!rest.empty()) {
    r.h_total += r.top.h + ctx.s_hat;
    require_bound(r.bounds, "top layer free volume", r.top.free_volume,
                  frac(3, 2) * eps * ctx.u * r.top.h * ctx.vol_b +
                      eps / Scalar(static_cast<long>(d - 1)) * ctx.u * ctx.vol_b * ctx.s_hat);
  }

  // Height against the volume lower bound VOL(I) / (u VOL(B)).
  const Scalar lower = vol_items / (ctx.u * ctx.vol_b);
  const Scalar n_layers = static_cast<unsigned long>(r.layers.size());
  if (!r.small_all_in_gaps) {
    require_bound(r.bounds, "height, small items on top", (1 - frac(3, 2) * eps) * r.h_total,
                  (1 + eps) * lower + (n_layers + 2) * ctx.s_hat);
  } else if (!rest.empty()) {
    require_bound(r.bounds, "top height, medium only", (1 - frac(3, 2) * eps) * r.top.h,
                  eps * lower + eps / Scalar(static_cast<long>(d - 1)) * ctx.s_hat);
  }

  // Box counts.
  const BigInt per_config = floor_int(ctx.u / pow(rho_eta, dd));
  std::size_t n_boxes = 0, v_boxes = r.top.boxes.size();
  for (const auto& layer : r.layers) {
    n_boxes += layer.n_boxes.size();
    v_boxes += layer.v_boxes.size();
  }
  require_bound(r.bounds, "N-Box count", Scalar(static_cast<unsigned long>(n_boxes)), Scalar(n_layers * per_config));
  require_bound(r.bounds, "V-Box count", Scalar(static_cast<unsigned long>(v_boxes)),
                n_layers * static_cast<unsigned long>(inst.N) * Scalar(pow(BigInt(2 * per_config + 1), dd)) +
                    static_cast<unsigned long>(inst.N));

  // Assemble and verify.
  std::vector<Scalar> longs;
  for (const auto& b : inst.B) longs.push_back(b + ctx.s_hat);
  r.packing.container = detail::lift(inst.A.bounding_box(), longs, 0, r.h_total > 0 ? r.h_total : Scalar(ctx.s_hat));
  for (auto& layer : r.layers) {
    r.packing.placements.insert(r.packing.placements.end(), layer.placements.begin(), layer.placements.end());
    r.boxes.insert(r.boxes.end(), layer.n_boxes.begin(), layer.n_boxes.end());
    r.boxes.insert(r.boxes.end(), layer.v_boxes.begin(), layer.v_boxes.end());
  }
  r.packing.placements.insert(r.packing.placements.end(), r.top.placements.begin(), r.top.placements.end());
  r.boxes.insert(r.boxes.end(), r.top.boxes.begin(), r.top.boxes.end());
  if (r.packing.placements.size() != inst.items.size()) throw std::logic_error("strip_pack: not every item was packed");
  if (auto chk = verify_packing(r.packing); !chk) throw std::logic_error("strip_pack: " + chk.violation->message);
  for (const auto& pl : r.packing.placements) {
    Cuboid foot(Point(pl.pos.begin(), pl.pos.begin() + dd), std::vector<Scalar>(dd, pl.item.side));
    if (!detail::covered_by(ctx.cells, foot)) throw std::logic_error("strip_pack: an item leaves the base A");
  }
  return r;
}

}  // namespace hcpack
