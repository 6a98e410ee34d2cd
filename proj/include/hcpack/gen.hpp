#pragma once

// Seeded instance generators. shatter_construction cuts a container into
// hypercubes with power-of-two quartering, so its items come with a packing
// that fills the container exactly.

#include "hcpack/geometry.hpp"
#include "hcpack/strip.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace hcpack {

struct KnapsackInstance {
  std::size_t d = 2;
  std::vector<Item> items;
  Scalar epsilon = Scalar(1, 4);
};

struct SideDistribution {
  Scalar min = Scalar(1, 20);
  Scalar max = 1;
  unsigned long denominator = 60;  // sides are multiples of 1/denominator
};

struct ProfitDistribution {
  long min = 1;
  long max = 10;
};

namespace detail {

inline long uniform_long(std::mt19937_64& rng, long lo, long hi) {
  return std::uniform_int_distribution<long>(lo, hi)(rng);
}

}  // namespace detail

inline KnapsackInstance random_instance(std::size_t d, std::size_t n, const SideDistribution& sides,
                                        const ProfitDistribution& profits, std::uint64_t seed,
                                        Scalar epsilon = Scalar(1, 4)) {
  if (d < 1) throw std::invalid_argument("random_instance: d must be positive");
  const Scalar den(static_cast<long>(sides.denominator));
  long lo = ceil_int(sides.min * den).get_si();
  long hi = floor_int(std::min(sides.max, Scalar(1)) * den).get_si();
  lo = std::max(lo, 1L);
  if (lo > hi) throw std::invalid_argument("random_instance: empty side range");
  std::mt19937_64 rng(seed);
  KnapsackInstance inst;
  inst.d = d;
  inst.epsilon = std::move(epsilon);
  for (std::size_t i = 0; i < n; ++i) {
    Scalar side = frac(detail::uniform_long(rng, lo, hi), static_cast<long>(sides.denominator));
    Scalar profit(detail::uniform_long(rng, profits.min, profits.max));
    inst.items.push_back(make_item(static_cast<int>(i), side, profit));
  }
  return inst;
}

struct ShatterOptions {
  unsigned depth = 1;
  double split_probability = 1.0;  // chance that a cube above the depth cap is quartered
  std::uint64_t seed = 0;
  ProfitDistribution profits{1, 1};
};

struct ShatterResult {
  std::vector<Item> items;
  Packing witness;
  Scalar height;  // extent along the last dimension
  Scalar profit;
};

/// The container is a grid of counts[i] base cubes of side `cube` per
/// dimension; each cube is recursively split into 2^d halves.
inline ShatterResult shatter_construction(const Scalar& cube, const std::vector<unsigned long>& counts,
                                          const ShatterOptions& opt) {
  const std::size_t d = counts.size();
  if (d == 0 || !(cube > 0)) throw std::invalid_argument("shatter_construction: bad container");
  if (opt.depth > 20) throw std::invalid_argument("shatter_construction: depth too large");
  std::vector<Scalar> sides(d);
  for (std::size_t i = 0; i < d; ++i) {
    if (counts[i] == 0) throw std::invalid_argument("shatter_construction: zero count");
    sides[i] = cube * Scalar(static_cast<long>(counts[i]));
  }
  ShatterResult r;
  r.witness.container = Cuboid(Point(d, Scalar(0)), sides);
  r.height = sides[d - 1];
  std::mt19937_64 rng(opt.seed);
  std::bernoulli_distribution split(opt.split_probability);

  struct Piece {
    Point pos;
    Scalar side;
    unsigned level;
  };
  std::vector<Piece> stack;
  std::vector<unsigned long> idx(d, 0);
  for (;;) {
    Point p(d);
    for (std::size_t i = 0; i < d; ++i) p[i] = cube * Scalar(static_cast<long>(idx[i]));
    stack.push_back({p, cube, 0});
    std::size_t i = d;
    while (i-- > 0) {
      if (++idx[i] < counts[i]) break;
      idx[i] = 0;
    }
    if (i == static_cast<std::size_t>(-1)) break;
  }
  std::reverse(stack.begin(), stack.end());
  int next_id = 0;
  while (!stack.empty()) {
    Piece pc = stack.back();
    stack.pop_back();
    if (pc.level < opt.depth && split(rng)) {
      Scalar h = pc.side / 2;
      for (std::size_t mask = (std::size_t{1} << d); mask-- > 0;) {
        Point q = pc.pos;
        for (std::size_t i = 0; i < d; ++i)
          if (mask >> (d - 1 - i) & 1U) q[i] += h;
        stack.push_back({q, h, pc.level + 1});
      }
      continue;
    }
    Scalar profit(detail::uniform_long(rng, opt.profits.min, opt.profits.max));
    Item it{next_id++, pc.side, profit};
    r.items.push_back(it);
    r.witness.placements.push_back(Placement{it, pc.pos});
  }
  r.profit = total_profit(r.items);
  return r;
}

struct StripShatter {
  StripInstance instance;
  Scalar h0;        // height of the known packing
  Packing witness;  // the shattered packing itself, inside A x B x [0, h0]
};

/// Strip instance cut from a box of unit cubes: `base` unit cells per short
/// dimension form A, `height` cubes stack along the last dimension. alpha is
/// chosen so that a unit cell is alpha * s_hat long, and B is the shortest
/// whole number of cubes meeting N * alpha^(d-k) * s_hat.
inline StripShatter shatter_strip(std::size_t d, std::size_t k, unsigned long base, unsigned long height,
                                  const ShatterOptions& opt, Scalar epsilon = Scalar(1, 4)) {
  if (d < 2 || k < 1 || k >= d) throw std::invalid_argument("shatter_strip: need 1 <= k < d");
  if (base == 0 || height == 0) throw std::invalid_argument("shatter_strip: empty container");
  const std::size_t dd = d - k;
  const unsigned long n_cells = static_cast<unsigned long>(to_ulong(pow(BigInt(base), dd)));
  // Smallest possible s_hat is 2^-depth; size B for it.
  const Scalar worst = pow(Scalar(1, 2), opt.depth);
  const unsigned long b = to_ulong(ceil_int(Scalar(n_cells) * pow(1 / worst, dd) * worst));
  std::vector<unsigned long> counts(dd, base);
  for (std::size_t i = 0; i + 1 < k; ++i) counts.push_back(std::max(b, 1UL));
  counts.push_back(height);
  ShatterResult sh = shatter_construction(Scalar(1), counts, opt);

  StripShatter out;
  StripInstance& in = out.instance;
  in.d = d;
  in.k = k;
  std::vector<std::vector<Scalar>> bounds(dd);
  for (auto& bd : bounds)
    for (unsigned long j = 0; j <= base; ++j) bd.push_back(Scalar(static_cast<long>(j)));
  in.A = Grid::full(bounds);
  for (std::size_t i = 0; i + 1 < k; ++i) in.B.push_back(Scalar(static_cast<long>(counts[dd + i])));
  in.items = sh.items;
  in.epsilon = std::move(epsilon);
  in.alpha = 1 / max_side(sh.items);
  in.N = n_cells;
  out.h0 = sh.height;
  out.witness = sh.witness;
  return out;
}

}  // namespace hcpack
