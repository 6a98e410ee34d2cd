#pragma once

// Exact two-phase primal simplex on  min c.x  s.t.  A x = b, x >= 0.
// Bland's rule, dense tableau over rationals; meant for small LPs.

#include "hcpack/rational.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace hcpack {

struct LpResult {
  enum class Status { Optimal, Infeasible, Unbounded } status = Status::Optimal;
  std::vector<Scalar> x;
  Scalar objective;
  std::vector<std::size_t> basis;  // column per row, only for Optimal
};

namespace detail {

struct Tableau {
  std::size_t m, n;                   // rows, columns (without rhs)
  std::vector<std::vector<Scalar>> t;  // m rows of n + 1 entries, rhs last
  std::vector<Scalar> obj;            // reduced costs, n + 1 entries, -value last
  std::vector<std::size_t> basis;

  void pivot(std::size_t r, std::size_t c) {
    Scalar p = t[r][c];
    for (auto& v : t[r]) v /= p;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == r || t[i][c] == 0) continue;
      Scalar f = t[i][c];
      for (std::size_t j = 0; j <= n; ++j)
        if (t[r][j] != 0) t[i][j] -= f * t[r][j];
    }
    if (obj[c] != 0) {
      Scalar f = obj[c];
      for (std::size_t j = 0; j <= n; ++j)
        if (t[r][j] != 0) obj[j] -= f * t[r][j];
    }
    basis[r] = c;
  }

  // Returns false when unbounded. `allowed` masks entering columns.
  bool run(const std::vector<bool>& allowed) {
    for (;;) {
      std::size_t enter = n;
      for (std::size_t j = 0; j < n; ++j)
        if (allowed[j] && obj[j] < 0) {
          enter = j;
          break;
        }
      if (enter == n) return true;
      std::size_t leave = m;
      Scalar best;
      for (std::size_t i = 0; i < m; ++i) {
        if (!(t[i][enter] > 0)) continue;
        Scalar ratio = t[i][n] / t[i][enter];
        if (leave == m || ratio < best || (ratio == best && basis[i] < basis[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave == m) return false;
      pivot(leave, enter);
    }
  }
};

}  // namespace detail

inline LpResult solve_lp(const std::vector<std::vector<Scalar>>& A, const std::vector<Scalar>& b,
                         const std::vector<Scalar>& c) {
  const std::size_t m = A.size();
  const std::size_t n = c.size();
  for (const auto& row : A)
    if (row.size() != n) throw std::invalid_argument("solve_lp: ragged constraint matrix");
  if (b.size() != m) throw std::invalid_argument("solve_lp: rhs size mismatch");

  LpResult res;
  if (m == 0) {
    res.x.assign(n, Scalar(0));
    for (std::size_t j = 0; j < n; ++j)
      if (c[j] < 0) {
        res.status = LpResult::Status::Unbounded;
        return res;
      }
    res.objective = 0;
    return res;
  }

  // Columns: n originals, then m artificials.
  detail::Tableau T{m, n + m, {}, {}, {}};
  T.t.assign(m, std::vector<Scalar>(n + m + 1));
  T.basis.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const bool flip = b[i] < 0;
    for (std::size_t j = 0; j < n; ++j) T.t[i][j] = flip ? Scalar(-A[i][j]) : A[i][j];
    T.t[i][n + i] = 1;
    T.t[i][n + m] = flip ? Scalar(-b[i]) : b[i];
    T.basis[i] = n + i;
  }
  // Phase 1: minimise the sum of artificials.
  T.obj.assign(n + m + 1, Scalar(0));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j <= n + m; ++j)
      if (j < n || j == n + m) T.obj[j] -= T.t[i][j];
  std::vector<bool> all(n + m, true);
  T.run(all);
  if (T.obj[n + m] != 0) {
    res.status = LpResult::Status::Infeasible;
    return res;
  }
  // Drive artificials out of the basis where possible; rows that stay are redundant.
  std::vector<bool> redundant(m, false);
  for (std::size_t i = 0; i < m; ++i) {
    if (T.basis[i] < n) continue;
    std::size_t col = n;
    for (std::size_t j = 0; j < n; ++j)
      if (T.t[i][j] != 0) {
        col = j;
        break;
      }
    if (col == n) redundant[i] = true;
    else T.pivot(i, col);
  }
  // Phase 2.
  T.obj.assign(n + m + 1, Scalar(0));
  for (std::size_t j = 0; j < n; ++j) T.obj[j] = c[j];
  for (std::size_t i = 0; i < m; ++i) {
    if (redundant[i]) continue;
    Scalar f = T.obj[T.basis[i]];
    if (f == 0) continue;
    for (std::size_t j = 0; j <= n + m; ++j)
      if (T.t[i][j] != 0) T.obj[j] -= f * T.t[i][j];
  }
  std::vector<bool> orig(n + m, false);
  for (std::size_t j = 0; j < n; ++j) orig[j] = true;
  if (!T.run(orig)) {
    res.status = LpResult::Status::Unbounded;
    return res;
  }
  res.x.assign(n, Scalar(0));
  for (std::size_t i = 0; i < m; ++i)
    if (T.basis[i] < n) res.x[T.basis[i]] = T.t[i][n + m];
  res.objective = 0;
  for (std::size_t j = 0; j < n; ++j) res.objective += c[j] * res.x[j];
  res.basis = T.basis;
  return res;
}

}  // namespace hcpack
