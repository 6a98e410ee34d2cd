#pragma once

// Positive reals that may be far too large (or small) to write down.
//
// A Magnitude is either an exact rational or 2^L, where L is a signed real
// kept as a certified interval in "level" form: level 0 is a plain double
// interval, level j >= 1 is sign * E_j(x) with E_0(x) = x, E_j(x) = 2^E_{j-1}(x)
// and x in [lo, hi]. Every double bound is widened outward after each step, so
// comparisons either come out decided or throw.

#include "hcpack/rational.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

namespace hcpack {

class Undecidable : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

namespace detail {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLift = 1e300;     // level-0 magnitudes above this move to level 1
constexpr double kLower = 990.0;    // level-j arguments below this drop a level
constexpr std::size_t kExactBits = 200000;

inline double dn(double v) {
  if (std::isinf(v)) return v;
  return v - (std::fabs(v) * 1e-13 + 1e-300);
}
inline double up(double v) {
  if (std::isinf(v)) return v;
  return v + (std::fabs(v) * 1e-13 + 1e-300);
}
inline double lg_dn(double v) { return v <= 0 ? -kInf : dn(std::log2(v)); }
inline double lg_up(double v) { return v <= 0 ? -kInf : up(std::log2(v)); }
inline double ex_dn(double v) { return v == -kInf ? 0.0 : dn(std::exp2(v)); }
inline double ex_up(double v) { return v == -kInf ? 0.0 : up(std::exp2(v)); }

// Signed real in level form.
struct SLog {
  int level = 0;
  int sign = 1;  // only meaningful for level >= 1
  double lo = 0, hi = 0;

  static SLog plain(double lo, double hi) { return norm(SLog{0, 1, dn(lo), up(hi)}); }

  static SLog norm(SLog s) {
    for (;;) {
      if (s.level == 0) {
        if (std::max(std::fabs(s.lo), std::fabs(s.hi)) <= kLift) return s;
        if (s.lo > 0) {
          s = SLog{1, 1, lg_dn(s.lo), lg_up(s.hi)};
        } else if (s.hi < 0) {
          s = SLog{1, -1, lg_dn(-s.hi), lg_up(-s.lo)};
        } else {
          throw Undecidable("sign of a huge interval is unknown");
        }
        continue;
      }
      if (s.hi < kLower) {
        double a = ex_dn(s.lo), b = ex_up(s.hi);
        if (s.level == 1) {
          s = s.sign > 0 ? SLog{0, 1, a, b} : SLog{0, 1, -b, -a};
        } else {
          s = SLog{s.level - 1, s.sign, a, b};
        }
        continue;
      }
      return s;
    }
  }

  bool positive() const { return level > 0 ? sign > 0 : lo > 0; }
  bool negative() const { return level > 0 ? sign < 0 : hi < 0; }

  SLog neg() const {
    if (level == 0) return SLog{0, 1, -hi, -lo};
    return SLog{level, -sign, lo, hi};
  }
};

// |s| lifted to level m >= max(level, 1); returns x interval with |s| = E_m(x).
inline std::pair<double, double> lift_abs(const SLog& s, int m) {
  double lo, hi;
  int lvl;
  if (s.level == 0) {
    double a = std::fabs(s.lo), b = std::fabs(s.hi);
    lo = (s.lo <= 0 && s.hi >= 0) ? 0.0 : std::min(a, b);
    hi = std::max(a, b);
    lvl = 0;
  } else {
    lo = s.lo;
    hi = s.hi;
    lvl = s.level;
  }
  while (lvl < m) {
    lo = lg_dn(lo);
    hi = lg_up(hi);
    ++lvl;
  }
  return {lo, hi};
}

// Sign: -1, 0 (interval straddles zero), +1.
inline int definite_sign(const SLog& s) {
  if (s.positive()) return 1;
  if (s.negative()) return -1;
  return 0;
}

// -1 / +1 when decided, throws otherwise.
inline int compare(const SLog& a, const SLog& b) {
  if (a.level == 0 && b.level == 0) {
    if (a.hi < b.lo) return -1;
    if (a.lo > b.hi) return 1;
    throw Undecidable("interval comparison is undecidable");
  }
  int sa = definite_sign(a), sb = definite_sign(b);
  if (sa != 0 && sb != 0 && sa != sb) return sa < sb ? -1 : 1;
  int m = std::max(std::max(a.level, b.level), 1);
  // One operand may straddle zero only at level 0, where it is dominated.
  if (sa == 0) return sb > 0 ? -1 : 1;
  if (sb == 0) return sa > 0 ? 1 : -1;
  auto [alo, ahi] = lift_abs(a, m);
  auto [blo, bhi] = lift_abs(b, m);
  int mag;
  if (ahi < blo) mag = -1;
  else if (alo > bhi) mag = 1;
  else throw Undecidable("tower comparison is undecidable");
  return sa > 0 ? mag : -mag;
}

inline SLog add(const SLog& a, const SLog& b) {
  if (a.level == 0 && b.level == 0) return SLog::plain(a.lo + b.lo, a.hi + b.hi);
  // Dominant operand is the one at the higher level, or the larger when equal.
  int m = std::max(a.level, b.level);
  auto [alo, ahi] = lift_abs(a, m);
  auto [blo, bhi] = lift_abs(b, m);
  const SLog* D = &a;
  const SLog* O = &b;
  double dlo = alo, dhi = ahi, ohi = bhi;
  if (bhi > ahi) {
    D = &b;
    O = &a;
    dlo = blo;
    dhi = bhi;
    ohi = ahi;
  }
  int sd = definite_sign(*D);
  if (sd == 0) throw Undecidable("dominant addend has unknown sign");
  int so = definite_sign(*O);
  if (m == 1) {
    // log2(|D| +- |O|) = x_D + log2(1 +- 2^(x_O - x_D)).
    double up_shift = std::log2(1 + std::exp2(ohi - dhi));
    double lo, hi;
    if (so == sd) {
      lo = dlo;
      hi = dhi + up_shift;
    } else {
      double r = ohi - dlo;
      if (!(r < -1e-9)) throw Undecidable("near cancellation in tower sum");
      lo = dlo + std::log2(1 - std::exp2(r));
      hi = so == 0 ? dhi + up_shift : dhi;
    }
    return SLog::norm(SLog{1, sd, dn(lo), up(hi)});
  }
  // m >= 2: arguments are >= ~990, so doubling or halving moves x by far less than 1e-9.
  if (so != sd && !(ohi < dlo - 1e-6)) throw Undecidable("near cancellation in tower sum");
  return SLog::norm(SLog{m, sd, dlo - 1e-9, dhi + 1e-9});
}

inline SLog sub(const SLog& a, const SLog& b) { return add(a, b.neg()); }

// log2 |s|
inline SLog lg_abs(const SLog& s) {
  if (s.level == 0) {
    auto [lo, hi] = lift_abs(s, 0);
    return SLog::norm(SLog{0, 1, lg_dn(lo), lg_up(hi)});
  }
  if (s.level == 1) return SLog::norm(SLog{0, 1, s.lo, s.hi});
  return SLog::norm(SLog{s.level - 1, 1, s.lo, s.hi});
}

// 2^s
inline SLog ex2(const SLog& s) {
  if (s.level == 0) {
    if (s.hi <= kLower) return SLog::norm(SLog{0, 1, ex_dn(s.lo), ex_up(s.hi)});
    if (s.lo > 0) return SLog::norm(SLog{1, 1, s.lo, s.hi});
    return SLog::norm(SLog{1, 1, -kInf, s.hi});
  }
  if (s.sign > 0) return SLog::norm(SLog{s.level + 1, 1, s.lo, s.hi});
  // 2^(-huge) is a positive number indistinguishable from 0 here.
  return SLog{0, 1, 0.0, 1e-300};
}

inline SLog mul(const SLog& a, const SLog& b) {
  if (a.level == 0 && b.level == 0) {
    double c[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
    double lo = *std::min_element(c, c + 4), hi = *std::max_element(c, c + 4);
    if (std::isfinite(lo) && std::isfinite(hi) && std::max(std::fabs(lo), std::fabs(hi)) <= kLift)
      return SLog::plain(lo, hi);
  }
  int sa = definite_sign(a), sb = definite_sign(b);
  if (sa == 0 || sb == 0) throw Undecidable("product sign is unknown");
  SLog r = ex2(add(lg_abs(a), lg_abs(b)));
  return sa * sb > 0 ? r : r.neg();
}

inline SLog slog_of(const Scalar& q) {
  if (q <= 0) throw std::domain_error("logarithm of a non-positive rational");
  long en = 0, ed = 0;
  double mn = mpz_get_d_2exp(&en, q.get_num_mpz_t());
  double md = mpz_get_d_2exp(&ed, q.get_den_mpz_t());
  double v = static_cast<double>(en - ed) + std::log2(mn) - std::log2(md);
  double slack = 1e-12 * (std::fabs(v) + 1);
  return SLog{0, 1, v - slack, v + slack};
}

}  // namespace detail

class Magnitude {
 public:
  Magnitude() : exact_(Scalar(1)) {}
  Magnitude(const Scalar& q) : exact_(q) {  // NOLINT(runtime/explicit)
    if (q <= 0) throw std::domain_error("magnitude must be positive");
  }
  Magnitude(long v) : Magnitude(Scalar(v)) {}  // NOLINT(runtime/explicit)

  static Magnitude from_log2(detail::SLog l) {
    Magnitude m;
    m.exact_.reset();
    m.log2_ = detail::SLog::norm(l);
    return m;
  }

  bool is_exact() const { return exact_.has_value(); }
  const Scalar& exact() const {
    if (!exact_) throw std::logic_error("magnitude is not exactly representable");
    return *exact_;
  }

  detail::SLog log2() const { return exact_ ? detail::slog_of(*exact_) : log2_; }

  friend Magnitude operator*(const Magnitude& a, const Magnitude& b) {
    if (a.exact_ && b.exact_ && bit_size(*a.exact_) + bit_size(*b.exact_) < detail::kExactBits)
      return Magnitude(*a.exact_ * *b.exact_);
    return from_log2(detail::add(a.log2(), b.log2()));
  }

  Magnitude reciprocal() const {
    if (exact_) return Magnitude(1 / *exact_);
    return from_log2(log2_.neg());
  }

  friend Magnitude operator/(const Magnitude& a, const Magnitude& b) { return a * b.reciprocal(); }

  friend Magnitude operator+(const Magnitude& a, const Magnitude& b) {
    if (a.exact_ && b.exact_) return Magnitude(*a.exact_ + *b.exact_);
    // log2(2^x + 2^y) = max + log2(1 + 2^(min - max)) in [max, max + 1]
    detail::SLog la = a.log2(), lb = b.log2();
    if (la.level == 0 && lb.level == 0) {
      auto f = [](double x, double y) {
        double m = std::max(x, y);
        return m + std::log2(1 + std::exp2(std::min(x, y) - m));
      };
      return from_log2(detail::SLog::plain(f(la.lo, lb.lo), f(la.hi, lb.hi)));
    }
    detail::SLog d;
    try {
      d = detail::compare(la, lb) > 0 ? la : lb;
    } catch (const Undecidable&) {
      // Unordered: log2(a+b) still lies in [max of lower ends, max of upper ends + 1].
      if (detail::definite_sign(la) <= 0 || detail::definite_sign(lb) <= 0) throw;
      const int m = std::max({la.level, lb.level, 1});
      auto [alo, ahi] = detail::lift_abs(la, m);
      auto [blo, bhi] = detail::lift_abs(lb, m);
      d = detail::SLog{m, 1, std::max(alo, blo), std::max(ahi, bhi)};
    }
    return from_log2(detail::add(d, detail::SLog{0, 1, 0.0, 1.0}));
  }

  /// Integer powers. Exact when the result stays small.
  friend Magnitude pow(const Magnitude& a, unsigned long e) {
    if (a.exact_ && bit_size(*a.exact_) * static_cast<double>(e) < detail::kExactBits)
      return Magnitude(hcpack::pow(*a.exact_, e));
    return from_log2(detail::mul(a.log2(), detail::SLog::plain(static_cast<double>(e), static_cast<double>(e))));
  }

  friend Magnitude pow(const Magnitude& a, const Magnitude& e) {
    if (e.exact_ && e.exact_->get_den() == 1 && e.exact_->get_num().fits_ulong_p())
      return pow(a, e.exact_->get_num().get_ui());
    // log2(a^e) = e * log2(a); e itself is 2^(log2 e).
    return from_log2(detail::mul(a.log2(), detail::ex2(e.log2())));
  }

  /// -1, 0, 1; throws Undecidable when the certified intervals overlap.
  friend int compare(const Magnitude& a, const Magnitude& b) {
    if (a.exact_ && b.exact_) return *a.exact_ < *b.exact_ ? -1 : (*b.exact_ < *a.exact_ ? 1 : 0);
    return detail::compare(a.log2(), b.log2());
  }
  friend bool operator<(const Magnitude& a, const Magnitude& b) { return compare(a, b) < 0; }
  friend bool operator>(const Magnitude& a, const Magnitude& b) { return compare(a, b) > 0; }
  friend bool operator<=(const Magnitude& a, const Magnitude& b) { return compare(a, b) <= 0; }
  friend bool operator>=(const Magnitude& a, const Magnitude& b) { return compare(a, b) >= 0; }

  /// Approximate log2 as text, e.g. "2^2^(1.1e3)".
  std::string describe() const {
    if (exact_) return to_string(*exact_);
    return "2^" + describe_log(log2_);
  }

 private:
  static std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
  }
  static std::string describe_log(const detail::SLog& s) {
    if (s.level == 0) return "(" + num(0.5 * (s.lo + s.hi)) + ")";
    std::string out = s.sign < 0 ? "-" : "";
    for (int i = 0; i < s.level; ++i) out += "2^";
    double mid = std::isinf(s.lo) ? s.hi : 0.5 * (s.lo + s.hi);
    return out + "(" + num(mid) + ")";
  }

  std::optional<Scalar> exact_;
  detail::SLog log2_;
};

}  // namespace hcpack
