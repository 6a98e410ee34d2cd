#pragma once

// Exact rational scalar used for every coordinate, side length, profit and
// derived constant. Backed by GMP's mpq_class.

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hcpack {

using Scalar = mpq_class;
using BigInt = mpz_class;

/// n/d in lowest terms (the two-argument mpq constructor does not reduce).
inline Scalar frac(long n, long d) {
  Scalar q(n, d);
  q.canonicalize();
  return q;
}

/// Canonical "p/q" text (lowest terms, q > 0); integers print as "p".
inline std::string to_string(const Scalar& x) {
  Scalar c = x;
  c.canonicalize();
  if (c.get_den() == 1) return c.get_num().get_str();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

/// Parses "p/q", "p" or a plain decimal "0.25". Throws std::invalid_argument.
inline Scalar parse_scalar(std::string_view text) {
  std::string s(text);
  if (s.empty()) throw std::invalid_argument("empty rational");
  auto dot = s.find('.');
  Scalar out;
  try {
    if (dot != std::string::npos) {
      if (s.find('/') != std::string::npos) throw std::invalid_argument("mixed decimal/fraction");
      std::string digits = s.substr(0, dot) + s.substr(dot + 1);
      BigInt num(digits, 10);
      BigInt den = 1;
      for (std::size_t i = dot + 1; i < s.size(); ++i) den *= 10;
      out = Scalar(num, den);
    } else {
      out = Scalar(s, 10);
    }
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("malformed rational '" + s + "'");
  }
  if (out.get_den() == 0) throw std::invalid_argument("zero denominator in '" + s + "'");
  out.canonicalize();
  return out;
}

inline BigInt floor_int(const Scalar& x) {
  BigInt q;
  mpz_fdiv_q(q.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return q;
}

inline BigInt ceil_int(const Scalar& x) {
  BigInt q;
  mpz_cdiv_q(q.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return q;
}

/// Largest multiple of `unit` that is <= x.
inline Scalar round_down_to(const Scalar& x, const Scalar& unit) {
  return Scalar(floor_int(x / unit)) * unit;
}

/// Smallest multiple of `unit` that is >= x.
inline Scalar round_up_to(const Scalar& x, const Scalar& unit) {
  return Scalar(ceil_int(x / unit)) * unit;
}

inline Scalar pow(const Scalar& base, unsigned long exp) {
  Scalar r;
  mpz_pow_ui(r.get_num_mpz_t(), base.get_num_mpz_t(), exp);
  mpz_pow_ui(r.get_den_mpz_t(), base.get_den_mpz_t(), exp);
  r.canonicalize();
  return r;
}

inline BigInt pow(const BigInt& base, unsigned long exp) {
  BigInt r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), exp);
  return r;
}

/// Smallest integer n >= 0 with n^k >= x, for x >= 0 and k >= 1.
inline BigInt ceil_root(const Scalar& x, unsigned long k) {
  if (x <= 0) return 0;
  BigInt c = ceil_int(x);
  BigInt lo;
  mpz_root(lo.get_mpz_t(), c.get_mpz_t(), k);  // floor(c^(1/k))
  // The answer is lo or lo + 1 (c may overshoot x by < 1, roots are monotone).
  if (lo > 0 && Scalar(pow(BigInt(lo - 1), k)) >= x) --lo;
  while (Scalar(pow(lo, k)) < x) ++lo;
  while (lo > 0 && Scalar(pow(BigInt(lo - 1), k)) >= x) --lo;
  return lo;
}

/// Smallest n >= 0 with base^n <= target, for 0 < base < 1 and 0 < target.
inline unsigned long ceil_log(const Scalar& base, const Scalar& target) {
  if (!(base > 0 && base < 1)) throw std::invalid_argument("ceil_log: base must lie in (0,1)");
  if (target >= 1) return 0;
  Scalar acc = 1;
  unsigned long n = 0;
  while (acc > target) {
    acc *= base;
    ++n;
  }
  return n;
}

inline std::size_t bit_size(const Scalar& x) {
  return mpz_sizeinbase(x.get_num_mpz_t(), 2) + mpz_sizeinbase(x.get_den_mpz_t(), 2);
}

inline double to_double(const Scalar& x) { return x.get_d(); }

inline unsigned long to_ulong(const BigInt& x) {
  if (x < 0 || !x.fits_ulong_p()) throw std::overflow_error("integer does not fit unsigned long");
  return x.get_ui();
}

inline Scalar sum(const std::vector<Scalar>& xs) {
  Scalar s = 0;
  for (const auto& x : xs) s += x;
  return s;
}

}  // namespace hcpack
