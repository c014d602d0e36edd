#pragma once

#include <gmpxx.h>

#include <string>

namespace lagpath {

// Exact rational, always kept in lowest terms with a positive denominator.
using BigRational = mpq_class;
using BigInteger = mpz_class;

inline BigRational make_rational(long num, long den = 1) {
  BigRational q{BigInteger(num), BigInteger(den)};
  q.canonicalize();
  return q;
}

inline BigInteger factorial_int(unsigned n) {
  BigInteger r;
  mpz_fac_ui(r.get_mpz_t(), n);
  return r;
}

inline BigRational factorial(unsigned n) { return BigRational(factorial_int(n)); }

// Product of odd integers m, m-2, ... down to 1; empty product (m <= 0) is 1.
inline BigInteger double_factorial(long m) {
  BigInteger r = 1;
  for (long i = m; i > 1; i -= 2) r *= i;
  return r;
}

inline BigRational pow(const BigRational& base, unsigned e) {
  BigRational r = 1;
  BigRational b = base;
  while (e != 0) {
    if (e & 1U) r *= b;
    e >>= 1U;
    if (e != 0) b *= b;
  }
  return r;
}

inline BigRational neg_one_pow(long e) { return (e % 2 == 0) ? BigRational(1) : BigRational(-1); }

inline std::string to_string(const BigRational& q) { return q.get_str(); }

}  // namespace lagpath
