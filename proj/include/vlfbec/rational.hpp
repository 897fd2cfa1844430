#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace vlfbec {

/// Exact rational number. Backed by GMP so that inclusion-exclusion sums and
/// phase-type solves never lose precision, whatever the operand sizes.
using Rational = mpq_class;

/// 2^e as an exact rational, e may be negative.
inline Rational pow2_rational(long e) {
    mpz_class num = 1;
    if (e >= 0) {
        mpz_mul_2exp(num.get_mpz_t(), num.get_mpz_t(), static_cast<mp_bitcnt_t>(e));
        return Rational(num);
    }
    mpz_class den = 1;
    mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), static_cast<mp_bitcnt_t>(-e));
    Rational r(num, den);
    r.canonicalize();
    return r;
}

/// Largest f with 2^f <= x. Requires x > 0.
inline long floor_log2(const Rational& x) {
    if (sgn(x) <= 0) throw std::domain_error("floor_log2: argument must be positive");
    const long num_bits = static_cast<long>(mpz_sizeinbase(x.get_num().get_mpz_t(), 2));
    const long den_bits = static_cast<long>(mpz_sizeinbase(x.get_den().get_mpz_t(), 2));
    long f = num_bits - den_bits;
    while (cmp(x, pow2_rational(f)) < 0) --f;
    while (cmp(x, pow2_rational(f + 1)) >= 0) ++f;
    return f;
}

/// Exact conversion; every double is a dyadic rational.
inline Rational rational_from_double(double x) { return Rational(x); }

inline double to_double(const Rational& x) { return x.get_d(); }

/// "p/q", or just "p" when the denominator is 1.
inline std::string to_fraction_string(const Rational& x) {
    if (x.get_den() == 1) return x.get_num().get_str();
    return x.get_num().get_str() + "/" + x.get_den().get_str();
}

}  // namespace vlfbec
