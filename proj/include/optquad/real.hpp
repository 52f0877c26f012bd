#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

namespace optquad {

// Working-precision scalar for the whole numeric pipeline. The quadratic-form
// norm route cancels roughly half of its digits for m around 6, and the dense
// saddle systems lose digits with growing N, so a 64-bit mantissa is not
// enough to hit 1e-8 cross-route agreement; 113 bits leaves ample headroom.
using real_t = boost::multiprecision::cpp_bin_float_quad;

// Exact integer / rational types carrying binomials, finite differences and
// Bernoulli numbers.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline real_t to_real(const BigInt& n) { return real_t(n); }

inline real_t to_real(const Rational& r)
{
    return real_t(boost::multiprecision::numerator(r)) /
           real_t(boost::multiprecision::denominator(r));
}

/// x^n by square-and-multiply; keeps the sign of negative x exact.
template <typename Real>
Real pow_int(Real x, unsigned long n)
{
    Real result(1);
    while (n != 0) {
        if (n & 1UL) result *= x;
        x *= x;
        n >>= 1;
    }
    return result;
}

inline BigInt factorial_int(unsigned n)
{
    BigInt f(1);
    for (unsigned i = 2; i <= n; ++i) f *= i;
    return f;
}

inline real_t factorial_real(unsigned n) { return to_real(factorial_int(n)); }

} // namespace optquad
