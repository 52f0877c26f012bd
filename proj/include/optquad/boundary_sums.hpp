#pragma once

#include <map>
#include <vector>

#include "optquad/combinatorics.hpp"
#include "optquad/real.hpp"

namespace optquad {

/// Exact dyadic rational num / 2^bits; the root isolator produces these.
struct DyadicValue {
    BigInt num;
    unsigned bits = 0;
};

namespace detail {

// Big integer split into a quad mantissa and a power-of-two exponent, so
// integers far beyond the quad exponent range convert without overflow.
struct ScaledReal {
    real_t mantissa{};
    long exp2 = 0;
};

inline ScaledReal to_scaled(const BigInt& x)
{
    if (x.is_zero()) return {real_t(0), 0};
    const BigInt mag = abs(x);
    const unsigned long bits = boost::multiprecision::msb(mag) + 1;
    if (bits <= 16000) return {to_real(x), 0};
    const unsigned long shift = bits - 256;
    BigInt top = mag >> shift;
    if (x.sign() < 0) top = -top;
    return {to_real(top), static_cast<long>(shift)};
}

} // namespace detail

/// Difference-weighted boundary sums at one root, accumulated in exact
/// integer arithmetic:
///
///   sum(J, s, c, e) = sum_{i=0}^{J} s^i q^{c+e*i} fd_zero(i, J) / (1-q)^{i+1}
///
/// The finite differences grow like J! and the terms alternate, so a
/// floating-point accumulation loses about as many digits as J! has; done
/// exactly over the dyadic root and rounded once, every sum is correct to
/// working precision for any supported order.
class BoundaryKernel {
public:
    explicit BoundaryKernel(DyadicValue q)
        : a_(std::move(q.num)), b_((BigInt(1) << q.bits) - a_), t_(q.bits)
    {
    }

    real_t sum(unsigned J, int s, unsigned long c, unsigned e) const
    {
        // common denominator 2^{t(c+eJ)} b^{J+1}; numerator term i carries
        // a^{c+ei} b^{J-i} 2^{t(i+1+e(J-i))}
        BigInt total(0);
        BigInt a_pow = pow_cached(a_, c, a_cache_); // a^{c+ei}, incremented below
        for (unsigned i = 0; i <= J; ++i) {
            const BigInt delta = fd_zero(i, J);
            if (!delta.is_zero()) {
                BigInt term = delta * a_pow * pow_cached(b_, J - i, b_cache_);
                term <<= static_cast<unsigned long>(t_) * (i + 1 + e * (J - i));
                if (s < 0 && (i % 2 == 1)) term = -term;
                total += term;
            }
            if (e != 0 && i < J) a_pow *= a_;
        }

        const detail::ScaledReal num = detail::to_scaled(total);
        const detail::ScaledReal den = detail::to_scaled(pow_cached(b_, J + 1, b_cache_));
        const long shift = num.exp2 - den.exp2 -
                           static_cast<long>(t_) * static_cast<long>(c + e * J);
        if (num.mantissa == real_t(0)) return real_t(0);
        if (shift < -40000) return real_t(0); // far below quad underflow
        return boost::multiprecision::ldexp(num.mantissa / den.mantissa,
                                            static_cast<int>(shift));
    }

    real_t value() const { return boost::multiprecision::ldexp(to_real(a_), -(int)t_); }

private:
    static const BigInt& pow_cached(const BigInt& base, unsigned long exp,
                                    std::map<unsigned long, BigInt>& cache)
    {
        auto it = cache.find(exp);
        if (it != cache.end()) return it->second;
        BigInt value;
        if (exp == 0)
            value = 1;
        else if (exp == 1)
            value = base;
        else {
            // square-and-multiply through the cache
            const BigInt& half = pow_cached(base, exp / 2, cache);
            value = half * half;
            if (exp % 2 == 1) value *= base;
        }
        return cache.emplace(exp, std::move(value)).first->second;
    }

    BigInt a_;
    BigInt b_; // 2^t - a, the exact numerator of 1 - q
    unsigned t_;
    mutable std::map<unsigned long, BigInt> a_cache_;
    mutable std::map<unsigned long, BigInt> b_cache_;
};

} // namespace optquad
