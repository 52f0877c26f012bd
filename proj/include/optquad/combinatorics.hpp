#pragma once

#include <mutex>
#include <stdexcept>
#include <vector>

#include "optquad/real.hpp"

namespace optquad {

/// Binomial coefficient C(n, k), exact; 0 when k > n.
inline BigInt binomial(unsigned n, unsigned k)
{
    if (k > n) return BigInt(0);
    if (k > n - k) k = n - k;
    BigInt r(1);
    for (unsigned i = 0; i < k; ++i) {
        r *= n - i;
        r /= i + 1; // exact: r equals C(n, i+1) after this step
    }
    return r;
}

/// base^exp over BigInt with the 0^0 == 1 convention.
inline BigInt ipow(unsigned long base, unsigned exp)
{
    if (exp == 0) return BigInt(1);
    return boost::multiprecision::pow(BigInt(base), exp);
}

/// Forward difference of order i of gamma^k taken at gamma = 0:
/// sum_{j=0}^{i} (-1)^{i-j} C(i,j) j^k. Exact; these values feed alternating
/// sums downstream and must not pass through floating point.
inline BigInt fd_zero(unsigned i, unsigned k)
{
    BigInt sum(0);
    for (unsigned j = 0; j <= i; ++j) {
        BigInt term = binomial(i, j) * ipow(j, k);
        if ((i - j) % 2 == 0)
            sum += term;
        else
            sum -= term;
    }
    return sum;
}

/// Bernoulli number B_n under the B_1 = -1/2 convention (the one that makes
/// the power-sum expansion below hold verbatim). Memoized; the cache is
/// internally synchronized so warm-up and concurrent reads are both safe.
inline Rational bernoulli(unsigned n)
{
    static std::mutex mu;
    static std::vector<Rational> cache{Rational(1)};
    std::lock_guard<std::mutex> lock(mu);
    while (cache.size() <= n) {
        const unsigned s = static_cast<unsigned>(cache.size());
        // sum_{k=0}^{s} C(s+1,k) B_k = 0, solved for B_s
        Rational acc(0);
        for (unsigned k = 0; k < s; ++k) acc += Rational(binomial(s + 1, k)) * cache[k];
        cache.push_back(-acc / Rational(s + 1));
    }
    return cache[n];
}

/// sum_{gamma=0}^{beta-1} gamma^k through the Bernoulli expansion
/// sum_{j=1}^{k+1} k! B_{k+1-j} / (j! (k+1-j)!) beta^j, exact.
inline Rational power_sum_bernoulli(unsigned beta, unsigned k)
{
    const BigInt k_fact = factorial_int(k);
    Rational sum(0);
    for (unsigned j = 1; j <= k + 1; ++j) {
        const Rational coeff(k_fact, factorial_int(j) * factorial_int(k + 1 - j));
        sum += coeff * bernoulli(k + 1 - j) * Rational(ipow(beta, j));
    }
    return sum;
}

/// Forward difference of order i of gamma^k at gamma = n, expanded over
/// fd_zero via the binomial shift identity. Exact.
inline BigInt fd_at(unsigned i, unsigned k, unsigned long n)
{
    BigInt sum(0);
    for (unsigned p = 0; p <= k; ++p) sum += binomial(k, p) * fd_zero(i, p) * ipow(n, k - p);
    return sum;
}

/// Closed form of sum_{gamma=0}^{n-1} q^gamma gamma^k:
/// head and tail sums over (q/(1-q))^i weighted by the finite differences of
/// gamma^k at 0 and at n. Rejects q = 1 (the 1/(1-q) pole).
template <typename Real>
Real geometric_power_sum(const Real& q, unsigned long n, unsigned k)
{
    if (q == Real(1)) throw std::invalid_argument("geometric_power_sum: q must not equal 1");
    const Real w = q / (Real(1) - q);
    Real head(0), tail(0);
    Real wi(1); // w^i
    for (unsigned i = 0; i <= k; ++i) {
        head += wi * static_cast<Real>(fd_zero(i, k));
        tail += wi * static_cast<Real>(fd_at(i, k, n));
        wi *= w;
    }
    return (head - pow_int(q, n) * tail) / (Real(1) - q);
}

} // namespace optquad
