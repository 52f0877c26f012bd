#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "optquad/boundary_sums.hpp"
#include "optquad/combinatorics.hpp"
#include "optquad/real.hpp"

namespace optquad {

/// Euler-Frobenius polynomial E_k: integer coefficients, ascending powers.
/// Palindromic (coeffs[j] == coeffs[degree-j]), E_k(1) == (k+1)!.
struct EulerFrobeniusPoly {
    unsigned degree = 0;
    std::vector<BigInt> coeffs; // size degree + 1
};

/// Construct E_k by expanding sum_i fd_zero(i, k+1) * (x-1)^{k+1-i}.
/// The i = 0 term vanishes (fd_zero(0, k+1) == 0 for k >= 0), so the result
/// has degree exactly k with unit leading and trailing coefficients.
inline EulerFrobeniusPoly euler_polynomial(unsigned k)
{
    EulerFrobeniusPoly p;
    p.degree = k;
    p.coeffs.assign(k + 1, BigInt(0));
    for (unsigned i = 1; i <= k + 1; ++i) {
        const BigInt w = fd_zero(i, k + 1);
        const unsigned d = k + 1 - i;
        for (unsigned j = 0; j <= d; ++j) {
            BigInt t = w * binomial(d, j);
            if ((d - j) % 2 == 1) t = -t;
            p.coeffs[j] += t;
        }
    }
    return p;
}

/// Exact palindromy test: the coefficient-level restatement of the
/// reciprocal identity E_k(x) = x^k E_k(1/x).
inline bool reciprocal_check(const EulerFrobeniusPoly& p)
{
    for (unsigned j = 0; j <= p.degree; ++j)
        if (p.coeffs[j] != p.coeffs[p.degree - j]) return false;
    return true;
}

/// den^degree * p(num/den), exact. Sign queries at rational points reduce to
/// the sign of this integer.
inline BigInt eval_scaled(const EulerFrobeniusPoly& p, const BigInt& num, const BigInt& den)
{
    BigInt acc = p.coeffs[p.degree];
    BigInt den_pow(1);
    for (unsigned j = p.degree; j-- > 0;) {
        den_pow *= den;
        acc = acc * num + p.coeffs[j] * den_pow;
    }
    return acc;
}

/// Open interval (lo, hi) with a sign change of the polynomial across it.
struct RootBracket {
    Rational lo;
    Rational hi;
};

/// The m-1 roots of E_{2m-2} inside (-1, 0), ascending. Alongside the
/// working-precision values, the exact dyadic bracket midpoints are kept:
/// the difference-weighted sums downstream cancel like (2m-2)! and are
/// accumulated in exact arithmetic over these.
struct RootSet {
    int m = 0;
    std::vector<real_t> roots;
    int precision_bits = 0;
    std::vector<DyadicValue> midpoints; // roots[k] == midpoints[k], exactly rounded
};

namespace detail {

// Sign of p at the dyadic point num / 2^k, exact.
inline int dyadic_sign(const EulerFrobeniusPoly& p, const BigInt& num, unsigned k)
{
    return eval_scaled(p, num, BigInt(1) << k).sign();
}

// Dyadic cell [a/2^k, (a+1)/2^k] with precomputed endpoint signs.
struct Cell {
    BigInt a;
    unsigned k;
    int sign_lo;
    int sign_hi;
};

} // namespace detail

/// Isolate the m-1 roots of E_{2m-2} in (-1, 0) by exact sign-change
/// bisection on a dyadic grid, then shrink each bracket below
/// 2^-precision_bits. Coefficient-space conditioning of these polynomials is
/// hopeless in floating point for larger m, hence the integer-only
/// evaluation. The only rational roots E could have are +-1 (unit constant
/// and leading coefficients), so dyadic grid points are never roots.
inline std::vector<RootBracket> unit_disk_root_brackets(int m, int precision_bits)
{
    if (m < 2 || m > 20) throw std::invalid_argument("unit_disk_roots: m must be in [2, 20]");
    if (precision_bits < 64 || precision_bits > 192)
        throw std::invalid_argument("unit_disk_roots: precision_bits must be in [64, 192]");

    const EulerFrobeniusPoly poly = euler_polynomial(2 * static_cast<unsigned>(m) - 2);
    const std::size_t wanted = static_cast<std::size_t>(m - 1);

    // Progressive subdivision of (-1, 0); every cell splits each round until
    // exactly m-1 cells carry a sign change. m-1 disjoint sign-change cells
    // account for all m-1 roots, so the remaining cells are root-free.
    std::vector<detail::Cell> cells;
    cells.push_back({BigInt(-1), 0, detail::dyadic_sign(poly, BigInt(-1), 0),
                     detail::dyadic_sign(poly, BigInt(0), 0)});
    auto change_count = [](const std::vector<detail::Cell>& cs) {
        std::size_t n = 0;
        for (const auto& c : cs) n += (c.sign_lo != c.sign_hi) ? 1 : 0;
        return n;
    };
    while (change_count(cells) != wanted) {
        if (cells.front().k >= 24)
            throw std::logic_error("unit_disk_roots: failed to isolate the expected root count");
        std::vector<detail::Cell> next;
        next.reserve(2 * cells.size());
        for (const auto& c : cells) {
            const BigInt mid = (c.a << 1) + 1;
            const int s = detail::dyadic_sign(poly, mid, c.k + 1);
            if (s == 0) throw std::logic_error("unit_disk_roots: exact rational root hit");
            next.push_back({c.a << 1, c.k + 1, c.sign_lo, s});
            next.push_back({mid, c.k + 1, s, c.sign_hi});
        }
        cells.swap(next);
    }

    // Shrink each sign-change bracket by midpoint bisection to width 2^-bits.
    std::vector<RootBracket> brackets;
    brackets.reserve(wanted);
    for (const auto& c : cells) {
        if (c.sign_lo == c.sign_hi) continue;
        BigInt lo = c.a;
        unsigned depth = c.k;
        int sign_lo = c.sign_lo;
        while (depth < static_cast<unsigned>(precision_bits)) {
            const BigInt mid = (lo << 1) + 1;
            const int s = detail::dyadic_sign(poly, mid, depth + 1);
            if (s == 0) throw std::logic_error("unit_disk_roots: exact rational root hit");
            lo <<= 1;
            ++depth;
            if (s == sign_lo) lo = mid; // root lies in the right half
        }
        const BigInt den = BigInt(1) << depth;
        brackets.push_back(RootBracket{Rational(lo, den), Rational(lo + 1, den)});
    }
    return brackets;
}

/// Bracket isolation plus conversion of bracket midpoints to working
/// precision. Roots come out ascending (most negative first); all k-indexed
/// sums downstream follow that order.
inline RootSet unit_disk_roots(int m, int precision_bits)
{
    const auto brackets = unit_disk_root_brackets(m, precision_bits);
    RootSet rs;
    rs.m = m;
    rs.precision_bits = precision_bits;
    rs.roots.reserve(brackets.size());
    rs.midpoints.reserve(brackets.size());
    for (const auto& b : brackets) {
        // brackets are [a/2^k, (a+1)/2^k], so the midpoint has an odd
        // numerator over 2^{k+1} and the reduced fraction is already dyadic
        using boost::multiprecision::denominator;
        using boost::multiprecision::numerator;
        const Rational mid = (b.lo + b.hi) / 2;
        const unsigned tbits = static_cast<unsigned>(boost::multiprecision::msb(denominator(mid)));
        rs.midpoints.push_back(DyadicValue{numerator(mid), tbits});
        rs.roots.push_back(to_real(mid));
    }
    return rs;
}

} // namespace optquad
