#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace optquad {

/// Piecewise polynomial on [breaks.front(), breaks.back()], one coefficient
/// list per piece in ascending powers of the global coordinate.
template <typename Real>
struct PiecewisePoly {
    std::vector<Real> breaks;              // ascending, size pieces() + 1
    std::vector<std::vector<Real>> coeffs; // per piece

    std::size_t pieces() const { return coeffs.size(); }

    /// Piece owning x; interior breakpoints resolve to the right piece.
    std::size_t piece_index(const Real& x) const
    {
        std::size_t lo = 0, hi = pieces() - 1;
        while (lo < hi) {
            const std::size_t mid = (lo + hi + 1) / 2;
            if (x >= breaks[mid])
                lo = mid;
            else
                hi = mid - 1;
        }
        return lo;
    }

    Real value_on_piece(std::size_t piece, const Real& x) const
    {
        const auto& c = coeffs[piece];
        Real acc(0);
        for (std::size_t j = c.size(); j-- > 0;) acc = acc * x + c[j];
        return acc;
    }

    /// One-sided derivative of the given order taken from the given piece.
    Real derivative_on_piece(std::size_t piece, const Real& x, unsigned order) const
    {
        const auto& c = coeffs[piece];
        if (order >= c.size()) return Real(0);
        Real acc(0);
        for (std::size_t j = c.size(); j-- > order;) {
            Real factor(1);
            for (unsigned t = 0; t < order; ++t) factor *= Real(j - t);
            acc = acc * x + c[j] * factor;
        }
        return acc;
    }

    Real value(const Real& x) const { return value_on_piece(piece_index(x), x); }

    /// Exact integral over the full support via per-piece antiderivatives.
    Real integral() const
    {
        Real total(0);
        for (std::size_t piece = 0; piece < pieces(); ++piece) {
            const auto& c = coeffs[piece];
            const Real a = breaks[piece];
            const Real b = breaks[piece + 1];
            Real pa(0), pb(0); // antiderivative at a and b, Horner form
            for (std::size_t j = c.size(); j-- > 0;) {
                pa = pa * a + c[j] / Real(j + 1);
                pb = pb * b + c[j] / Real(j + 1);
            }
            total += pb * b - pa * a;
        }
        return total;
    }
};

} // namespace optquad
