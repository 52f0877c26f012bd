#pragma once

#include <stdexcept>
#include <vector>

#include "optquad/formula.hpp"
#include "optquad/piecewise_poly.hpp"

namespace optquad {

enum class NormMethod { closed_form, quadratic_form, extremal_pairing };

/// Squared norm of the quadrature error functional on the order-m space.
struct ErrorNorm {
    int m = 0;
    int N = 0;
    real_t value_sq{};
    NormMethod method{};
};

// Tolerance on the polynomial reproduction conditions below which the
// quadratic-form and pairing routes are meaningful; they evaluate the norm
// only on the annihilator of degree-(m-1) polynomials.
inline constexpr double kMomentGate = 1e-10;

/// Closed-form route: the Bernoulli leading term plus the boundary-layer
/// correction summed over the roots. The difference sums run over exact
/// dyadic arithmetic (they cancel like (2m)! otherwise).
inline ErrorNorm norm_sq_closed(const SystemSolution& sol, const RootSet& roots)
{
    const int m = sol.m;
    const unsigned two_m = 2 * static_cast<unsigned>(m);
    const real_t h = real_t(1) / sol.N;
    const real_t h2m = pow_int(h, two_m);

    // sum_k (1 - q^N) sum_i (d_k q^i + (-1)^i p_k q) / (1-q)^{i+1} fd(i, 2m)
    real_t correction(0);
    for (std::size_t k = 0; k < roots.roots.size(); ++k) {
        const BoundaryKernel kernel(roots.midpoints[k]);
        const real_t damp =
            1 - pow_int(roots.roots[k], static_cast<unsigned long>(sol.N));
        correction += damp * (sol.d[k] * kernel.sum(two_m, +1, 0, 1) +
                              sol.p[k] * kernel.sum(two_m, -1, 1, 0));
    }

    real_t bracket = to_real(bernoulli(two_m)) * h2m / factorial_real(two_m);
    bracket += h2m * h / factorial_real(two_m) * correction;

    ErrorNorm out;
    out.m = m;
    out.N = sol.N;
    out.value_sq = (m % 2 == 0) ? -bracket : bracket; // (-1)^{m+1}
    out.method = NormMethod::closed_form;
    return out;
}

/// Quadratic-form route: the norm expanded over the coefficients alone.
/// Every integral appears through its closed-form antiderivative, so the
/// route agreement tolerances reflect rounding only.
inline ErrorNorm norm_sq_direct(const QuadratureFormula& f)
{
    using std::abs;
    if (max_moment_residual(f) > real_t(kMomentGate))
        throw std::invalid_argument(
            "norm_sq_direct: formula violates the polynomial reproduction conditions");

    const int m = f.m;
    const int N = f.N;
    const unsigned two_m = 2 * static_cast<unsigned>(m);

    real_t bracket = f.A * f.B / factorial_real(two_m - 3);
    bracket -= (f.A - f.B) / factorial_real(two_m - 1);

    const real_t fact_2m2 = factorial_real(two_m - 2);
    const real_t fact_2m = factorial_real(two_m);
    for (int beta = 0; beta <= N; ++beta) {
        const real_t t = f.h * beta;
        const real_t c = f.C[static_cast<std::size_t>(beta)];
        bracket += c * (f.A * pow_int(t, two_m - 2) - f.B * pow_int(t - 1, two_m - 2)) / fact_2m2;
        bracket += c * (pow_int(t, two_m) + pow_int(1 - t, two_m)) / fact_2m;
    }

    const real_t half_fact_2m1 = 2 * factorial_real(two_m - 1);
    for (int beta = 0; beta <= N; ++beta)
        for (int gamma = 0; gamma <= N; ++gamma) {
            const real_t gap = abs(f.h * beta - f.h * gamma);
            bracket -= f.C[static_cast<std::size_t>(beta)] *
                       f.C[static_cast<std::size_t>(gamma)] * pow_int(gap, two_m - 1) /
                       half_fact_2m1;
        }

    bracket -= real_t(1) / factorial_real(two_m + 1);

    ErrorNorm out;
    out.m = m;
    out.N = N;
    out.value_sq = (m % 2 == 0) ? -bracket : bracket;
    out.method = NormMethod::quadratic_form;
    return out;
}

/// Riesz representer of the error functional, stored as an explicit
/// piecewise polynomial with breakpoints at the N+1 nodes. Pieces have
/// degree 2m (the interval-indicator convolution contributes
/// [x^{2m} + (1-x)^{2m}] / (2 (2m)!)); the polynomial summand of the
/// representer is taken identically zero, which leaves the pairing value
/// unchanged on the annihilator.
struct ExtremalSpline {
    int m = 0;
    int N = 0;
    PiecewisePoly<real_t> psi;
};

inline ExtremalSpline build_extremal(const QuadratureFormula& f)
{
    if (max_moment_residual(f) > real_t(kMomentGate))
        throw std::invalid_argument(
            "build_extremal: formula violates the polynomial reproduction conditions");

    const int m = f.m;
    const int N = f.N;
    const unsigned two_m = 2 * static_cast<unsigned>(m);
    const std::size_t deg = two_m; // per-piece degree

    // Piece-independent part:
    //   [x^{2m} + (1-x)^{2m}] / (2 (2m)!)  +  A x^{2m-2} / (2 (2m-2)!)
    //   - B (x-1)^{2m-2} / (2 (2m-2)!)
    std::vector<real_t> base(deg + 1, real_t(0));
    {
        const real_t inv_2fact2m = real_t(1) / (2 * factorial_real(two_m));
        base[two_m] += inv_2fact2m;
        for (unsigned l = 0; l <= two_m; ++l) {
            real_t t = to_real(binomial(two_m, l)) * inv_2fact2m;
            if (l % 2 == 1) t = -t;
            base[l] += t; // (1-x)^{2m} expansion
        }
        const real_t inv_2fact2m2 = real_t(1) / (2 * factorial_real(two_m - 2));
        base[two_m - 2] += f.A * inv_2fact2m2;
        for (unsigned l = 0; l <= two_m - 2; ++l) {
            real_t t = to_real(binomial(two_m - 2, l)) * inv_2fact2m2;
            if ((two_m - 2 - l) % 2 == 1) t = -t;
            base[l] -= f.B * t; // (x-1)^{2m-2} expansion
        }
    }

    ExtremalSpline spline;
    spline.m = m;
    spline.N = N;
    spline.psi.breaks.resize(static_cast<std::size_t>(N) + 1);
    for (int beta = 0; beta <= N; ++beta)
        spline.psi.breaks[static_cast<std::size_t>(beta)] = f.h * beta;
    spline.psi.coeffs.assign(static_cast<std::size_t>(N), base);

    // Node kernels: subtract C[g] |x - h g|^{2m-1} / (2 (2m-1)!), expanded
    // with the sign the piece sees.
    const real_t inv_2fact2m1 = real_t(1) / (2 * factorial_real(two_m - 1));
    for (std::size_t piece = 0; piece < spline.psi.coeffs.size(); ++piece) {
        auto& c = spline.psi.coeffs[piece];
        for (int gamma = 0; gamma <= N; ++gamma) {
            const real_t node = f.h * gamma;
            const real_t weight = f.C[static_cast<std::size_t>(gamma)] * inv_2fact2m1;
            const bool node_left = static_cast<std::size_t>(gamma) <= piece;
            for (unsigned l = 0; l <= two_m - 1; ++l) {
                real_t t = to_real(binomial(two_m - 1, l)) *
                           pow_int(-node, two_m - 1 - l) * weight;
                if (!node_left) t = -t;
                c[l] -= t;
            }
        }
        if (m % 2 == 1)
            for (auto& v : c) v = -v; // global (-1)^m factor
    }
    return spline;
}

/// Pairing of the error functional with the representer by exact piecewise
/// integration; endpoint derivatives are one-sided on the boundary pieces.
inline ErrorNorm pair_with_functional(const QuadratureFormula& f, const ExtremalSpline& spline)
{
    const auto& psi = spline.psi;
    real_t acc = psi.integral();
    for (int beta = 0; beta <= f.N; ++beta) {
        const std::size_t piece =
            (beta == f.N) ? psi.pieces() - 1 : static_cast<std::size_t>(beta);
        acc -= f.C[static_cast<std::size_t>(beta)] * psi.value_on_piece(piece, f.h * beta);
    }
    acc -= f.A * psi.derivative_on_piece(0, real_t(0), 1);
    acc -= f.B * psi.derivative_on_piece(psi.pieces() - 1, real_t(1), 1);

    ErrorNorm out;
    out.m = f.m;
    out.N = f.N;
    out.value_sq = acc;
    out.method = NormMethod::extremal_pairing;
    return out;
}

} // namespace optquad
