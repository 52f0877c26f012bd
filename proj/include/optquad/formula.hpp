#pragma once

#include <stdexcept>
#include <vector>

#include "optquad/optimal_system.hpp"

namespace optquad {

/// The deliverable object: node weights C[0..N] on the grid x = h*beta plus
/// the endpoint-derivative weights A (at 0) and B (at 1). Dense storage so
/// the formula is serializable and applicable without the roots.
struct QuadratureFormula {
    int m = 0;
    int N = 0;
    real_t h{};
    std::vector<real_t> C;
    real_t A{};
    real_t B{};
};

/// Everything the construction produces; the CLI and the norm routes need
/// the amplitudes and roots alongside the weights.
struct Construction {
    RootSet roots;
    SystemSolution solution;
    QuadratureFormula formula;
};

/// Interior weight h (1 + sum_k (d_k q_k^beta + p_k q_k^{N-beta})).
inline real_t interior_weight(const SystemSolution& sol, const RootSet& roots, int beta)
{
    if (beta < 1 || beta > sol.N - 1)
        throw std::invalid_argument("interior_weight: beta must be in [1, N-1]");
    real_t acc(1);
    for (std::size_t k = 0; k < roots.roots.size(); ++k) {
        const real_t q = roots.roots[k];
        acc += sol.d[k] * pow_int(q, static_cast<unsigned long>(beta)) +
               sol.p[k] * pow_int(q, static_cast<unsigned long>(sol.N - beta));
    }
    return acc / real_t(sol.N);
}

constexpr int kDefaultPrecisionBits = 128;

/// Full pipeline: isolate roots, assemble and solve the amplitude system,
/// then evaluate the closed-form weights.
inline Construction construct(int m, int N, int precision_bits = kDefaultPrecisionBits)
{
    if (N < 2) throw std::invalid_argument("construct: N must be >= 2");
    Construction out;
    out.roots = unit_disk_roots(m, precision_bits); // validates m and precision_bits
    out.solution = solve(assemble(m, N, out.roots));

    QuadratureFormula& f = out.formula;
    f.m = m;
    f.N = N;
    f.h = real_t(1) / N;
    f.C.assign(static_cast<std::size_t>(N) + 1, real_t(0));

    real_t c0_sum(0), cN_sum(0), a_sum(0), b_sum(0);
    for (std::size_t k = 0; k + 1 < static_cast<std::size_t>(m); ++k) {
        const real_t q = out.roots.roots[k];
        const real_t qN = pow_int(q, static_cast<unsigned long>(N));
        const real_t d = out.solution.d[k];
        const real_t p = out.solution.p[k];
        const real_t one_minus_q = 1 - q;
        c0_sum += (p * qN - d * q) / one_minus_q;
        cN_sum += (d * qN - p * q) / one_minus_q;
        a_sum += (d * q + p * qN * q) / (one_minus_q * one_minus_q);
        b_sum += (d * qN * q + p * q) / (one_minus_q * one_minus_q);
    }
    f.C[0] = f.h * (real_t(1) / 2 + c0_sum);
    f.C[static_cast<std::size_t>(N)] = f.h * (real_t(1) / 2 + cN_sum);
    for (int beta = 1; beta <= N - 1; ++beta)
        f.C[static_cast<std::size_t>(beta)] = interior_weight(out.solution, out.roots, beta);
    f.A = f.h * f.h * (real_t(1) / 12 - a_sum);
    f.B = f.h * f.h * (real_t(-1) / 12 + b_sum);
    return out;
}

inline QuadratureFormula build(int m, int N, int precision_bits = kDefaultPrecisionBits)
{
    return construct(m, N, precision_bits).formula;
}

/// Deviations in the polynomial reproduction conditions, one entry per
/// degree alpha = 0..m-1: sum_b C[b] (h b)^alpha (+ A + B for alpha = 1,
/// + alpha B for alpha >= 2) minus 1/(alpha+1).
inline std::vector<real_t> moment_residuals(const QuadratureFormula& f)
{
    std::vector<real_t> res;
    res.reserve(static_cast<std::size_t>(f.m));
    for (int alpha = 0; alpha < f.m; ++alpha) {
        real_t s(0);
        for (int beta = 0; beta <= f.N; ++beta)
            s += f.C[static_cast<std::size_t>(beta)] *
                 pow_int(f.h * beta, static_cast<unsigned long>(alpha));
        if (alpha == 1) s += f.A + f.B;
        if (alpha >= 2) s += real_t(alpha) * f.B;
        res.push_back(s - real_t(1) / (alpha + 1));
    }
    return res;
}

inline real_t max_moment_residual(const QuadratureFormula& f)
{
    using std::abs;
    real_t worst(0);
    for (const real_t& r : moment_residuals(f))
        if (abs(r) > worst) worst = abs(r);
    return worst;
}

} // namespace optquad
