#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "optquad/boundary_sums.hpp"
#include "optquad/combinatorics.hpp"
#include "optquad/dense_solver.hpp"
#include "optquad/euler_frobenius.hpp"
#include "optquad/real.hpp"

namespace optquad {

/// The reduced 2(m-1) x 2(m-1) system for the boundary-layer amplitudes
/// d_k, p_k. Column order d_1..d_{m-1}, p_1..p_{m-1}; row order: the
/// Bernoulli-sourced difference equations for orders j = 2..m-1, the order
/// 2m-2 equation, then their mirrored counterparts in the same order.
struct SystemMatrix {
    int m = 0;
    int N = 0;
    std::size_t dim = 0;
    DenseMatrix<real_t> matrix{0};
    std::vector<real_t> rhs;
};

struct SystemSolution {
    int m = 0;
    int N = 0;
    std::vector<real_t> d;
    std::vector<real_t> p;
    real_t residual_norm{};
    real_t growth_factor{}; // elimination diagnostic, surfaced by the CLI
};

namespace detail {

inline std::vector<BoundaryKernel> kernels_for(const RootSet& roots)
{
    std::vector<BoundaryKernel> ks;
    ks.reserve(roots.midpoints.size());
    for (const auto& mid : roots.midpoints) ks.emplace_back(mid);
    return ks;
}

} // namespace detail

/// Assemble the reduced system from the isolated roots. The i-sums run to
/// the full printed upper limits (j or 2m-2) and are accumulated exactly
/// over the dyadic roots before the single rounding to working precision;
/// the finite differences reach (2m-2)!, which no floating accumulation of
/// the alternating terms survives at higher orders.
inline SystemMatrix assemble(int m, int N, const RootSet& roots)
{
    if (m < 2) throw std::invalid_argument("assemble: m must be >= 2");
    if (N < 2) throw std::invalid_argument("assemble: N must be >= 2");
    if (roots.m != m || roots.roots.size() != static_cast<std::size_t>(m - 1) ||
        roots.midpoints.size() != roots.roots.size())
        throw std::invalid_argument("assemble: root set does not match m");

    const std::size_t half = static_cast<std::size_t>(m - 1);
    const unsigned long nn = static_cast<unsigned long>(N);
    SystemMatrix sys;
    sys.m = m;
    sys.N = N;
    sys.dim = 2 * half;
    sys.matrix = DenseMatrix<real_t>(sys.dim);
    sys.rhs.assign(sys.dim, real_t(0));

    const auto kernels = detail::kernels_for(roots);

    // difference orders: j = 2..m-1 (Bernoulli right-hand sides), then 2m-2
    std::vector<unsigned> orders;
    for (int j = 2; j <= m - 1; ++j) orders.push_back(static_cast<unsigned>(j));
    orders.push_back(2 * static_cast<unsigned>(m) - 2);

    std::size_t row = 0;
    for (std::size_t idx = 0; idx < orders.size(); ++idx, ++row) {
        const unsigned j = orders[idx];
        const bool top_order = (idx + 1 == orders.size());
        for (std::size_t k = 0; k < half; ++k) {
            // d_k q + p_k q^{N+i} (-1)^{i+1}, over (q-1)^{i+1}
            sys.matrix(row, k) = -kernels[k].sum(j, -1, 1, 0);
            sys.matrix(row, half + k) = kernels[k].sum(j, +1, nn, 1);
        }
        sys.rhs[row] = top_order ? real_t(0) : to_real(bernoulli(j + 1)) / real_t(j + 1);
    }
    for (std::size_t idx = 0; idx < orders.size(); ++idx, ++row) {
        const unsigned j = orders[idx];
        const bool top_order = (idx + 1 == orders.size());
        for (std::size_t k = 0; k < half; ++k) {
            const real_t q = roots.roots[k];
            if (!top_order) {
                // (1 - q^N) [ (-1)^{i+1} d_k q^i - p_k q ], over (q-1)^{i+1}
                const real_t damp = 1 - pow_int(q, nn);
                sys.matrix(row, k) = damp * kernels[k].sum(j, +1, 0, 1);
                sys.matrix(row, half + k) = damp * kernels[k].sum(j, -1, 1, 0);
            } else {
                // (-1)^{i+1} d_k q^{N+i} + p_k q, over (q-1)^{i+1}
                sys.matrix(row, k) = kernels[k].sum(j, +1, nn, 1);
                sys.matrix(row, half + k) = -kernels[k].sum(j, -1, 1, 0);
            }
        }
        sys.rhs[row] = real_t(0);
    }
    return sys;
}

/// Dense solve of the assembled system; splits the unknown vector back into
/// the d and p amplitude lists.
inline SystemSolution solve(const SystemMatrix& sys)
{
    // The equilibrated pivots genuinely shrink with the order (clustered
    // roots make the system Vandermonde-like): ~4e-12 at m = 12 down to
    // ~3e-30 at m = 20. Those directions are q_k-suppressed in every
    // observable, so the floor sits at the quad elimination-noise boundary;
    // exactly singular systems still land well below it.
    SolveStats<real_t> stats;
    const std::vector<real_t> x = solve_dense(sys.matrix, sys.rhs, &stats, 1e-31);
    const std::size_t half = static_cast<std::size_t>(sys.m - 1);
    SystemSolution sol;
    sol.m = sys.m;
    sol.N = sys.N;
    sol.d.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(half));
    sol.p.assign(x.begin() + static_cast<std::ptrdiff_t>(half), x.end());
    sol.residual_norm = stats.residual_norm;
    sol.growth_factor = stats.growth_factor;
    return sol;
}

/// Z_p = sum_k sum_{i=0}^{p} (d_k q_k^{N+i} + p_k q_k (-1)^{i+1})
///       / (1-q_k)^{i+1} * fd_zero(i, p).
/// After a solve, Z_{j-1} = B_j / j holds for j = 3..m; Z_{2m-2} = 0 restates
/// the last equation of the system.
inline real_t z_p(const SystemSolution& sol, const RootSet& roots, unsigned p)
{
    if (roots.m != sol.m) throw std::invalid_argument("z_p: root set does not match solution");
    if (p > 2 * static_cast<unsigned>(sol.m)) throw std::invalid_argument("z_p: p must be <= 2m");
    const unsigned long nn = static_cast<unsigned long>(sol.N);
    const auto kernels = detail::kernels_for(roots);
    real_t total(0);
    for (std::size_t k = 0; k < kernels.size(); ++k)
        total += sol.d[k] * kernels[k].sum(p, +1, nn, 1) -
                 sol.p[k] * kernels[k].sum(p, -1, 1, 0);
    return total;
}

} // namespace optquad
