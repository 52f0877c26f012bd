#pragma once

#include <stdexcept>
#include <vector>

#include "optquad/dense_solver.hpp"
#include "optquad/error_norm.hpp"
#include "optquad/formula.hpp"

namespace optquad {

/// Dense ground-truth solve: the stationarity rows for every node weight and
/// endpoint weight plus the reproduction constraints, with the Lagrange
/// multipliers as explicit unknowns. Makes no use of the root structure, so
/// agreement with the closed-form pipeline is an independent check.
struct WienerHopfSolution {
    int m = 0;
    int N = 0;
    std::vector<real_t> C;
    real_t A{};
    real_t B{};
    std::vector<real_t> lambda; // lambda_0..lambda_{m-1}
    real_t residual_norm{};
    real_t growth_factor{};
    bool conditioning_flag = false; // growth factor above 1e6: raise precision
};

/// Assemble and solve the full (N+3+m)-dimensional system. Unknown order
/// C[0..N], A, B, lambda_0..lambda_{m-1}. The stationarity rows are scaled by
/// (2m-1)! so the kernel block and the constraint block have comparable
/// magnitudes; scaling rows leaves the solution untouched.
inline WienerHopfSolution solve_full(int m, int N)
{
    if (m < 2 || m > 20) throw std::invalid_argument("solve_full: m must be in [2, 20]");
    if (N < 1) throw std::invalid_argument("solve_full: N must be >= 1");
    if (N + 3 + m > 2000) throw std::invalid_argument("solve_full: dense budget exceeded");

    using std::abs;
    const unsigned two_m = 2 * static_cast<unsigned>(m);
    const std::size_t nodes = static_cast<std::size_t>(N) + 1;
    const std::size_t dim = nodes + 2 + static_cast<std::size_t>(m);
    const std::size_t col_A = nodes;
    const std::size_t col_B = nodes + 1;
    const std::size_t col_lambda = nodes + 2;
    const real_t h = real_t(1) / N;
    const real_t fact_2m1 = factorial_real(two_m - 1);

    DenseMatrix<real_t> M(dim);
    std::vector<real_t> rhs(dim, real_t(0));
    std::size_t row = 0;

    // Stationarity in each node weight, scaled by (2m-1)!:
    //   sum_g C[g] |hb - hg|^{2m-1} / 2
    //   - A (2m-1) (hb)^{2m-2} / 2 + B (2m-1) (hb-1)^{2m-2} / 2
    //   + (2m-1)! sum_a lambda_a (hb)^a
    //   = [(hb)^{2m} + (1-hb)^{2m}] / (4m)
    for (int beta = 0; beta <= N; ++beta, ++row) {
        const real_t t = h * beta;
        for (int gamma = 0; gamma <= N; ++gamma)
            M(row, static_cast<std::size_t>(gamma)) =
                pow_int(abs(t - h * gamma), two_m - 1) / 2;
        M(row, col_A) = -real_t(2 * m - 1) * pow_int(t, two_m - 2) / 2;
        M(row, col_B) = real_t(2 * m - 1) * pow_int(t - 1, two_m - 2) / 2;
        for (int alpha = 0; alpha < m; ++alpha)
            M(row, col_lambda + static_cast<std::size_t>(alpha)) =
                fact_2m1 * pow_int(t, static_cast<unsigned>(alpha));
        rhs[row] = (pow_int(t, two_m) + pow_int(1 - t, two_m)) / (4 * m);
    }

    // Stationarity in A.
    for (int gamma = 0; gamma <= N; ++gamma)
        M(row, static_cast<std::size_t>(gamma)) =
            pow_int(h * gamma, two_m - 2) / (2 * factorial_real(two_m - 2));
    M(row, col_B) = real_t(1) / (2 * factorial_real(two_m - 3));
    M(row, col_lambda + 1) = real_t(-1);
    rhs[row] = real_t(1) / (2 * fact_2m1);
    ++row;

    // Stationarity in B.
    for (int gamma = 0; gamma <= N; ++gamma)
        M(row, static_cast<std::size_t>(gamma)) =
            pow_int(h * gamma - 1, two_m - 2) / (2 * factorial_real(two_m - 2));
    M(row, col_A) = real_t(-1) / (2 * factorial_real(two_m - 3));
    for (int alpha = 1; alpha < m; ++alpha)
        M(row, col_lambda + static_cast<std::size_t>(alpha)) = real_t(alpha);
    rhs[row] = real_t(1) / (2 * fact_2m1);
    ++row;

    // Reproduction constraints, degrees 0..m-1.
    for (int gamma = 0; gamma <= N; ++gamma) M(row, static_cast<std::size_t>(gamma)) = 1;
    rhs[row] = 1;
    ++row;
    for (int gamma = 0; gamma <= N; ++gamma)
        M(row, static_cast<std::size_t>(gamma)) = h * gamma;
    M(row, col_A) = 1;
    M(row, col_B) = 1;
    rhs[row] = real_t(1) / 2;
    ++row;
    for (int alpha = 2; alpha < m; ++alpha, ++row) {
        for (int gamma = 0; gamma <= N; ++gamma)
            M(row, static_cast<std::size_t>(gamma)) =
                pow_int(h * gamma, static_cast<unsigned>(alpha));
        M(row, col_B) = real_t(alpha);
        rhs[row] = real_t(1) / (alpha + 1);
    }

    // The kernel block's trailing pivots shrink like h^{2m}; that is genuine
    // smooth-kernel conditioning, not rank deficiency, so the floor sits near
    // quad epsilon rather than at the amplitude-system default.
    SolveStats<real_t> stats;
    const std::vector<real_t> x = solve_dense(M, rhs, &stats, 1e-30);

    WienerHopfSolution sol;
    sol.m = m;
    sol.N = N;
    sol.C.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(nodes));
    sol.A = x[col_A];
    sol.B = x[col_B];
    sol.lambda.assign(x.begin() + static_cast<std::ptrdiff_t>(col_lambda), x.end());
    sol.residual_norm = stats.residual_norm;
    sol.growth_factor = stats.growth_factor;
    sol.conditioning_flag = stats.growth_factor > real_t(1e6);
    return sol;
}

/// View of the dense solution as a QuadratureFormula (for the moment checks
/// and the quadratic-form norm on the oracle route).
inline QuadratureFormula as_formula(const WienerHopfSolution& sol)
{
    QuadratureFormula f;
    f.m = sol.m;
    f.N = sol.N;
    f.h = real_t(1) / sol.N;
    f.C = sol.C;
    f.A = sol.A;
    f.B = sol.B;
    return f;
}

/// Closed-form Lagrange multiplier of index j recovered from the amplitudes
/// and the formula's weight moments; the j = 0 expression is a separate,
/// shorter formula.
inline real_t lambda_closed(const SystemSolution& sol, const RootSet& roots,
                            const QuadratureFormula& f, int j)
{
    if (j < 0 || j >= f.m) throw std::invalid_argument("lambda_closed: j must be in [0, m-1]");
    const int m = f.m;
    const unsigned two_m = 2 * static_cast<unsigned>(m);

    // weight moment sum_g C[g] (-hg)^{2m-1-j}
    const unsigned mom_order = two_m - 1 - static_cast<unsigned>(j);
    real_t moment(0);
    for (int gamma = 0; gamma <= f.N; ++gamma)
        moment += f.C[static_cast<std::size_t>(gamma)] * pow_int(-f.h * gamma, mom_order);

    if (j == 0)
        return real_t(1) / (2 * factorial_real(two_m)) +
               moment / (2 * factorial_real(two_m - 1)) -
               f.B / (2 * factorial_real(two_m - 2));

    const real_t sign_j = (j % 2 == 0) ? real_t(1) : real_t(-1);
    const real_t h_pow = pow_int(f.h, two_m - static_cast<unsigned>(j));

    // sum_k sum_i (-d_k q_k + p_k q_k^{N+i} (-1)^i) / (q_k-1)^{i+1} * fd,
    // accumulated exactly over the dyadic roots
    real_t amplitude_sum(0);
    for (std::size_t k = 0; k < roots.roots.size(); ++k) {
        const BoundaryKernel kernel(roots.midpoints[k]);
        amplitude_sum +=
            sol.d[k] * kernel.sum(mom_order, -1, 1, 0) -
            sol.p[k] * kernel.sum(mom_order, +1, static_cast<unsigned long>(f.N), 1);
    }

    real_t inner = sign_j / (2 * real_t(two_m - static_cast<unsigned>(j)));
    inner -= to_real(bernoulli(two_m - static_cast<unsigned>(j))) * h_pow /
             real_t(two_m - static_cast<unsigned>(j));
    inner -= h_pow * amplitude_sum;
    inner += moment / 2;
    inner -= real_t(mom_order) * f.B * sign_j / 2;
    return inner / (factorial_real(mom_order) * factorial_real(static_cast<unsigned>(j)));
}

} // namespace optquad
