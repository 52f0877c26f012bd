#pragma once

#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace optquad {

/// Raised when elimination meets a pivot below the underflow threshold.
/// For the systems built here this signals precision exhaustion, remedied by
/// raising precision_bits upstream, not a user error.
class SingularSystemError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Minimal row-major dense matrix.
template <typename Real>
struct DenseMatrix {
    std::size_t n = 0;
    std::vector<Real> a;

    explicit DenseMatrix(std::size_t dim = 0) : n(dim), a(dim * dim, Real(0)) {}

    Real& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
    const Real& operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

template <typename Real>
struct SolveStats {
    Real residual_norm{};  // max-norm of b - A x after refinement
    Real growth_factor{};  // max intermediate element over max initial element
};

namespace detail {

template <typename Real>
Real max_abs(const std::vector<Real>& v)
{
    using std::abs;
    Real m(0);
    for (const auto& x : v)
        if (abs(x) > m) m = abs(x);
    return m;
}

template <typename Real>
std::vector<Real> residual(const DenseMatrix<Real>& A, const std::vector<Real>& x,
                           const std::vector<Real>& b)
{
    std::vector<Real> r(b);
    for (std::size_t i = 0; i < A.n; ++i) {
        Real acc(0);
        for (std::size_t j = 0; j < A.n; ++j) acc += A(i, j) * x[j];
        r[i] -= acc;
    }
    return r;
}

} // namespace detail

/// Gaussian elimination with partial pivoting plus one step of iterative
/// refinement. Rows and columns are equilibrated to unit max-norm first: the
/// assembled systems mix difference orders and root magnitudes whose scales
/// differ by many decades, and only on the equilibrated matrix does a pivot
/// magnitude say anything about rank. Column scaling leaves the pivot
/// sequence and the arithmetic untouched (partial pivoting compares within a
/// column), so this changes no numerics, just the meaning of pivot_floor.
/// A pivot below pivot_floor raises SingularSystemError.
template <typename Real>
std::vector<Real> solve_dense(const DenseMatrix<Real>& A, const std::vector<Real>& b,
                              SolveStats<Real>* stats = nullptr,
                              double pivot_floor_rel = 1e-14)
{
    using std::abs;
    const std::size_t n = A.n;
    if (b.size() != n) throw std::invalid_argument("solve_dense: dimension mismatch");
    if (n == 0) return {};

    DenseMatrix<Real> lu = A;
    std::vector<Real> row_scale(n, Real(1));
    for (std::size_t i = 0; i < n; ++i) {
        Real row_max(0);
        for (std::size_t j = 0; j < n; ++j)
            if (abs(lu(i, j)) > row_max) row_max = abs(lu(i, j));
        if (row_max == Real(0)) throw SingularSystemError("singular system: zero row");
        row_scale[i] = row_max;
        for (std::size_t j = 0; j < n; ++j) lu(i, j) /= row_max;
    }
    std::vector<Real> col_scale(n, Real(1));
    for (std::size_t j = 0; j < n; ++j) {
        Real col_max(0);
        for (std::size_t i = 0; i < n; ++i)
            if (abs(lu(i, j)) > col_max) col_max = abs(lu(i, j));
        if (col_max == Real(0)) throw SingularSystemError("singular system: zero column");
        col_scale[j] = col_max;
        for (std::size_t i = 0; i < n; ++i) lu(i, j) /= col_max;
    }

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});

    const Real max_initial = detail::max_abs(lu.a); // 1 after equilibration
    Real max_during = max_initial;
    const Real pivot_floor = Real(pivot_floor_rel) * max_initial;

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (abs(lu(r, col)) > abs(lu(piv, col))) piv = r;
        if (abs(lu(piv, col)) < pivot_floor)
            throw SingularSystemError("singular system: pivot underflow at column " +
                                      std::to_string(col));
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(lu(piv, j), lu(col, j));
            std::swap(perm[piv], perm[col]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const Real f = lu(r, col) / lu(col, col);
            lu(r, col) = f; // store the multiplier in place
            for (std::size_t j = col + 1; j < n; ++j) {
                lu(r, j) -= f * lu(col, j);
                if (abs(lu(r, j)) > max_during) max_during = abs(lu(r, j));
            }
        }
    }

    auto lu_solve = [&](const std::vector<Real>& rhs) {
        std::vector<Real> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            Real acc = rhs[perm[i]] / row_scale[perm[i]];
            for (std::size_t j = 0; j < i; ++j) acc -= lu(i, j) * y[j];
            y[i] = acc;
        }
        for (std::size_t i = n; i-- > 0;) {
            Real acc = y[i];
            for (std::size_t j = i + 1; j < n; ++j) acc -= lu(i, j) * y[j];
            y[i] = acc / lu(i, i);
        }
        for (std::size_t i = 0; i < n; ++i) y[i] /= col_scale[i];
        return y;
    };

    std::vector<Real> x = lu_solve(b);

    // one refinement pass
    std::vector<Real> r = detail::residual(A, x, b);
    const std::vector<Real> dx = lu_solve(r);
    for (std::size_t i = 0; i < n; ++i) x[i] += dx[i];

    if (stats != nullptr) {
        // residual in row-equilibrated units: rows of the assembled systems
        // span many decades, and only the scaled residual is comparable to a
        // tolerance
        const std::vector<Real> r = detail::residual(A, x, b);
        Real scaled(0);
        for (std::size_t i = 0; i < n; ++i)
            if (abs(r[i]) / row_scale[i] > scaled) scaled = abs(r[i]) / row_scale[i];
        stats->residual_norm = scaled;
        stats->growth_factor = max_during / max_initial;
    }
    return x;
}

} // namespace optquad
