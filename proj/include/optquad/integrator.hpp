#pragma once

#include <algorithm>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/math/constants/constants.hpp>

#include "optquad/error_norm.hpp"
#include "optquad/formula.hpp"

namespace optquad {

/// Integrand with analytically exact metadata. Endpoint derivatives and the
/// order-m seminorm are supplied in closed form; finite differences would
/// contaminate the h^2-sized endpoint corrections.
struct TestFunction {
    std::string name;
    std::function<real_t(const real_t&)> eval;
    std::function<real_t(const real_t&)> eval_deriv;
    real_t exact_integral{};
    std::function<real_t(int)> sobolev_seminorm; // m -> L2 norm of the m-th derivative
};

/// sum_b C[b] g(h b) + A g'(0) + B g'(1).
inline real_t apply(const QuadratureFormula& f, const TestFunction& g)
{
    real_t acc(0);
    for (int beta = 0; beta <= f.N; ++beta)
        acc += f.C[static_cast<std::size_t>(beta)] * g.eval(f.h * beta);
    acc += f.A * g.eval_deriv(real_t(0));
    acc += f.B * g.eval_deriv(real_t(1));
    return acc;
}

struct ErrorBound {
    real_t error{};
    real_t bound{};
    real_t ratio{};
};

/// Quadrature error against the exact integral, the functional-norm bound
/// ||l|| * ||g^{(m)}||, and their ratio. A zero bound (the degree <= m-1
/// polynomials) pairs with a zero error; the ratio is 0 there.
inline ErrorBound error_and_bound(const Construction& built, const TestFunction& g)
{
    using std::abs;
    using std::sqrt;
    if (!g.sobolev_seminorm)
        throw std::invalid_argument("error_and_bound: no seminorm registered for " + g.name);
    ErrorBound out;
    out.error = abs(g.exact_integral - apply(built.formula, g));
    const real_t norm = sqrt(norm_sq_closed(built.solution, built.roots).value_sq);
    out.bound = norm * g.sobolev_seminorm(built.formula.m);
    if (out.bound > real_t(0))
        out.ratio = out.error / out.bound;
    else
        out.ratio = (out.error <= real_t(1e-13)) ? real_t(0)
                                                 : std::numeric_limits<real_t>::infinity();
    return out;
}

struct SweepRow {
    int N = 0;
    real_t error{};
    real_t bound{};
    bool order_defined = false; // false on the first row and at rounding floor
    real_t observed_order{};
    int theoretical_order = 0; // the norm decays like h^m
};

/// Error/bound table over an ascending list of N, with observed convergence
/// order between consecutive rows. Steps whose errors sit at the rounding
/// floor carry no order (log of noise ratios is meaningless there).
inline std::vector<SweepRow> convergence_sweep(int m, const std::vector<int>& Ns,
                                               const TestFunction& g,
                                               int precision_bits = kDefaultPrecisionBits)
{
    using std::abs;
    using std::log;
    if (Ns.empty()) throw std::invalid_argument("convergence_sweep: empty N list");
    for (std::size_t i = 0; i < Ns.size(); ++i) {
        if (Ns[i] < 2) throw std::invalid_argument("convergence_sweep: every N must be >= 2");
        if (i > 0 && Ns[i] <= Ns[i - 1])
            throw std::invalid_argument("convergence_sweep: N list must be ascending");
    }

    const real_t floor = real_t(1e-28) * (std::max)(real_t(1), abs(g.exact_integral));
    std::vector<SweepRow> rows;
    rows.reserve(Ns.size());
    for (std::size_t i = 0; i < Ns.size(); ++i) {
        const Construction built = construct(m, Ns[i], precision_bits);
        const ErrorBound eb = error_and_bound(built, g);
        SweepRow row;
        row.N = Ns[i];
        row.error = eb.error;
        row.bound = eb.bound;
        row.theoretical_order = m;
        if (i > 0 && rows[i - 1].error > floor && eb.error > floor) {
            row.order_defined = true;
            row.observed_order = log(rows[i - 1].error / eb.error) /
                                 log(real_t(Ns[i]) / real_t(Ns[i - 1]));
        }
        rows.push_back(row);
    }
    return rows;
}

/// Built-in corpus. The "xm" entry is the degree-m monomial, so its shape
/// depends on the requested order.
inline std::optional<TestFunction> find_test_function(std::string_view name, int m)
{
    using boost::math::constants::pi;
    using std::exp;
    using std::log;
    using std::pow;
    using std::sin;
    using std::sqrt;

    auto monomial = [](const std::string& label, unsigned degree) {
        TestFunction g;
        g.name = label;
        g.eval = [degree](const real_t& x) { return pow_int(x, degree); };
        g.eval_deriv = [degree](const real_t& x) {
            return degree == 0 ? real_t(0) : real_t(degree) * pow_int(x, degree - 1);
        };
        g.exact_integral = real_t(1) / (degree + 1);
        g.sobolev_seminorm = [degree](int order) -> real_t {
            const unsigned mo = static_cast<unsigned>(order);
            if (mo > degree) return real_t(0);
            // || d^m/dx^m x^deg || = deg!/(deg-m)! * sqrt(1/(2(deg-m)+1))
            const real_t fall = factorial_real(degree) / factorial_real(degree - mo);
            return fall / sqrt(real_t(2 * (degree - mo) + 1));
        };
        return g;
    };

    if (name == "one") return monomial("one", 0);
    if (name == "x") return monomial("x", 1);
    if (name == "x2") return monomial("x2", 2);
    if (name == "x3") return monomial("x3", 3);
    if (name == "xm") return monomial("xm", static_cast<unsigned>(m));

    if (name == "expx") {
        TestFunction g;
        g.name = "expx";
        g.eval = [](const real_t& x) { return exp(x); };
        g.eval_deriv = [](const real_t& x) { return exp(x); };
        g.exact_integral = exp(real_t(1)) - 1;
        g.sobolev_seminorm = [](int) {
            return sqrt((exp(real_t(2)) - 1) / 2); // every derivative is exp
        };
        return g;
    }
    if (name == "sin2pix") {
        TestFunction g;
        g.name = "sin2pix";
        const real_t two_pi = 2 * pi<real_t>();
        g.eval = [two_pi](const real_t& x) { return sin(two_pi * x); };
        g.eval_deriv = [two_pi](const real_t& x) { return two_pi * cos(two_pi * x); };
        g.exact_integral = real_t(0);
        g.sobolev_seminorm = [two_pi](int order) {
            // the m-th derivative is (2 pi)^m times a unit sinusoid over a
            // full period, whose squared mean is 1/2
            return pow_int(two_pi, static_cast<unsigned>(order)) / sqrt(real_t(2));
        };
        return g;
    }
    if (name == "inv1px") {
        TestFunction g;
        g.name = "inv1px";
        g.eval = [](const real_t& x) { return 1 / (1 + x); };
        g.eval_deriv = [](const real_t& x) { return -1 / ((1 + x) * (1 + x)); };
        g.exact_integral = log(real_t(2));
        g.sobolev_seminorm = [](int order) {
            // m-th derivative is (-1)^m m! (1+x)^{-(m+1)}
            const unsigned mo = static_cast<unsigned>(order);
            const real_t tail = (1 - pow_int(real_t(1) / 2, 2 * mo + 1)) / (2 * mo + 1);
            return factorial_real(mo) * sqrt(tail);
        };
        return g;
    }
    return std::nullopt;
}

inline std::vector<std::string> test_function_names()
{
    return {"one", "x", "x2", "x3", "xm", "expx", "sin2pix", "inv1px"};
}

} // namespace optquad
