#include <catch2/catch_amalgamated.hpp>

#include <thread>
#include <vector>

#include "optquad/combinatorics.hpp"

#include "test_util.hpp"

using namespace optquad;
using optquad::testing::close_rel;

namespace {

// Independent oracle: Stirling numbers of the second kind by their triangle
// recurrence S(n,k) = k S(n-1,k) + S(n-1,k-1).
BigInt stirling2(unsigned n, unsigned k)
{
    if (n == 0 && k == 0) return 1;
    if (n == 0 || k == 0) return 0;
    std::vector<std::vector<BigInt>> s(n + 1, std::vector<BigInt>(k + 1, BigInt(0)));
    s[0][0] = 1;
    for (unsigned i = 1; i <= n; ++i)
        for (unsigned j = 1; j <= std::min(i, k); ++j)
            s[i][j] = BigInt(j) * s[i - 1][j] + s[i - 1][j - 1];
    return s[n][k];
}

// Independent oracle: multiplicative binomial over exact integers.
BigInt binomial_multiplicative(unsigned n, unsigned k)
{
    if (k > n) return 0;
    BigInt num(1), den(1);
    for (unsigned i = 0; i < k; ++i) {
        num *= n - i;
        den *= i + 1;
    }
    return num / den;
}

BigInt direct_power_sum(unsigned beta, unsigned k)
{
    BigInt s(0);
    for (unsigned g = 0; g < beta; ++g) s += ipow(g, k);
    return s;
}

} // namespace

TEST_CASE("binomial basics", "[combinatorics]")
{
    CHECK(binomial(5, 2) == 10);
    CHECK(binomial(7, 0) == 1);
    CHECK(binomial(3, 5) == 0);
    CHECK(binomial(40, 20) == BigInt("137846528820"));
    CHECK(binomial(40, 20) == binomial_multiplicative(40, 20));
    for (unsigned n = 0; n <= 25; ++n)
        for (unsigned k = 0; k <= n; ++k)
            CHECK(binomial(n, k) == binomial_multiplicative(n, k));
}

TEST_CASE("bernoulli numbers", "[combinatorics]")
{
    CHECK(bernoulli(0) == Rational(1));
    CHECK(bernoulli(1) == Rational(-1, 2));
    CHECK(bernoulli(2) == Rational(1, 6));
    CHECK(bernoulli(4) == Rational(-1, 30));
    CHECK(bernoulli(5) == Rational(0));
    CHECK(bernoulli(6) == Rational(1, 42));
    CHECK(bernoulli(8) == Rational(-1, 30));
    CHECK(bernoulli(12) == Rational(-691, 2730));
    for (unsigned n = 3; n <= 29; n += 2) CHECK(bernoulli(n) == Rational(0));
}

TEST_CASE("bernoulli cache is safe under concurrent cold reads", "[combinatorics]")
{
    std::vector<std::thread> workers;
    std::vector<Rational> results(8);
    for (unsigned t = 0; t < 8; ++t)
        workers.emplace_back([t, &results] { results[t] = bernoulli(40 + 2 * (t % 3)); });
    for (auto& w : workers) w.join();
    for (unsigned t = 0; t < 8; ++t) CHECK(results[t] == bernoulli(40 + 2 * (t % 3)));
}

TEST_CASE("finite differences at zero", "[combinatorics]")
{
    for (unsigned k = 1; k <= 12; ++k) CHECK(fd_zero(1, k) == 1);
    CHECK(fd_zero(3, 2) == 0);
    CHECK(fd_zero(2, 3) == 6);
    CHECK(fd_zero(0, 0) == 1);
    CHECK(fd_zero(0, 4) == 0);
}

TEST_CASE("fd_zero equals i! S2(k, i)", "[combinatorics]")
{
    for (unsigned i = 0; i <= 30; ++i)
        for (unsigned k = 0; k <= 30; ++k)
            CHECK(fd_zero(i, k) == factorial_int(i) * stirling2(k, i));
}

TEST_CASE("power sums via Bernoulli expansion", "[combinatorics]")
{
    CHECK(power_sum_bernoulli(1, 3) == Rational(0));
    CHECK(power_sum_bernoulli(4, 1) == Rational(6));
    CHECK(power_sum_bernoulli(10, 4) == Rational(15333));
    CHECK(direct_power_sum(10, 4) == 15333);
    for (unsigned beta = 0; beta <= 50; ++beta)
        for (unsigned k = 0; k <= 12; ++k)
            CHECK(power_sum_bernoulli(beta, k) == Rational(direct_power_sum(beta, k)));
}

TEST_CASE("geometric power sum closed form", "[combinatorics]")
{
    using std::abs;

    SECTION("plain geometric series at k = 0")
    {
        const real_t q = real_t(-7) / 10;
        for (unsigned n : {1u, 2u, 5u, 17u}) {
            const real_t expected = (1 - pow_int(q, n)) / (1 - q);
            CHECK(close_rel(geometric_power_sum(q, n, 0), expected, 1e-30));
        }
    }

    SECTION("single-term sum")
    {
        CHECK(abs(geometric_power_sum(real_t(1) / 2, 1, 3)) < real_t(1e-30));
    }

    SECTION("matches direct summation")
    {
        // Relative agreement measured against the absolute-value version of
        // the closed form: the sums alternate for q < 0, so that is the scale
        // rounding actually acts on. Quad arithmetic keeps the agreement many
        // digits below the 1e-13 requirement.
        const real_t qs[] = {real_t(-9) / 10, real_t(-1) / 2, real_t(-1) / 25,
                             real_t(-1) / 4};
        for (const real_t& q : qs)
            for (unsigned n : {1u, 2u, 6u, 13u, 50u, 100u})
                for (unsigned k = 0; k <= 10; ++k) {
                    real_t direct(0);
                    for (unsigned g = 0; g < n; ++g)
                        direct += pow_int(q, g) * to_real(ipow(g, k));
                    const real_t w = abs(q / (1 - q));
                    real_t scale(0);
                    for (unsigned i = 0; i <= k; ++i)
                        scale += pow_int(w, i) *
                                 (to_real(fd_zero(i, k)) +
                                  pow_int(abs(q), n) * to_real(fd_at(i, k, n)));
                    scale = (std::max)(scale / abs(1 - q), abs(direct));
                    const real_t closed = geometric_power_sum(q, n, k);
                    CAPTURE(optquad::testing::str(q), n, k);
                    CHECK(abs(closed - direct) <= real_t(1e-13) * scale);
                }
    }

    SECTION("rejects the pole")
    {
        CHECK_THROWS_AS(geometric_power_sum(real_t(1), 4, 2), std::invalid_argument);
    }
}
