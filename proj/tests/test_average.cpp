#include "doctest.h"

#include "polarlab/average.hpp"
#include "polarlab/behavior.hpp"
#include "oracles.hpp"

#include <cmath>
#include <vector>

using namespace polarlab;

TEST_CASE("gaussian binomial values and symmetry") {
    CHECK(std::exp2(gaussian_binomial_log2(0, 0)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::exp2(gaussian_binomial_log2(2, 1)) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(std::exp2(gaussian_binomial_log2(3, 1)) == doctest::Approx(7.0).epsilon(1e-12));
    CHECK(std::exp2(gaussian_binomial_log2(4, 2)) == doctest::Approx(35.0).epsilon(1e-12));
    CHECK(std::exp2(gaussian_binomial_log2(5, 2)) == doctest::Approx(155.0).epsilon(1e-12));
    for (int n = 1; n <= 10; ++n)
        for (int k = 0; k <= n; ++k)
            CHECK(gaussian_binomial_log2(n, k) ==
                  doctest::Approx(gaussian_binomial_log2(n, n - k)).epsilon(1e-12));
    // Matches the exact integer recurrence.
    for (int n = 1; n <= 16; ++n)
        for (int k = 0; k <= n; ++k) {
            double exact = static_cast<double>(oracles::gb_int(n, k).convert_to<double>());
            CHECK(gaussian_binomial_log2(n, k) ==
                  doctest::Approx(std::log2(exact)).epsilon(1e-12));
        }
}

TEST_CASE("conditional erasure probability, small closed forms") {
    // l = 2: one erasure leaves the first input lost for 2 of the 3 kept-column
    // choices and the second input lost for 1 of 3.
    CHECK(p_given_s(2, 0, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(p_given_s(2, 1, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    for (int l : {2, 5, 9}) {
        for (int i = 0; i < l; ++i) {
            CHECK(p_given_s(l, i, 0) == doctest::Approx(0.0).scale(1.0));
            CHECK(p_given_s(l, i, l) == doctest::Approx(1.0).epsilon(1e-14));
        }
    }
}

TEST_CASE("first input follows the one-subspace closed form") {
    // The first input is undecodable iff e_1 misses the kept-column span, a
    // uniform (l-s)-dimensional subspace: p = 1 - (2^(l-s)-1)/(2^l-1).
    for (int l : {2, 3, 6, 11, 20}) {
        for (int s = 0; s <= l; ++s) {
            double want =
                1.0 - (std::exp2(static_cast<double>(l - s)) - 1.0) / (std::exp2(static_cast<double>(l)) - 1.0);
            CHECK(p_given_s(l, 0, s) == doctest::Approx(want).epsilon(1e-12));
        }
    }
}

TEST_CASE("ensemble average over all invertible 2x2 kernels") {
    // Enumerate GL(2) exhaustively; the mean per-weight failure frequency must
    // equal the closed-form conditional probability.
    std::vector<Kernel> kernels;
    for (unsigned bits = 0; bits < 16; ++bits) {
        BitMatrix m(2, 2);
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) m.set(r, c, (bits >> (2 * r + c)) & 1);
        if (rank(m) == 2) kernels.emplace_back(m);
    }
    REQUIRE(kernels.size() == 6);
    for (int i = 0; i < 2; ++i)
        for (int s = 0; s <= 2; ++s) {
            double acc = 0.0;
            for (const Kernel& k : kernels) {
                PolarizationBehavior b = exact_behavior(k);
                acc += static_cast<double>(b.count(i, s)) / static_cast<double>(binom64(2, s));
            }
            CHECK(acc / 6.0 == doctest::Approx(p_given_s(2, i, s)).epsilon(1e-12));
        }
}

TEST_CASE("log-domain evaluation matches exact rational arithmetic") {
    for (int l : {3, 6, 9, 12}) {
        for (int i = 1; i <= l; ++i)
            for (int s = 0; s <= l; ++s) {
                double exact = oracles::p_given_s_exact(l, i, s).convert_to<double>();
                CHECK(std::abs(p_given_s(l, i - 1, s) - exact) <= 1e-12);
            }
    }
}

TEST_CASE("factored rational evaluation equals the per-factor one") {
    for (int l : {2, 5, 9, 12}) {
        for (int i = 1; i <= l; ++i)
            for (int s = 0; s <= l; ++s)
                CHECK(oracles::p_given_s_exact_fast(l, i, s) == oracles::p_given_s_exact(l, i, s));
    }
}

TEST_CASE("conditional probabilities sum to the erasure count") {
    for (int l : {2, 4, 8, 12}) {
        for (int s = 0; s <= l; ++s) {
            double sum = 0.0;
            for (int i = 0; i < l; ++i) sum += p_given_s(l, i, s);
            CHECK(sum == doctest::Approx(static_cast<double>(s)).epsilon(1e-10));
        }
    }
}

TEST_CASE("conditional probabilities are monotone in both arguments") {
    const int l = 10;
    auto table = p_given_s_table(l);
    REQUIRE(table.size() == static_cast<size_t>(l));
    for (int i = 0; i < l; ++i) {
        REQUIRE(table[i].size() == static_cast<size_t>(l + 1));
        for (int s = 0; s <= l; ++s)
            CHECK(table[i][s] == doctest::Approx(p_given_s(l, i, s)).epsilon(1e-14));
        // More erasures never help.
        for (int s = 0; s < l; ++s) CHECK(table[i][s] <= table[i][s + 1] + 1e-13);
    }
    // More known prefix inputs never hurt.
    for (int s = 0; s <= l; ++s)
        for (int i = 0; i + 1 < l; ++i) CHECK(table[i + 1][s] <= table[i][s] + 1e-13);
}

TEST_CASE("averaged polynomial values and conservation") {
    CHECK(avg_F(2, 0, 0.5) == doctest::Approx(7.0 / 12.0).epsilon(1e-13));
    CHECK(avg_F(2, 1, 0.5) == doctest::Approx(5.0 / 12.0).epsilon(1e-13));
    for (int i = 0; i < 2; ++i) {
        CHECK(avg_F(2, i, 0.0) == doctest::Approx(0.0).scale(1.0));
        CHECK(avg_F(2, i, 1.0) == doctest::Approx(1.0).epsilon(1e-13));
    }
    for (int l : {4, 8}) {
        for (double z : {0.1, 0.5, 0.83}) {
            double sum = 0.0;
            for (int i = 0; i < l; ++i) sum += avg_F(l, i, z);
            CHECK(sum == doctest::Approx(l * z).epsilon(1e-10));
        }
    }
}

TEST_CASE("interval bounds sandwich the exact probabilities") {
    using oracles::cpp_rational;
    for (int l : {4, 8, 12}) {
        for (int i = 1; i <= l; ++i)
            for (int s = 0; s <= l; ++s) {
                cpp_rational p = oracles::p_given_s_exact(l, i, s);
                CHECK(oracles::bound_lower_exact(i, s) <= p);
                CHECK(p <= oracles::bound_upper_exact(i, s));
                // The double-precision helpers agree with the rational forms.
                CHECK(bound_p_lower(i - 1, s) ==
                      doctest::Approx(oracles::bound_lower_exact(i, s).convert_to<double>()).epsilon(1e-14));
                CHECK(bound_p_upper(i - 1, s) ==
                      doctest::Approx(oracles::bound_upper_exact(i, s).convert_to<double>()).epsilon(1e-14));
            }
    }
    // Spot values: s - i = 2 (1-based i) gives 3/4; i - s - 1 = 2 gives 8/9.
    CHECK(bound_p_lower(0, 3) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(bound_p_lower(3, 2) == 0.0);
    CHECK(bound_p_upper(3, 1) == doctest::Approx(8.0 / 9.0).epsilon(1e-15));
    CHECK(bound_p_upper(1, 3) == 1.0);
}

TEST_CASE("window function hand values") {
    CHECK(g_of_delta(8, 1.0) == 9);
    CHECK(g_of_delta(4, 2.0) == 11);
    CHECK(g_of_delta(64, 1.0) == 14);
}

TEST_CASE("one-sided bounds apply only inside their windows and then hold") {
    BoundSpec spec;
    // Above the lower window the averaged polynomial is provably large.
    AvgBounds hi = bound_F(64, 7, 0.6, spec);
    CHECK(hi.lower_applicable);
    CHECK(hi.lower == doctest::Approx((63.0 / 64.0) * (63.0 / 64.0)).epsilon(1e-15));
    CHECK(avg_F(64, 7, 0.6) > hi.lower);
    CHECK_FALSE(hi.upper_applicable);

    // Below the upper window it is provably small.
    AvgBounds lo = bound_F(64, 59, 0.3, spec);
    CHECK(lo.upper_applicable);
    CHECK(lo.upper == doctest::Approx(2.0 / 64.0).epsilon(1e-15));
    CHECK(avg_F(64, 59, 0.3) < lo.upper);
    CHECK_FALSE(lo.lower_applicable);

    // In the middle neither side claims anything.
    AvgBounds mid = bound_F(16, 7, 0.5, spec);
    CHECK_FALSE(mid.lower_applicable);
    CHECK_FALSE(mid.upper_applicable);

    CHECK_THROWS_AS(bound_F(1, 0, 0.5, spec), std::invalid_argument);
    CHECK_THROWS_AS(bound_F(8, 8, 0.5, spec), std::invalid_argument);
}
