#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "coag/kernel.hpp"

using namespace coag;

TEST_CASE("kernel families evaluate their closed forms") {
    CHECK(Kernel::constant()(0.3, 7.0) == 1.0);
    CHECK(Kernel::constant(2.5)(1.0, 1.0) == 2.5);
    CHECK(Kernel::additive()(2.0, 3.0) == 5.0);
    CHECK(Kernel::multiplicative()(2.0, 3.0) == 6.0);
    CHECK(Kernel::smoluchowski()(1.0, 1.0) == doctest::Approx(4.0));
    CHECK(Kernel::smoluchowski()(8.0, 1.0) ==
          doctest::Approx((2.0 + 1.0) * (0.5 + 1.0)));
    CHECK(Kernel::product(0.5)(4.0, 9.0) == doctest::Approx(1.0 / 6.0));
    CHECK(Kernel::granulation(1.0, 0.5)(1.0, 4.0) == doctest::Approx(2.5));
}

TEST_CASE("kernel argument and constructor validation") {
    CHECK_THROWS_AS(Kernel::constant()(0.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(Kernel::constant()(1.0, -2.0), std::domain_error);
    CHECK_THROWS_AS(Kernel::constant(-1.0), std::invalid_argument);
    CHECK_THROWS_AS(Kernel::product(0.0), std::invalid_argument);
    CHECK_THROWS_AS(Kernel::granulation(1.5, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(Kernel::granulation(1.0, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(Kernel::from_config("brownian", {}), std::invalid_argument);
}

TEST_CASE("truncated kernel uses strict open intervals") {
    Kernel k = Kernel::constant();
    TruncationParams cons{10.0, 1};
    TruncationParams open{10.0, 0};

    // both arguments must lie strictly inside (1/n, n)
    CHECK(eval_truncated(k, cons, 0.1, 1.0) == 0.0);
    CHECK(eval_truncated(k, cons, 1.0, 10.0) == 0.0);
    CHECK(eval_truncated(k, cons, 0.11, 1.0) == 1.0);
    CHECK(eval_truncated(k, open, 0.1, 1.0) == 0.0);

    // conservative mode also drops pairs whose merger reaches n
    CHECK(eval_truncated(k, cons, 5.0, 5.0) == 0.0);
    CHECK(eval_truncated(k, cons, 4.9, 5.0) == 1.0);
    CHECK(eval_truncated(k, open, 5.0, 5.0) == 1.0);
    CHECK(eval_truncated(k, open, 9.9, 9.9) == 1.0);

    CHECK_THROWS_AS(eval_truncated(k, {1.0, 1}, 0.5, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(eval_truncated(k, {10.0, 2}, 0.5, 0.5), std::invalid_argument);
}

TEST_CASE("growth hypothesis sampling") {
    SampleSpec spec;  // 100 log-spaced points on [1e-6, 1e6]

    SUBCASE("smoluchowski fits its declared envelope") {
        HypothesisReport rep = verify_hypotheses(Kernel::smoluchowski(), spec);
        CHECK(rep.symmetric);
        CHECK(rep.nonnegative);
        CHECK(rep.envelope_holds);
        // worst sampled ratio sits just below the (1,1) corner supremum of 4
        CHECK(rep.minimal_sampled_k == doctest::Approx(3.6446510244619539).epsilon(1e-12));
        CHECK(rep.minimal_sampled_k <= Kernel::smoluchowski().k_bound());
    }

    SUBCASE("multiplicative kernel violates the linear-growth regime") {
        Kernel k = Kernel::multiplicative();
        CHECK_FALSE(k.satisfies_growth());
        HypothesisReport rep = verify_hypotheses(k, spec);
        CHECK(rep.symmetric);
        CHECK_FALSE(rep.envelope_holds);
        CHECK(rep.minimal_sampled_k > k.k_bound());
    }

    SUBCASE("constant kernel is enveloped with its own value") {
        HypothesisReport rep = verify_hypotheses(Kernel::constant(3.0), spec);
        CHECK(rep.envelope_holds);
    }

    SUBCASE("degenerate sample specs are rejected") {
        CHECK_THROWS_AS(verify_hypotheses(Kernel::constant(), {1.0, 0.5, 100}),
                        std::invalid_argument);
        CHECK_THROWS_AS(verify_hypotheses(Kernel::constant(), {1.0, 2.0, 1}),
                        std::invalid_argument);
    }
}
