#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>

#include "vlfbec/bounds.hpp"
#include "vlfbec/sprt.hpp"

using namespace vlfbec;
using namespace vlfbec::sprt;
using Catch::Approx;

TEST_CASE("boundary variants at time zero", "[sprt]") {
    RngStream rng(1, 0);
    // The ratio starts on the lower boundary, so the variants that stop there
    // decide Q before the first sample, whatever the true hypothesis.
    for (BoundaryVariant v : {BoundaryVariant::closed, BoundaryVariant::open_upper}) {
        for (Hypothesis truth : {Hypothesis::p_true, Hypothesis::q_true}) {
            const SprtResult r = run_sprt(SprtSpec::single(3, v), truth, 0.5, rng);
            REQUIRE(r.tau == 0);
            REQUIRE(r.decision == Hypothesis::q_true);
        }
    }
}

TEST_CASE("open-lower test under P on a noiseless channel is deterministic", "[sprt]") {
    for (int m : {1, 3, 7}) {
        RngStream rng(2, m);
        const SprtResult r = run_sprt(SprtSpec::single(m, BoundaryVariant::open_lower),
                                      Hypothesis::p_true, 0.0, rng);
        REQUIRE(r.decision == Hypothesis::p_true);
        REQUIRE(r.tau == static_cast<std::uint64_t>(m));
        REQUIRE_FALSE(r.hit_minus_infinity);
    }
}

TEST_CASE("open-both with bound m equals open-lower with bound m+1", "[sprt]") {
    for (std::uint64_t stream = 0; stream < 1000; ++stream) {
        RngStream a(3, stream), b(3, stream);
        const SprtResult ra =
            run_sprt(SprtSpec::single(2, BoundaryVariant::open_both), Hypothesis::q_true, 0.5, a);
        const SprtResult rb =
            run_sprt(SprtSpec::single(3, BoundaryVariant::open_lower), Hypothesis::q_true, 0.5, b);
        REQUIRE(ra.tau == rb.tau);
        REQUIRE(ra.decision == rb.decision);
    }
}

TEST_CASE("the LLR never hits minus infinity under P", "[sprt]") {
    for (std::uint64_t stream = 0; stream < 10000; ++stream) {
        RngStream rng(4, stream);
        const SprtResult r = run_sprt(SprtSpec::single(4, BoundaryVariant::open_lower),
                                      Hypothesis::p_true, 0.6, rng);
        REQUIRE_FALSE(r.hit_minus_infinity);
        REQUIRE(r.decision == Hypothesis::p_true);
    }
}

TEST_CASE("operating characteristics of the workhorse test", "[sprt]") {
    const SprtSpec spec = SprtSpec::single(3, BoundaryVariant::open_lower);
    SECTION("m = 3, delta = 0.5") {
        const SprtOperatingPoint oc = sprt_operating_characteristics(spec, 0.5, 100000, 42, 2);
        CHECK(oc.p_correct_rate == 1.0);
        CHECK(std::abs(oc.q_correct_rate - 0.875) <= 3.0 * oc.q_correct_std_error);
        CHECK(std::abs(oc.mean_tau_p - 6.0) <= 3.0 * oc.std_error_tau_p);
    }
    SECTION("the Q power does not depend on delta") {
        for (double delta : {0.25, 0.5, 0.75}) {
            const SprtOperatingPoint oc = sprt_operating_characteristics(spec, delta, 100000, 43, 2);
            CHECK(std::abs(oc.q_correct_rate - 0.875) <= 3.0 * oc.q_correct_std_error);
        }
    }
    SECTION("m = 1 on a noiseless channel errs on the first fair bit") {
        const SprtOperatingPoint oc = sprt_operating_characteristics(
            SprtSpec::single(1, BoundaryVariant::open_lower), 0.0, 100000, 44, 2);
        CHECK(std::abs(oc.q_correct_rate - 0.5) <= 3.0 * oc.q_correct_std_error);
    }
    SECTION("mean samples under P scale as 1/(1 - delta)") {
        const SprtOperatingPoint at_half = sprt_operating_characteristics(spec, 0.5, 100000, 45, 2);
        const SprtOperatingPoint at_three_q = sprt_operating_characteristics(spec, 0.75, 100000, 46, 2);
        const double ratio = at_three_q.mean_tau_p / at_half.mean_tau_p;
        const double rel = std::sqrt(std::pow(at_three_q.std_error_tau_p / at_three_q.mean_tau_p, 2) +
                                     std::pow(at_half.std_error_tau_p / at_half.mean_tau_p, 2));
        CHECK(std::abs(ratio - 2.0) <= 3.0 * ratio * rel);
    }
}

TEST_CASE("negative-binomial route to the Q power", "[sprt]") {
    for (int m = 1; m <= 20; ++m) {
        for (double delta : {0.1, 0.5, 0.9}) {
            CHECK(beta_open_lower_negative_binomial(m, delta) ==
                  Approx(beta_open_lower_closed_form(m)).margin(1e-12));
        }
        CHECK(beta_open_lower_negative_binomial(m, 0.0) ==
              Approx(beta_open_lower_closed_form(m)).margin(1e-15));
    }
}

TEST_CASE("randomized variant selection", "[sprt]") {
    SprtSpec spec;
    spec.m = 3;
    spec.variant_weights = {0.5, 0.5, 0.0, 0.0};  // closed or open-lower
    int immediate = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        RngStream rng(5, static_cast<std::uint64_t>(i));
        if (run_sprt(spec, Hypothesis::p_true, 0.0, rng).tau == 0) ++immediate;
    }
    CHECK(std::abs(immediate - n / 2) < 3.0 * std::sqrt(n * 0.25));
}

TEST_CASE("specification validation", "[sprt]") {
    RngStream rng(6, 0);
    SprtSpec bad = SprtSpec::single(0, BoundaryVariant::open_lower);
    CHECK_THROWS_AS(run_sprt(bad, Hypothesis::p_true, 0.5, rng), std::invalid_argument);
    bad = SprtSpec::single(3, BoundaryVariant::open_lower);
    bad.variant_weights = {0.5, 0.6, 0.0, 0.0};
    CHECK_THROWS_AS(run_sprt(bad, Hypothesis::p_true, 0.5, rng), std::invalid_argument);
    bad.variant_weights = {-0.5, 1.5, 0.0, 0.0};
    CHECK_THROWS_AS(run_sprt(bad, Hypothesis::p_true, 0.5, rng), std::invalid_argument);
    CHECK_THROWS_AS(run_sprt(SprtSpec::single(3, BoundaryVariant::open_lower), Hypothesis::p_true,
                             1.0, rng),
                    std::invalid_argument);
}

TEST_CASE("the randomized-test solve reproduces the closed-form converse", "[sprt]") {
    SECTION("spot values") {
        CHECK(converse_from_sprt(8, 0.0, 0.5).blocklength == Approx(6.0).margin(1e-12));
        const SprtConverseSolution three = converse_from_sprt(3, 0.0, 0.0);
        CHECK(three.blocklength == Approx(5.0 / 3.0).margin(1e-12));
        CHECK(three.m_low == 1);
        CHECK(three.weight_low == Approx(1.0 / 3.0).margin(1e-12));
        CHECK(converse_from_sprt(2, 0.5, 0.0).blocklength == 0.0);
    }
    SECTION("equality with the direct formula across a grid") {
        for (std::uint64_t M : {2, 3, 4, 5, 8, 13, 64, 100, 1000, 4096}) {
            for (double eps : {0.0, 0.1, 0.25, 0.5}) {
                for (double delta : {0.0, 0.5, 0.9}) {
                    const double direct = bounds::conv_sprt(M, eps, delta).blocklength;
                    const double solved = converse_from_sprt(M, eps, delta).blocklength;
                    CHECK(solved == Approx(direct).margin(1e-12));
                }
            }
        }
    }
    SECTION("the mixture meets both power constraints with equality") {
        for (std::uint64_t M : {2, 3, 8, 100, 4096}) {
            for (double eps : {0.0, 0.1, 0.5}) {
                const SprtConverseSolution sol = converse_from_sprt(M, eps, 0.5);
                CHECK(sol.p_power == Approx(1.0 - eps).margin(1e-12));
                CHECK(sol.q_power == Approx(1.0 - 1.0 / static_cast<double>(M)).margin(1e-12));
                CHECK(sol.weight_low >= -1e-12);
                CHECK(sol.weight_low <= 1.0 + 1e-12);
            }
        }
    }
}
