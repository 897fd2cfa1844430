#include <catch2/catch_amalgamated.hpp>

#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

#include "vlfbec/bounds.hpp"
#include "vlfbec/schemes.hpp"

using namespace vlfbec;
using namespace vlfbec::schemes;
using Catch::Approx;

namespace {

SimConfig config(std::uint64_t M, double delta, std::uint64_t trials, std::uint64_t seed) {
    SimConfig cfg;
    cfg.message_count = M;
    cfg.delta = delta;
    cfg.trials = trials;
    cfg.seed = seed;
    cfg.workers = 2;
    return cfg;
}

bool within_3_sigma(const SimEstimate& est, double expected) {
    return std::abs(est.mean - expected) <= 3.0 * est.std_error;
}

}  // namespace

TEST_CASE("Huffman-repeat scheme matches its bound", "[schemes]") {
    SECTION("M = 8, delta = 0.5") {
        const SimEstimate est = simulate_vlf_huffman_repeat(config(8, 0.5, 200000, 42));
        CHECK(within_3_sigma(est, 6.0));
        CHECK(est.empirical_error == 0.0);
        CHECK(est.truncated == 0);
    }
    SECTION("M = 3 on a noiseless channel averages the Huffman length") {
        const SimEstimate est = simulate_vlf_huffman_repeat(config(3, 0.0, 200000, 1));
        CHECK(within_3_sigma(est, 5.0 / 3.0));
        CHECK(est.empirical_error == 0.0);
    }
    SECTION("M = 2 is a single repeated bit") {
        const SimEstimate est = simulate_vlf_huffman_repeat(config(2, 0.5, 200000, 2));
        CHECK(within_3_sigma(est, 2.0));
    }
    SECTION("message dropping realizes the target error probability") {
        SimConfig cfg = config(8, 0.5, 200000, 3);
        cfg.eps = 0.3;
        const SimEstimate est = simulate_vlf_huffman_repeat(cfg);
        CHECK(within_3_sigma(est, 0.7 * 6.0));
        const double expected_error = 0.3 * (1.0 - 1.0 / 8.0);
        CHECK(std::abs(est.empirical_error - expected_error) <= 3.0 * est.error_std_error());
    }
}

TEST_CASE("compatibility-set decoding is zero-error and matches the bounds", "[schemes]") {
    SECTION("linear fountain k = 3") {
        const SimEstimate est = simulate_vlsf(config(8, 0.5, 200000, 42), Ensemble::linear_fountain);
        CHECK(within_3_sigma(est, 47.0 / 6.0));
        CHECK(est.empirical_error == 0.0);
    }
    SECTION("iid codebook M = 2, noiseless: geometric first difference") {
        const SimEstimate est = simulate_vlsf(config(2, 0.0, 200000, 5), Ensemble::iid_bernoulli_half);
        CHECK(within_3_sigma(est, 2.0));
        CHECK(est.empirical_error == 0.0);
    }
    SECTION("iid ensemble mean is the bound itself") {
        const SimEstimate est = simulate_vlsf(config(8, 0.5, 200000, 6), Ensemble::iid_bernoulli_half);
        CHECK(within_3_sigma(est, bounds::vlsf_iid(8, 0.5).blocklength));
        CHECK(est.empirical_error == 0.0);
    }
    SECTION("balanced ensemble stays below its union-bound estimate") {
        const SimEstimate est = simulate_vlsf(config(8, 0.5, 200000, 7), Ensemble::balanced_columns);
        CHECK(est.mean - 3.0 * est.std_error <= bounds::vlsf_expurgated(8, 0.5).blocklength);
        CHECK(est.empirical_error == 0.0);
        const SimEstimate linear = simulate_vlsf(config(8, 0.5, 200000, 7), Ensemble::linear_fountain);
        CHECK(linear.mean - 3.0 * linear.std_error <= bounds::vlsf_expurgated(8, 0.5).blocklength);
    }
    SECTION("stop at time zero with probability eps") {
        SimConfig cfg = config(4, 0.5, 100000, 8);
        cfg.eps = 0.25;
        const SimEstimate est = simulate_vlsf(cfg, Ensemble::linear_fountain);
        CHECK(within_3_sigma(est, 0.75 * bounds::vlsf_linear(2, 0.5).blocklength));
        const double expected_error = 0.25 * (1.0 - 1.0 / 4.0);
        CHECK(std::abs(est.empirical_error - expected_error) <= 3.0 * est.error_std_error());
    }
}

TEST_CASE("truncation is reported, not absorbed", "[schemes]") {
    SimConfig cfg = config(2, 0.0, 50000, 9);
    cfg.cap = 1;  // an iid column separates two messages half the time
    const SimEstimate est = simulate_vlsf(cfg, Ensemble::iid_bernoulli_half);
    CHECK(est.trials + est.truncated == 50000);
    CHECK(est.mean == 1.0);  // every completed trial decided on the first use
    CHECK(std::abs(static_cast<double>(est.truncated) / 50000 - 0.5) < 0.01);
}

TEST_CASE("results do not depend on the worker count", "[schemes]") {
    SimConfig cfg = config(8, 0.5, 20000, 10);
    cfg.workers = 1;
    const SimEstimate serial = simulate_vlsf(cfg, Ensemble::linear_fountain);
    cfg.workers = 4;
    const SimEstimate parallel = simulate_vlsf(cfg, Ensemble::linear_fountain);
    CHECK(serial.mean == parallel.mean);
    CHECK(serial.std_error == parallel.std_error);
    CHECK(serial.trials == parallel.trials);
    CHECK(serial.truncated == parallel.truncated);
    CHECK(serial.empirical_error == parallel.empirical_error);

    const SimEstimate replay = simulate_vlsf(cfg, Ensemble::linear_fountain);
    CHECK(replay.mean == parallel.mean);
}

TEST_CASE("balanced column sampler", "[schemes]") {
    RngStream rng(11, 0);
    std::vector<std::uint64_t> col;
    std::vector<std::uint32_t> scratch;
    SECTION("weight is exact for every column") {
        for (std::uint64_t M : {2, 3, 4, 5, 8, 13, 64, 65, 100}) {
            col.assign((M + 63) / 64, 0);
            for (int i = 0; i < 200; ++i) {
                detail::fill_balanced_column(col, scratch, M, rng);
                std::uint64_t ones = 0;
                for (std::uint64_t w : col) ones += std::popcount(w);
                REQUIRE(M - ones == (M + 1) / 2);
            }
        }
    }
    SECTION("two fixed rows agree with probability 1/gamma") {
        for (std::uint64_t M : {4, 8, 16}) {
            col.assign((M + 63) / 64, 0);
            const double half_up = static_cast<double>((M + 1) / 2);
            const double gamma = 2.0 + 1.0 / (half_up - 1.0);
            const double p = 1.0 / gamma;
            const int n = 200000;
            int agree = 0;
            for (int i = 0; i < n; ++i) {
                detail::fill_balanced_column(col, scratch, M, rng);
                if (((col[0] >> 0) & 1) == ((col[0] >> 1) & 1)) ++agree;
            }
            const double expected = n * p;
            double chi2 = (agree - expected) * (agree - expected) / expected;
            chi2 += (n - agree - (n - expected)) * (n - agree - (n - expected)) / (n - expected);
            CHECK(chi2 < 10.83);  // df = 1, p = 0.001
        }
    }
}

TEST_CASE("adding messages never shortens the stopping time", "[schemes]") {
    // Reference stepper on explicit column patterns and erasure flags; the
    // 4-message codebook is the first four rows of the 8-message one.
    const auto tau_of = [](std::uint64_t M, std::uint64_t msg,
                           const std::vector<std::pair<std::uint32_t, bool>>& uses) -> std::uint64_t {
        std::uint32_t survivors = static_cast<std::uint32_t>((1u << M) - 1);
        std::uint64_t tau = 0;
        for (const auto& [pattern, erased] : uses) {
            ++tau;
            if (erased) continue;
            const std::uint32_t mask = ((pattern >> msg) & 1u) ? pattern : ~pattern;
            survivors &= mask & ((1u << M) - 1);
            if (std::popcount(survivors) == 1) return tau;
        }
        return ~std::uint64_t{0};
    };

    RngStream rng(12, 0);
    for (int trial = 0; trial < 2000; ++trial) {
        std::vector<std::pair<std::uint32_t, bool>> uses;
        for (int n = 0; n < 300; ++n)
            uses.emplace_back(static_cast<std::uint32_t>(rng.next_u64() & 0xFF), rng.uniform() < 0.5);
        const std::uint64_t msg = rng.below(4);
        const std::uint64_t tau_small = tau_of(4, msg, uses);
        const std::uint64_t tau_large = tau_of(8, msg, uses);
        REQUIRE(tau_small != ~std::uint64_t{0});
        REQUIRE(tau_large != ~std::uint64_t{0});
        REQUIRE(tau_small <= tau_large);
    }
}

TEST_CASE("Q-channel experiment decodes correctly with probability 1/M", "[schemes]") {
    for (std::uint64_t M : {2, 8}) {
        const QChannelEstimate est = simulate_q_channel_error(M, 0.5, 200000, 13, 100000, 2);
        const double expected = 1.0 / static_cast<double>(M);
        CHECK(std::abs(est.success_rate - expected) <= 3.0 * est.success_std_error);
        CHECK(est.blocklength.truncated == 0);
    }
    SECTION("the 1/M law has nothing to do with erasures") {
        const QChannelEstimate est = simulate_q_channel_error(8, 0.0, 200000, 14, 100000, 2);
        CHECK(std::abs(est.success_rate - 0.125) <= 3.0 * est.success_std_error);
    }
}

TEST_CASE("blocklength ratio follows Wald's identity", "[schemes]") {
    SECTION("delta = 0.75 doubles twice") {
        const WaldRatioEstimate est =
            wald_ratio_check(Ensemble::linear_fountain, 8, 0.75, 200000, 15, 100000, 2);
        CHECK(std::abs(est.ratio - 4.0) <= 3.0 * est.std_error);
    }
    SECTION("small delta stays near one") {
        const WaldRatioEstimate est =
            wald_ratio_check(Ensemble::linear_fountain, 8, 0.01, 200000, 16, 100000, 2);
        CHECK(std::abs(est.ratio - 1.0 / 0.99) <= 3.0 * est.std_error);
    }
    CHECK_THROWS_AS(wald_ratio_check(Ensemble::linear_fountain, 8, 0.0, 100, 0), std::invalid_argument);
}

TEST_CASE("configuration validation", "[schemes]") {
    CHECK_THROWS_AS(simulate_vlsf(config(6, 0.5, 10, 0), Ensemble::linear_fountain),
                    std::invalid_argument);
    CHECK_THROWS_AS(simulate_vlsf(config(std::uint64_t{1} << 21, 0.5, 10, 0), Ensemble::iid_bernoulli_half),
                    std::invalid_argument);
    SimConfig bad = config(8, 0.5, 0, 0);
    CHECK_THROWS_AS(simulate_vlf_huffman_repeat(bad), std::invalid_argument);
    bad = config(8, 0.5, 10, 0);
    bad.eps = 1.5;
    CHECK_THROWS_AS(simulate_vlf_huffman_repeat(bad), std::invalid_argument);
    bad = config(8, 1.0, 10, 0);
    CHECK_THROWS_AS(simulate_vlf_huffman_repeat(bad), std::invalid_argument);
    CHECK_THROWS_AS(simulate_q_channel_error(1, 0.5, 10, 0), std::invalid_argument);
}
