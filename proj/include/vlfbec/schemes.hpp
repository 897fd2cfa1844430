#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "vlfbec/channel.hpp"
#include "vlfbec/ensembles.hpp"
#include "vlfbec/gf2.hpp"
#include "vlfbec/huffman.hpp"
#include "vlfbec/stats.hpp"

namespace vlfbec::schemes {

/// Parameters shared by every Monte Carlo run. eps is realized as the
/// stop-at-time-zero randomization: with probability eps the trial transmits
/// nothing and the decoder emits the fixed guess (message 0).
struct SimConfig {
    std::uint64_t message_count = 2;
    double delta = 0.5;
    double eps = 0.0;
    std::uint64_t trials = 1;
    std::uint64_t seed = 0;
    std::uint64_t cap = 100000;
    unsigned workers = 0;
};

namespace detail {

inline void validate(const SimConfig& cfg) {
    if (cfg.message_count < 2) throw std::invalid_argument("SimConfig: M must be >= 2");
    if (cfg.trials < 1) throw std::invalid_argument("SimConfig: trials must be >= 1");
    if (cfg.cap < 1) throw std::invalid_argument("SimConfig: cap must be >= 1");
    if (!(cfg.eps >= 0.0 && cfg.eps <= 1.0)) throw std::invalid_argument("SimConfig: eps must be in [0, 1]");
}

inline std::uint64_t tail_mask(std::uint64_t M) {
    return M % 64 == 0 ? ~std::uint64_t{0} : (std::uint64_t{1} << (M % 64)) - 1;
}

inline void fill_iid_column(std::vector<std::uint64_t>& col, std::uint64_t M, RngStream& rng) {
    for (std::uint64_t& w : col) w = rng.next_u64();
    col.back() &= tail_mask(M);
}

/// Column uniform over the M-bit vectors with exactly ceil(M/2) zeros.
inline void fill_balanced_column(std::vector<std::uint64_t>& col, std::vector<std::uint32_t>& scratch,
                                 std::uint64_t M, RngStream& rng) {
    const std::uint64_t zeros = (M + 1) / 2;
    for (std::uint64_t& w : col) w = ~std::uint64_t{0};
    col.back() &= tail_mask(M);
    scratch.resize(M);
    std::iota(scratch.begin(), scratch.end(), 0u);
    for (std::uint64_t j = 0; j < zeros; ++j) {
        const std::uint64_t r = j + rng.below(M - j);
        std::swap(scratch[j], scratch[r]);
        col[scratch[j] / 64] &= ~(std::uint64_t{1} << (scratch[j] % 64));
    }
    std::uint64_t ones = 0;
    for (std::uint64_t w : col) ones += std::popcount(w);
    if (M - ones != zeros) throw std::logic_error("balanced column sampler produced a wrong weight");
}

}  // namespace detail

/// Huffman-repeat scheme: map the message to its Huffman codeword and repeat
/// each bit until it comes through unerased. Mean blocklength estimates
/// (1 - eps) lstar(M) / (1 - delta).
inline SimEstimate simulate_vlf_huffman_repeat(const SimConfig& cfg) {
    detail::validate(cfg);
    const channel::ChannelSpec chan(cfg.delta);
    const huffman::PrefixCode code = huffman::equiprobable_code(cfg.message_count);

    TrialAccumulator acc = run_trials(cfg.trials, cfg.workers, [&](std::uint64_t trial, TrialAccumulator& out) {
        RngStream rng(cfg.seed, trial);
        const std::uint64_t msg = rng.below(cfg.message_count);
        if (rng.uniform() < cfg.eps) {
            out.add(0, msg != 0);  // stop signal at time zero, fixed guess
            return;
        }
        const auto [value, len] = huffman::encode(code, msg);
        huffman::PrefixDecoder dec(code);
        std::optional<std::uint64_t> decoded;
        std::uint64_t tau = 0;
        for (unsigned i = 0; i < len; ++i) {
            const int bit = (value >> (len - 1 - i)) & 1;
            for (;;) {
                if (tau == cfg.cap) {
                    out.add_truncated();
                    return;
                }
                const channel::Symbol s = channel::transmit(chan, bit, rng);
                ++tau;
                if (s != channel::Symbol::erasure) {
                    decoded = dec.push_bit(channel::symbol_bit(s));
                    break;
                }
            }
        }
        out.add(tau, !decoded || *decoded != msg);
    });
    return acc.estimate();
}

/// Compatibility-set decoding over a lazily generated codebook: transmit the
/// true message's bits, shrink the set of messages consistent with every
/// unerased reception, stop when exactly one remains (full rank for the
/// linear fountain). Zero-error by construction on non-truncated trials.
inline SimEstimate simulate_vlsf(const SimConfig& cfg, Ensemble ensemble) {
    detail::validate(cfg);
    const std::uint64_t M = cfg.message_count;
    unsigned k = 0;
    if (ensemble == Ensemble::linear_fountain) {
        if (!std::has_single_bit(M)) throw std::invalid_argument("linear fountain requires M = 2^k");
        k = static_cast<unsigned>(std::bit_width(M)) - 1;
        if (k > 62) throw std::invalid_argument("linear fountain: k must be <= 62");
    } else if (M > (std::uint64_t{1} << 20)) {
        throw std::invalid_argument("compatibility-set ensembles support M <= 2^20");
    }
    const channel::ChannelSpec chan(cfg.delta);

    TrialAccumulator acc = run_trials(cfg.trials, cfg.workers, [&](std::uint64_t trial, TrialAccumulator& out) {
        RngStream rng(cfg.seed, trial);
        const std::uint64_t msg = rng.below(M);
        if (rng.uniform() < cfg.eps) {
            out.add(0, msg != 0);
            return;
        }

        if (ensemble == Ensemble::linear_fountain) {
            const gf2::Gf2Vector x = gf2::Gf2Vector::from_uint(msg, k);
            gf2::Gf2Basis basis(k);
            std::uint64_t tau = 0;
            while (tau < cfg.cap) {
                const gf2::Gf2Vector col = gf2::sample_nonzero_vector(k, rng);
                const int bit = gf2::inner_product(x, col);
                const channel::Symbol s = channel::transmit(chan, bit, rng);
                ++tau;
                if (s == channel::Symbol::erasure) continue;
                basis.insert(col, channel::symbol_bit(s));
                if (basis.complete()) {
                    out.add(tau, basis.solution().to_uint() != msg);
                    return;
                }
            }
            out.add_truncated();
            return;
        }

        thread_local std::vector<std::uint64_t> survivors;
        thread_local std::vector<std::uint64_t> col;
        thread_local std::vector<std::uint32_t> scratch;
        const std::size_t words = static_cast<std::size_t>((M + 63) / 64);
        survivors.assign(words, ~std::uint64_t{0});
        survivors.back() &= detail::tail_mask(M);
        col.resize(words);

        std::uint64_t tau = 0;
        while (tau < cfg.cap) {
            if (ensemble == Ensemble::iid_bernoulli_half)
                detail::fill_iid_column(col, M, rng);
            else
                detail::fill_balanced_column(col, scratch, M, rng);
            const int bit = (col[msg / 64] >> (msg % 64)) & 1;
            const channel::Symbol s = channel::transmit(chan, bit, rng);
            ++tau;
            if (s == channel::Symbol::erasure) continue;
            const int received = channel::symbol_bit(s);
            std::uint64_t alive = 0;
            for (std::size_t w = 0; w < words; ++w) {
                survivors[w] &= received ? col[w] : ~col[w];
                alive += std::popcount(survivors[w]);
            }
            if (alive == 0) throw std::logic_error("compatibility set lost the true message");
            if (alive == 1) {
                std::uint64_t decoded = 0;
                for (std::size_t w = 0; w < words; ++w) {
                    if (survivors[w] != 0) {
                        decoded = w * 64 + std::countr_zero(survivors[w]);
                        break;
                    }
                }
                out.add(tau, decoded != msg);
                return;
            }
        }
        out.add_truncated();
    });
    return acc.estimate();
}

/// Success statistics of the Huffman-repeat decoder when the channel outputs
/// are drawn from the capacity-achieving output distribution regardless of
/// the input. Success probability is 1/M.
struct QChannelEstimate {
    double success_rate = 0.0;
    double success_std_error = 0.0;
    SimEstimate blocklength;
};

inline QChannelEstimate simulate_q_channel_error(std::uint64_t M, double delta, std::uint64_t trials,
                                                 std::uint64_t seed, std::uint64_t cap = 100000,
                                                 unsigned workers = 0) {
    if (M < 2) throw std::invalid_argument("simulate_q_channel_error: M must be >= 2");
    if (trials < 1) throw std::invalid_argument("simulate_q_channel_error: trials must be >= 1");
    const channel::ChannelSpec chan(delta);
    const huffman::PrefixCode code = huffman::equiprobable_code(M);

    TrialAccumulator acc = run_trials(trials, workers, [&](std::uint64_t trial, TrialAccumulator& out) {
        RngStream rng(seed, trial);
        const std::uint64_t msg = rng.below(M);
        huffman::PrefixDecoder dec(code);
        std::uint64_t tau = 0;
        while (tau < cap) {
            const channel::Symbol s = channel::q_output(chan, rng);
            ++tau;
            if (s == channel::Symbol::erasure) continue;
            if (auto decoded = dec.push_bit(channel::symbol_bit(s))) {
                out.add(tau, *decoded != msg);
                return;
            }
        }
        out.add_truncated();
    });

    QChannelEstimate result;
    result.blocklength = acc.estimate();
    result.success_rate = 1.0 - result.blocklength.empirical_error;
    result.success_std_error = result.blocklength.error_std_error();
    return result;
}

/// Ratio of mean blocklengths at erasure probability delta versus zero, for
/// the same ensemble, trial count and seed. Wald's identity predicts
/// 1/(1 - delta).
struct WaldRatioEstimate {
    double ratio = 0.0;
    double std_error = 0.0;
    SimEstimate at_delta;
    SimEstimate at_zero;
};

inline WaldRatioEstimate wald_ratio_check(Ensemble ensemble, std::uint64_t M, double delta,
                                          std::uint64_t trials, std::uint64_t seed, std::uint64_t cap = 100000,
                                          unsigned workers = 0) {
    if (!(delta > 0.0)) throw std::invalid_argument("wald_ratio_check: delta must be positive");
    SimConfig cfg;
    cfg.message_count = M;
    cfg.delta = delta;
    cfg.trials = trials;
    cfg.seed = seed;
    cfg.cap = cap;
    cfg.workers = workers;
    WaldRatioEstimate est;
    est.at_delta = simulate_vlsf(cfg, ensemble);
    cfg.delta = 0.0;
    est.at_zero = simulate_vlsf(cfg, ensemble);
    est.ratio = est.at_delta.mean / est.at_zero.mean;
    const double rel_a = est.at_delta.std_error / est.at_delta.mean;
    const double rel_b = est.at_zero.std_error / est.at_zero.mean;
    est.std_error = est.ratio * std::sqrt(rel_a * rel_a + rel_b * rel_b);
    return est;
}

}  // namespace vlfbec::schemes
