#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "vlfbec/ensembles.hpp"
#include "vlfbec/rational.hpp"

namespace vlfbec::oracle {

/// Direct evaluation of sum_{n>=0} (1 - (1 - 2^-n)^(M-1)), the expected
/// number of unerased symbols needed by the iid-codebook compatibility
/// decoder. Terms are added until the geometric tail bound
/// (M-1) * 2^-N / (1 - 1/2) drops below tol, so the returned value has
/// certified truncation error below tol.
inline double series_expected_tau0_iid(std::uint64_t M, double tol) {
    if (M < 2) throw std::invalid_argument("series_expected_tau0_iid: M must be >= 2");
    if (!(tol > 0)) throw std::invalid_argument("series_expected_tau0_iid: tol must be positive");
    const double dM = static_cast<double>(M);
    double sum = 1.0;  // n = 0 term
    double n = 1.0;
    while ((dM - 1.0) * std::exp2(-n) * 2.0 >= tol) {
        sum += -std::expm1((dM - 1.0) * std::log1p(-std::exp2(-n)));
        n += 1.0;
    }
    return sum;
}

/// Rank of the collected generator columns as a Markov chain on {0, ..., k}:
/// from rank i the next nonzero column leaves the current span with
/// probability (2^k - 2^i)/(2^k - 1); rank k is absorbing.
struct RankChain {
    explicit RankChain(unsigned k) : dimension(k) {
        if (k < 1 || k > 62) throw std::invalid_argument("RankChain: k must be in [1, 62]");
    }

    Rational advance_probability(unsigned i) const {
        if (i >= dimension) throw std::invalid_argument("RankChain: state out of range");
        const unsigned long full = 1UL << dimension;
        Rational p(full - (1UL << i), full - 1);
        p.canonicalize();
        return p;
    }

    /// Expected steps to absorption, sum_i 1/p_i, exact.
    Rational expected_absorption() const {
        Rational total = 0;
        for (unsigned i = 0; i < dimension; ++i) total += 1 / advance_probability(i);
        return total;
    }

    unsigned dimension;
};

/// Expected absorption time of the rank chain, exact in the rationals.
inline Rational phase_type_expected_absorption(unsigned k) {
    return RankChain(k).expected_absorption();
}

/// Exact enumeration result for tiny instances: E[min(tau0, n_max)] plus an
/// upper bound on the discarded tail, so [truncated_mean, truncated_mean +
/// tail_bound] brackets E[tau0].
struct TinyEnumeration {
    Rational truncated_mean;
    Rational tail_bound;
};

namespace detail {

/// All possible columns as M-bit patterns with their exact probabilities.
inline std::vector<std::pair<std::uint32_t, Rational>> column_support(unsigned M, Ensemble ensemble) {
    std::vector<std::pair<std::uint32_t, Rational>> cols;
    switch (ensemble) {
        case Ensemble::iid_bernoulli_half: {
            const Rational p(1, 1UL << M);
            for (std::uint32_t c = 0; c < (1u << M); ++c) cols.emplace_back(c, p);
            break;
        }
        case Ensemble::balanced_columns: {
            const unsigned zeros = (M + 1) / 2;
            for (std::uint32_t c = 0; c < (1u << M); ++c)
                if (M - std::popcount(c) == zeros) cols.emplace_back(c, Rational(0));
            const Rational p(1, static_cast<unsigned long>(cols.size()));
            for (auto& col : cols) col.second = p;
            break;
        }
        case Ensemble::linear_fountain: {
            if (!std::has_single_bit(M)) throw std::invalid_argument("linear fountain needs M = 2^k");
            const unsigned k = static_cast<unsigned>(std::bit_width(M)) - 1;
            const Rational p(1, (1UL << k) - 1);
            for (std::uint32_t g = 1; g < (1u << k); ++g) {
                std::uint32_t pattern = 0;
                for (std::uint32_t w = 0; w < M; ++w)
                    pattern |= static_cast<std::uint32_t>(std::popcount(w & g) & 1) << w;
                cols.emplace_back(pattern, p);
            }
            break;
        }
    }
    return cols;
}

inline Rational pairwise_agreement_probability(unsigned M, Ensemble ensemble) {
    switch (ensemble) {
        case Ensemble::iid_bernoulli_half: return Rational(1, 2);
        case Ensemble::balanced_columns: {
            const unsigned long z = (M + 1) / 2;
            Rational q(z * (z - 1) + (M - z) * (M - z - 1),
                       static_cast<unsigned long>(M) * (M - 1));
            q.canonicalize();
            return q;
        }
        case Ensemble::linear_fountain: {
            const unsigned k = static_cast<unsigned>(std::bit_width(static_cast<std::uint32_t>(M))) - 1;
            Rational q((1UL << (k - 1)) - 1, (1UL << k) - 1);
            q.canonicalize();
            return q;
        }
    }
    throw std::logic_error("unreachable");
}

}  // namespace detail

/// Ground-truth stopping-time oracle for M <= 4: evolves the exact
/// distribution of the compatible-message set under every possible column,
/// weighted by the ensemble probabilities.
inline TinyEnumeration exhaustive_tau0_tiny(unsigned M, Ensemble ensemble, unsigned n_max) {
    if (M < 2 || M > 4) throw std::invalid_argument("exhaustive_tau0_tiny: M must be in [2, 4]");
    if (n_max > 20) throw std::invalid_argument("exhaustive_tau0_tiny: n_max must be <= 20");
    const std::uint64_t states = 1ULL << M;
    const auto columns = detail::column_support(M, ensemble);
    if (states * n_max * columns.size() > 100000000ULL)
        throw std::invalid_argument("exhaustive_tau0_tiny: enumeration too large");

    // True message fixed to 0; both ensembles are symmetric across messages.
    std::vector<Rational> dist(states, Rational(0));
    dist[states - 1] = 1;  // all messages compatible before any reception

    Rational expected = 0;
    for (unsigned n = 0; n < n_max; ++n) {
        Rational undecided = 0;
        for (std::uint64_t s = 0; s < states; ++s)
            if (std::popcount(s) >= 2 && sgn(dist[s]) != 0) undecided += dist[s];
        expected += undecided;  // P(tau0 > n)
        if (sgn(undecided) == 0) break;

        std::vector<Rational> next(states, Rational(0));
        for (std::uint64_t s = 0; s < states; ++s) {
            if (sgn(dist[s]) == 0) continue;
            if (std::popcount(s) < 2) {
                next[s] += dist[s];
                continue;
            }
            for (const auto& [pattern, prob] : columns) {
                const std::uint64_t match = (pattern & 1u) ? pattern : ~static_cast<std::uint64_t>(pattern);
                next[s & match & (states - 1)] += dist[s] * prob;
            }
        }
        dist.swap(next);
    }

    const Rational q = detail::pairwise_agreement_probability(M, ensemble);
    Rational q_pow = 1;
    for (unsigned n = 0; n < n_max; ++n) q_pow *= q;
    TinyEnumeration result;
    result.truncated_mean = expected;
    result.tail_bound = Rational(static_cast<unsigned long>(M - 1), 1) * q_pow / (1 - q);
    return result;
}

}  // namespace vlfbec::oracle
