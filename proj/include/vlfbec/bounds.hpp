#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

#include "vlfbec/oracle.hpp"
#include "vlfbec/rational.hpp"

namespace vlfbec::bounds {

enum class BoundKind {
    ach_repeat,
    conv_fano,
    ach_huffman,
    conv_sprt,
    zero_error,
    vlsf_iid,
    vlsf_expurgated,
    vlsf_linear,
};

enum class BoundSide { achievability, converse };

/// Expected-blocklength bound together with the rate it implies. The rate is
/// always derived from the blocklength (log2 M / blocklength), never stored
/// independently.
struct BoundValue {
    double blocklength = 0.0;
    double rate = 0.0;
    BoundSide side = BoundSide::achievability;
};

/// floor(log2 x) + 2 (1 - 2^(floor(log2 x) - log2 x)) for x > 0. At integer
/// arguments this equals the exact average Huffman codeword length for x
/// equiprobable messages.
inline double lstar(double x) {
    if (!(x > 0.0)) throw std::domain_error("lstar: argument must be positive");
    const int f = std::ilogb(x);
    return f + 2.0 * (1.0 - std::ldexp(1.0, f) / x);
}

/// lstar evaluated exactly in the rationals (defined for any rational x > 0).
inline Rational lstar_exact(const Rational& x) {
    const long f = floor_log2(x);
    return Rational(f + 2) - pow2_rational(f + 1) / x;
}

inline Rational lstar_exact(std::uint64_t m) { return lstar_exact(Rational(static_cast<unsigned long>(m))); }

/// Binary entropy in bits, continuously extended with h(0) = h(1) = 0.
inline double binary_entropy(double x) {
    if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("binary_entropy: argument must be in [0, 1]");
    if (x == 0.0 || x == 1.0) return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

/// log2 M / blocklength, in bits per channel use.
inline double rate_of(std::uint64_t M, double blocklength) {
    if (!(blocklength > 0.0)) throw std::invalid_argument("rate_of: blocklength must be positive");
    return std::log2(static_cast<double>(M)) / blocklength;
}

namespace detail {

inline void check_message_count(std::uint64_t M) {
    if (M < 2) throw std::invalid_argument("bounds: M must be >= 2");
}

inline void check_delta(double delta) {
    if (!(delta >= 0.0 && delta < 1.0)) throw std::domain_error("bounds: delta must be in [0, 1)");
}

inline void check_eps(double eps) {
    if (!(eps >= 0.0 && eps <= 1.0)) throw std::invalid_argument("bounds: eps must be in [0, 1]");
}

inline BoundValue make_value(std::uint64_t M, double blocklength, BoundSide side) {
    BoundValue v;
    v.blocklength = blocklength;
    v.rate = blocklength > 0.0 ? rate_of(M, blocklength) : std::numeric_limits<double>::infinity();
    v.side = side;
    return v;
}

}  // namespace detail

/// Repeat-each-bit scheme with message dropping:
/// (1 - eps) ceil(log2 M) / (1 - delta).
inline BoundValue ach_repeat(std::uint64_t M, double eps, double delta) {
    detail::check_message_count(M);
    detail::check_eps(eps);
    detail::check_delta(delta);
    const unsigned ceil_log2 = static_cast<unsigned>(std::bit_width(M - 1));
    return detail::make_value(M, (1.0 - eps) * ceil_log2 / (1.0 - delta), BoundSide::achievability);
}

/// Fano-style converse ((1 - eps) log2 M - h(eps)) / (1 - delta), clamped at
/// zero where it goes vacuous. Requires eps <= 1 - 1/M.
inline BoundValue conv_fano(std::uint64_t M, double eps, double delta) {
    detail::check_message_count(M);
    detail::check_eps(eps);
    detail::check_delta(delta);
    if (eps > 1.0 - 1.0 / static_cast<double>(M))
        throw std::invalid_argument("conv_fano: requires eps <= 1 - 1/M");
    const double raw =
        ((1.0 - eps) * std::log2(static_cast<double>(M)) - binary_entropy(eps)) / (1.0 - delta);
    return detail::make_value(M, std::max(raw, 0.0), BoundSide::converse);
}

/// Huffman-repeat scheme: (1 - eps) lstar(M) / (1 - delta).
inline BoundValue ach_huffman(std::uint64_t M, double eps, double delta) {
    detail::check_message_count(M);
    detail::check_eps(eps);
    detail::check_delta(delta);
    return detail::make_value(M, (1.0 - eps) * lstar(static_cast<double>(M)) / (1.0 - delta),
                              BoundSide::achievability);
}

/// Sequential-test converse: (1 - eps) lstar(M (1 - eps)) / (1 - delta),
/// vacuous (zero) when M (1 - eps) < 1.
inline BoundValue conv_sprt(std::uint64_t M, double eps, double delta) {
    detail::check_message_count(M);
    detail::check_eps(eps);
    detail::check_delta(delta);
    const double x = static_cast<double>(M) * (1.0 - eps);
    if (x < 1.0) return detail::make_value(M, 0.0, BoundSide::converse);
    return detail::make_value(M, (1.0 - eps) * lstar(x) / (1.0 - delta), BoundSide::converse);
}

/// Minimum average blocklength at zero error: lstar(M) / (1 - delta). The
/// achievability and converse sides meet here for every integer M.
inline BoundValue zero_error_blocklength(std::uint64_t M, double delta) {
    detail::check_message_count(M);
    detail::check_delta(delta);
    return detail::make_value(M, lstar(static_cast<double>(M)) / (1.0 - delta), BoundSide::converse);
}

/// Expected unerased receptions of the iid-Bernoulli(0.5) compatibility
/// decoder, by exact inclusion-exclusion:
/// 1 - sum_{i=1}^{M-1} C(M-1, i) (-1)^i / (2^i - 1).
inline Rational vlsf_iid_tau0_exact(std::uint64_t M) {
    detail::check_message_count(M);
    if (M > 64)
        throw std::invalid_argument("vlsf_iid_tau0_exact: alternating binomial sum capped at M = 64");
    Rational total = 1;
    for (unsigned i = 1; i < M; ++i) {
        mpz_class binom;
        mpz_bin_uiui(binom.get_mpz_t(), static_cast<unsigned long>(M - 1), i);
        Rational term(binom, mpz_class((1UL << i) - 1));
        term.canonicalize();
        if (i % 2 == 1)
            total += term;
        else
            total -= term;
    }
    return total;
}

enum class IidMode { exact, series };

/// iid-codebook stop-feedback bound. Exact mode evaluates the alternating
/// binomial sum in the rationals (refused above M = 64, where the series path
/// is the scalable one); series mode sums the defining series with a certified
/// tail below tol. Both agree within tol.
inline BoundValue vlsf_iid(std::uint64_t M, double delta, IidMode mode = IidMode::exact,
                           double tol = 1e-12) {
    detail::check_message_count(M);
    detail::check_delta(delta);
    double tau0 = 0.0;
    if (mode == IidMode::exact)
        tau0 = to_double(vlsf_iid_tau0_exact(M));
    else
        tau0 = oracle::series_expected_tau0_iid(M, tol);
    return detail::make_value(M, tau0 / (1.0 - delta), BoundSide::achievability);
}

/// Balanced-column (expurgated) ensemble bound via the truncated union bound:
/// floor(m) + 1 + gamma^(m - floor(m)) / (gamma - 1) with
/// gamma = 2 + 1/(ceil(M/2) - 1) and m = log_gamma(M - 1). At M = 2 the
/// gamma -> infinity limit gives 1/(1 - delta), matching the converse.
inline BoundValue vlsf_expurgated(std::uint64_t M, double delta) {
    detail::check_message_count(M);
    detail::check_delta(delta);
    if (M == 2) return detail::make_value(M, 1.0 / (1.0 - delta), BoundSide::achievability);
    const double half_up = static_cast<double>((M + 1) / 2);
    const double gamma = 2.0 + 1.0 / (half_up - 1.0);
    // floor(log_gamma(M - 1)) by repeated multiplication; the bound is
    // continuous in m at integers, so the boundary rounding is harmless.
    const double target = static_cast<double>(M - 1);
    double gamma_pow = 1.0;
    unsigned m_floor = 0;
    while (gamma_pow * gamma <= target) {
        gamma_pow *= gamma;
        ++m_floor;
    }
    const double frac_pow = target / gamma_pow;  // gamma^(m - floor(m))
    const double tau0 = m_floor + 1.0 + frac_pow / (gamma - 1.0);
    return detail::make_value(M, tau0 / (1.0 - delta), BoundSide::achievability);
}

/// Expected columns to full rank for the linear fountain ensemble:
/// k + sum_{i=1}^{k-1} (2^i - 1)/(2^k - 2^i), exact.
inline Rational vlsf_linear_tau0_exact(unsigned k) {
    if (k < 1 || k > 62) throw std::invalid_argument("vlsf_linear_tau0_exact: k must be in [1, 62]");
    Rational total(static_cast<unsigned long>(k));
    for (unsigned i = 1; i < k; ++i) {
        Rational term((1UL << i) - 1, (1UL << k) - (1UL << i));
        term.canonicalize();
        total += term;
    }
    return total;
}

/// Linear fountain bound for M = 2^k messages.
inline BoundValue vlsf_linear(unsigned k, double delta) {
    detail::check_delta(delta);
    const Rational tau0 = vlsf_linear_tau0_exact(k);
    return detail::make_value(std::uint64_t{1} << k, to_double(tau0) / (1.0 - delta),
                              BoundSide::achievability);
}

inline const char* kind_name(BoundKind kind) {
    switch (kind) {
        case BoundKind::ach_repeat: return "ach-repeat";
        case BoundKind::conv_fano: return "conv-fano";
        case BoundKind::ach_huffman: return "ach-huffman";
        case BoundKind::conv_sprt: return "conv-sprt";
        case BoundKind::zero_error: return "zero-error";
        case BoundKind::vlsf_iid: return "vlsf-iid";
        case BoundKind::vlsf_expurgated: return "vlsf-expurgated";
        case BoundKind::vlsf_linear: return "vlsf-linear";
    }
    return "?";
}

inline std::optional<BoundKind> parse_kind(const std::string& name) {
    for (BoundKind kind :
         {BoundKind::ach_repeat, BoundKind::conv_fano, BoundKind::ach_huffman, BoundKind::conv_sprt,
          BoundKind::zero_error, BoundKind::vlsf_iid, BoundKind::vlsf_expurgated, BoundKind::vlsf_linear}) {
        if (name == kind_name(kind)) return kind;
    }
    return std::nullopt;
}

/// Uniform entry point used by the CLI. Stop-feedback kinds are defined at
/// eps = 0 and scaled by (1 - eps); vlsf-linear requires M to be a power of
/// two; vlsf-iid switches from the exact sum to the series above M = 64.
inline BoundValue evaluate(BoundKind kind, std::uint64_t M, double eps, double delta) {
    detail::check_eps(eps);
    switch (kind) {
        case BoundKind::ach_repeat: return ach_repeat(M, eps, delta);
        case BoundKind::conv_fano: return conv_fano(M, eps, delta);
        case BoundKind::ach_huffman: return ach_huffman(M, eps, delta);
        case BoundKind::conv_sprt: return conv_sprt(M, eps, delta);
        case BoundKind::zero_error: return zero_error_blocklength(M, delta);
        case BoundKind::vlsf_iid: {
            BoundValue v = vlsf_iid(M, delta, M <= 64 ? IidMode::exact : IidMode::series, 1e-9);
            return detail::make_value(M, (1.0 - eps) * v.blocklength, v.side);
        }
        case BoundKind::vlsf_expurgated: {
            BoundValue v = vlsf_expurgated(M, delta);
            return detail::make_value(M, (1.0 - eps) * v.blocklength, v.side);
        }
        case BoundKind::vlsf_linear: {
            if (!std::has_single_bit(M))
                throw std::invalid_argument("vlsf-linear requires M to be a power of two");
            BoundValue v = vlsf_linear(static_cast<unsigned>(std::bit_width(M)) - 1, delta);
            return detail::make_value(M, (1.0 - eps) * v.blocklength, v.side);
        }
    }
    throw std::logic_error("unreachable");
}

/// Exact rational blocklength for the kinds whose formula is rational in
/// (M, eps, delta); eps and delta enter as exact dyadic rationals. Returns
/// nullopt for conv-fano and vlsf-expurgated (transcendental) and for
/// vlsf-iid above the exact-mode cap.
inline std::optional<Rational> exact_blocklength(BoundKind kind, std::uint64_t M, double eps,
                                                 double delta) {
    detail::check_message_count(M);
    detail::check_eps(eps);
    detail::check_delta(delta);
    const Rational one_minus_eps = 1 - rational_from_double(eps);
    const Rational one_minus_delta = 1 - rational_from_double(delta);
    switch (kind) {
        case BoundKind::ach_repeat: {
            const unsigned ceil_log2 = static_cast<unsigned>(std::bit_width(M - 1));
            return Rational(one_minus_eps * static_cast<unsigned long>(ceil_log2) / one_minus_delta);
        }
        case BoundKind::ach_huffman:
            return Rational(one_minus_eps * lstar_exact(M) / one_minus_delta);
        case BoundKind::conv_sprt: {
            const Rational x = Rational(static_cast<unsigned long>(M)) * one_minus_eps;
            if (cmp(x, 1) < 0) return Rational(0);
            return Rational(one_minus_eps * lstar_exact(x) / one_minus_delta);
        }
        case BoundKind::zero_error:
            return Rational(lstar_exact(M) / one_minus_delta);
        case BoundKind::vlsf_iid:
            if (M > 64) return std::nullopt;
            return Rational(one_minus_eps * vlsf_iid_tau0_exact(M) / one_minus_delta);
        case BoundKind::vlsf_linear: {
            if (!std::has_single_bit(M)) return std::nullopt;
            const unsigned k = static_cast<unsigned>(std::bit_width(M)) - 1;
            return Rational(one_minus_eps * vlsf_linear_tau0_exact(k) / one_minus_delta);
        }
        case BoundKind::conv_fano:
        case BoundKind::vlsf_expurgated: return std::nullopt;
    }
    return std::nullopt;
}

}  // namespace vlfbec::bounds
