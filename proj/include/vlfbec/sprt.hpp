#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "vlfbec/rng.hpp"
#include "vlfbec/stats.hpp"

namespace vlfbec::sprt {

/// The four boundary treatments of the extended test with bounds (0, m log 2):
/// `closed` stops on hitting either boundary exactly, `open_lower` keeps
/// sampling at the lower boundary, `open_upper` at the upper, `open_both` at
/// both. The variants that stop at the lower boundary decide Q at time zero,
/// since the ratio starts there.
enum class BoundaryVariant { closed, open_lower, open_upper, open_both };

enum class Hypothesis { p_true, q_true };

/// Accumulated log-likelihood ratio of the two BEC hypothesis processes. All
/// finite increments are multiples of log 2, so the state is an exact count
/// plus a minus-infinity flag; boundary comparisons never round.
struct LlrState {
    std::int64_t log2_units = 0;
    bool minus_infinity = false;
    std::uint64_t samples = 0;
};

/// One sample: under P the increment is log 2 w.p. 1 - delta and 0 otherwise;
/// under Q it is log 2 or -infinity each w.p. (1 - delta)/2, and 0 otherwise.
inline void llr_step(LlrState& state, Hypothesis truth, double delta, RngStream& rng) {
    ++state.samples;
    if (rng.uniform() < delta) return;
    if (truth == Hypothesis::p_true || rng.bit())
        ++state.log2_units;
    else
        state.minus_infinity = true;
}

struct SprtSpec {
    int m = 1;
    /// Randomization weights, indexed in BoundaryVariant order; must sum to 1.
    std::array<double, 4> variant_weights{0.0, 1.0, 0.0, 0.0};

    static SprtSpec single(int m, BoundaryVariant variant) {
        SprtSpec spec;
        spec.m = m;
        spec.variant_weights = {0.0, 0.0, 0.0, 0.0};
        spec.variant_weights[static_cast<std::size_t>(variant)] = 1.0;
        return spec;
    }
};

namespace detail {

inline void validate(const SprtSpec& spec) {
    if (spec.m < 1) throw std::invalid_argument("SprtSpec: m must be >= 1");
    double sum = 0.0;
    for (double w : spec.variant_weights) {
        if (w < 0.0) throw std::invalid_argument("SprtSpec: weights must be nonnegative");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("SprtSpec: weights must sum to 1");
}

inline BoundaryVariant pick_variant(const SprtSpec& spec, RngStream& rng) {
    for (std::size_t i = 0; i < 4; ++i)
        if (spec.variant_weights[i] == 1.0) return static_cast<BoundaryVariant>(i);
    const double u = rng.uniform();
    double cum = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        cum += spec.variant_weights[i];
        if (u < cum) return static_cast<BoundaryVariant>(i);
    }
    return BoundaryVariant::open_both;
}

}  // namespace detail

struct SprtResult {
    Hypothesis decision = Hypothesis::q_true;
    std::uint64_t tau = 0;
    bool hit_minus_infinity = false;
    BoundaryVariant variant = BoundaryVariant::open_lower;
};

/// Runs one test: samples increments from the given hypothesis until the
/// ratio leaves the continuation region of the drawn boundary variant, then
/// decides by which boundary was crossed. Terminates almost surely.
inline SprtResult run_sprt(const SprtSpec& spec, Hypothesis truth, double delta, RngStream& rng) {
    detail::validate(spec);
    if (!(delta >= 0.0 && delta < 1.0)) throw std::invalid_argument("run_sprt: delta must be in [0, 1)");
    const BoundaryVariant variant = detail::pick_variant(spec, rng);
    const bool lower_stops_on_boundary =
        variant == BoundaryVariant::closed || variant == BoundaryVariant::open_upper;
    const std::int64_t upper_units =
        spec.m + ((variant == BoundaryVariant::open_upper || variant == BoundaryVariant::open_both) ? 1 : 0);

    LlrState state;
    for (;;) {
        if (state.minus_infinity || (lower_stops_on_boundary && state.log2_units <= 0))
            return {Hypothesis::q_true, state.samples, state.minus_infinity, variant};
        if (state.log2_units >= upper_units)
            return {Hypothesis::p_true, state.samples, state.minus_infinity, variant};
        llr_step(state, truth, delta, rng);
    }
}

/// beta of S(0-, m log 2): probability of a correct Q decision, 1 - 2^-m for
/// every erasure probability.
inline double beta_open_lower_closed_form(int m) { return 1.0 - std::exp2(-m); }

/// The same quantity through the negative-binomial route:
/// 1 - ((1-delta)/2)^m sum_{n>=0} C(n+m-1, m-1) delta^n, summed until the
/// next term falls below 1e-15 of the running sum.
inline double beta_open_lower_negative_binomial(int m, double delta) {
    if (m < 1) throw std::invalid_argument("beta: m must be >= 1");
    if (!(delta >= 0.0 && delta < 1.0)) throw std::invalid_argument("beta: delta must be in [0, 1)");
    double term = 1.0;
    double sum = 1.0;
    for (int n = 1; term >= 1e-15 * sum; ++n) {
        term *= delta * (static_cast<double>(n) + m - 1.0) / n;
        sum += term;
    }
    return 1.0 - std::pow((1.0 - delta) / 2.0, m) * sum;
}

/// Monte Carlo operating characteristics of a test specification.
struct SprtOperatingPoint {
    double p_correct_rate = 0.0;  // alpha-hat
    double p_correct_std_error = 0.0;
    double mean_tau_p = 0.0;
    double std_error_tau_p = 0.0;
    double q_correct_rate = 0.0;  // beta-hat
    double q_correct_std_error = 0.0;
    double mean_tau_q = 0.0;
    double std_error_tau_q = 0.0;
    std::uint64_t trials = 0;
};

inline SprtOperatingPoint sprt_operating_characteristics(const SprtSpec& spec, double delta,
                                                         std::uint64_t trials, std::uint64_t seed,
                                                         unsigned workers = 0) {
    detail::validate(spec);
    if (trials < 1) throw std::invalid_argument("sprt_operating_characteristics: trials must be >= 1");

    TrialAccumulator under_p = run_trials(trials, workers, [&](std::uint64_t t, TrialAccumulator& out) {
        RngStream rng(seed, 2 * t);
        const SprtResult r = run_sprt(spec, Hypothesis::p_true, delta, rng);
        if (r.hit_minus_infinity) throw std::logic_error("LLR hit -infinity under P");
        out.add(r.tau, r.decision != Hypothesis::p_true);
    });
    TrialAccumulator under_q = run_trials(trials, workers, [&](std::uint64_t t, TrialAccumulator& out) {
        RngStream rng(seed, 2 * t + 1);
        const SprtResult r = run_sprt(spec, Hypothesis::q_true, delta, rng);
        out.add(r.tau, r.decision != Hypothesis::q_true);
    });

    const SimEstimate p_est = under_p.estimate();
    const SimEstimate q_est = under_q.estimate();
    SprtOperatingPoint oc;
    oc.trials = trials;
    oc.p_correct_rate = 1.0 - p_est.empirical_error;
    oc.p_correct_std_error = p_est.error_std_error();
    oc.mean_tau_p = p_est.mean;
    oc.std_error_tau_p = p_est.std_error;
    oc.q_correct_rate = 1.0 - q_est.empirical_error;
    oc.q_correct_std_error = q_est.error_std_error();
    oc.mean_tau_q = q_est.mean;
    oc.std_error_tau_q = q_est.std_error;
    return oc;
}

/// Randomized-test solution of the converse: mass eps on the declare-Q-at-zero
/// test and, within the rest, the unique two-point mixture of S(0-, m log 2)
/// and S(0-, (m+1) log 2) whose Q power meets 1 - 1/M exactly. m = 0 denotes
/// the degenerate declare-P-at-zero test.
struct SprtConverseSolution {
    double blocklength = 0.0;
    int m_low = 0;
    double weight_low = 1.0;
    double drop_probability = 0.0;
    double p_power = 0.0;
    double q_power = 0.0;
};

inline SprtConverseSolution converse_from_sprt(std::uint64_t M, double eps, double delta) {
    if (M < 2) throw std::invalid_argument("converse_from_sprt: M must be >= 2");
    if (!(eps >= 0.0 && eps <= 1.0)) throw std::invalid_argument("converse_from_sprt: eps must be in [0, 1]");
    if (!(delta >= 0.0 && delta < 1.0))
        throw std::invalid_argument("converse_from_sprt: delta must be in [0, 1)");

    SprtConverseSolution sol;
    sol.drop_probability = eps;
    sol.p_power = 1.0 - eps;
    const double x = static_cast<double>(M) * (1.0 - eps);
    if (x < 1.0) {  // power constraints met by never sampling; the bound is vacuous
        sol.q_power = eps;
        return sol;
    }
    const int m = std::ilogb(x);
    const double weight = std::ldexp(1.0, m + 1) / x - 1.0;
    sol.m_low = m;
    sol.weight_low = weight;
    sol.blocklength = (1.0 - eps) * (m + 1.0 - weight) / (1.0 - delta);
    const double beta_low = 1.0 - std::exp2(static_cast<double>(-m));
    const double beta_high = 1.0 - std::exp2(static_cast<double>(-(m + 1)));
    sol.q_power = eps + (1.0 - eps) * (weight * beta_low + (1.0 - weight) * beta_high);
    return sol;
}

}  // namespace vlfbec::sprt
