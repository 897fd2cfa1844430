#pragma once

#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

namespace vlfbec {

/// Summary of a Monte Carlo run. Truncated trials are reported, never folded
/// into the mean.
struct SimEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t trials = 0;  // completed (non-truncated) trials
    std::uint64_t truncated = 0;
    double empirical_error = 0.0;

    double error_std_error() const {
        if (trials == 0) return 0.0;
        const double p = empirical_error;
        return std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
    }
};

/// Accumulates integer blocklengths exactly, so merging partial results is
/// associative and commutative and the final figures do not depend on worker
/// count or execution order.
class TrialAccumulator {
public:
    void add(std::uint64_t blocklength, bool error) {
        ++completed_;
        sum_ += blocklength;
        sum_sq_ += static_cast<unsigned __int128>(blocklength) * blocklength;
        if (error) ++errors_;
    }

    void add_truncated() { ++truncated_; }

    void merge(const TrialAccumulator& other) {
        completed_ += other.completed_;
        truncated_ += other.truncated_;
        errors_ += other.errors_;
        sum_ += other.sum_;
        sum_sq_ += other.sum_sq_;
    }

    std::uint64_t completed() const { return completed_; }
    std::uint64_t truncated() const { return truncated_; }
    std::uint64_t errors() const { return errors_; }

    SimEstimate estimate() const {
        SimEstimate est;
        est.trials = completed_;
        est.truncated = truncated_;
        if (completed_ == 0) return est;
        const long double n = static_cast<long double>(completed_);
        const long double sum = static_cast<long double>(sum_);
        est.mean = static_cast<double>(sum / n);
        if (completed_ > 1) {
            const long double ssq = static_cast<long double>(sum_sq_);
            const long double var = (ssq - sum * sum / n) / (n - 1.0L);
            est.std_error = static_cast<double>(std::sqrt(std::max(var, 0.0L) / n));
        }
        est.empirical_error = static_cast<double>(errors_) / static_cast<double>(completed_);
        return est;
    }

private:
    std::uint64_t completed_ = 0;
    std::uint64_t truncated_ = 0;
    std::uint64_t errors_ = 0;
    std::uint64_t sum_ = 0;
    unsigned __int128 sum_sq_ = 0;
};

/// Runs `body(trial_index, accumulator)` for every trial index in [0, trials),
/// split over worker threads in contiguous blocks. Per-trial RNG streams keep
/// the outcome identical for any worker count.
template <typename PerTrial>
TrialAccumulator run_trials(std::uint64_t trials, unsigned workers, PerTrial&& body) {
    unsigned n_workers = workers != 0 ? workers : std::thread::hardware_concurrency();
    if (n_workers == 0) n_workers = 1;
    if (n_workers > trials && trials > 0) n_workers = static_cast<unsigned>(trials);

    if (n_workers <= 1) {
        TrialAccumulator acc;
        for (std::uint64_t t = 0; t < trials; ++t) body(t, acc);
        return acc;
    }

    std::vector<TrialAccumulator> partial(n_workers);
    std::vector<std::thread> threads;
    threads.reserve(n_workers);
    const std::uint64_t chunk = (trials + n_workers - 1) / n_workers;
    for (unsigned w = 0; w < n_workers; ++w) {
        const std::uint64_t lo = w * chunk;
        const std::uint64_t hi = std::min(trials, lo + chunk);
        threads.emplace_back([&body, &partial, w, lo, hi] {
            for (std::uint64_t t = lo; t < hi; ++t) body(t, partial[w]);
        });
    }
    for (std::thread& th : threads) th.join();

    TrialAccumulator acc;
    for (const TrialAccumulator& p : partial) acc.merge(p);
    return acc;
}

}  // namespace vlfbec
