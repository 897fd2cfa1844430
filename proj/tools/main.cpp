// vlfbec: bound tables, Monte Carlo runs, self-verification and figure data
// for variable-length coding over the binary erasure channel.
#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "vlfbec/vlfbec.hpp"

using namespace vlfbec;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailure = 1;
constexpr int kExitUsage = 2;

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", x);
    return buf;
}

struct OutputTarget {
    explicit OutputTarget(const std::string& path) {
        if (!path.empty()) {
            file.open(path);
            if (!file) throw std::invalid_argument("cannot open output file: " + path);
        }
    }
    std::ostream& stream() { return file.is_open() ? file : std::cout; }
    std::ofstream file;
};

void write_manifest(std::ostream& os, const std::string& command, const json& params) {
    json manifest;
    manifest["command"] = command;
    manifest["params"] = params;
    manifest["tool"] = "vlfbec";
    manifest["version"] = kVersion;
    os << "# " << manifest.dump() << "\n";
}

std::pair<std::uint64_t, std::uint64_t> parse_range(const std::string& text) {
    const auto dots = text.find("..");
    try {
        if (dots == std::string::npos) {
            const std::uint64_t v = std::stoull(text);
            return {v, v};
        }
        const std::uint64_t lo = std::stoull(text.substr(0, dots));
        const std::uint64_t hi = std::stoull(text.substr(dots + 2));
        if (lo > hi) throw std::invalid_argument("");
        return {lo, hi};
    } catch (...) {
        throw std::invalid_argument("range must be N or LO..HI, got: " + text);
    }
}

std::vector<bounds::BoundKind> parse_kinds(const std::string& text) {
    const std::vector<bounds::BoundKind> all = {
        bounds::BoundKind::ach_repeat,   bounds::BoundKind::conv_fano,
        bounds::BoundKind::ach_huffman,  bounds::BoundKind::conv_sprt,
        bounds::BoundKind::zero_error,   bounds::BoundKind::vlsf_iid,
        bounds::BoundKind::vlsf_expurgated, bounds::BoundKind::vlsf_linear};
    if (text == "all") return all;
    std::vector<bounds::BoundKind> kinds;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto kind = bounds::parse_kind(item);
        if (!kind) {
            std::string valid = "all";
            for (bounds::BoundKind k : all) valid += std::string(",") + bounds::kind_name(k);
            throw std::invalid_argument("unknown bound kind '" + item + "' (valid: " + valid + ")");
        }
        kinds.push_back(*kind);
    }
    if (kinds.empty()) throw std::invalid_argument("no bound kinds given");
    // keep the fixed enum order and drop duplicates for deterministic output
    std::vector<bounds::BoundKind> ordered;
    for (bounds::BoundKind k : all)
        for (bounds::BoundKind req : kinds)
            if (req == k && (ordered.empty() || ordered.back() != k)) ordered.push_back(k);
    return ordered;
}

int cmd_bounds(const std::string& m_range, double eps, double delta, const std::string& kinds_text,
               const std::string& out_path) {
    const auto [m_lo, m_hi] = parse_range(m_range);
    const std::vector<bounds::BoundKind> kinds = parse_kinds(kinds_text);
    OutputTarget out(out_path);

    json params{{"M", m_range}, {"eps", eps}, {"delta", delta}, {"kinds", kinds_text}};
    write_manifest(out.stream(), "bounds", params);
    out.stream() << "M,kind,blocklength,rate,exact\n";

    const bool single_query = m_lo == m_hi && kinds.size() == 1;
    std::uint64_t rows = 0;
    for (std::uint64_t M = m_lo; M <= m_hi; ++M) {
        for (bounds::BoundKind kind : kinds) {
            bounds::BoundValue value;
            try {
                value = bounds::evaluate(kind, M, eps, delta);
            } catch (const std::exception&) {
                if (single_query) throw;  // report the reason instead of an empty table
                continue;                 // combination undefined inside a sweep
            }
            std::string exact;
            if (const auto r = bounds::exact_blocklength(kind, M, eps, delta))
                exact = to_fraction_string(*r);
            out.stream() << M << "," << bounds::kind_name(kind) << "," << fmt(value.blocklength)
                         << "," << fmt(value.rate) << "," << exact << "\n";
            ++rows;
        }
    }
    if (rows == 0) throw std::invalid_argument("no valid (M, kind) combinations in the request");
    return kExitOk;
}

int cmd_simulate(const std::string& scheme, std::uint64_t M, unsigned k, int m, double delta,
                 double eps, std::uint64_t trials, std::uint64_t seed, std::uint64_t cap,
                 unsigned workers, const std::string& out_path) {
    schemes::SimConfig cfg;
    cfg.delta = delta;
    cfg.eps = eps;
    cfg.trials = trials;
    cfg.seed = seed;
    cfg.cap = cap;
    cfg.workers = workers;

    SimEstimate est;
    std::string m_column, k_column;
    if (scheme == "huffman-repeat") {
        cfg.message_count = M;
        est = schemes::simulate_vlf_huffman_repeat(cfg);
    } else if (scheme == "vlsf-iid" || scheme == "vlsf-balanced") {
        cfg.message_count = M;
        est = schemes::simulate_vlsf(cfg, scheme == "vlsf-iid" ? Ensemble::iid_bernoulli_half
                                                               : Ensemble::balanced_columns);
    } else if (scheme == "vlsf-linear") {
        if (k == 0) {
            if (!std::has_single_bit(M))
                throw std::invalid_argument("vlsf-linear needs --k, or --M equal to a power of two");
            k = static_cast<unsigned>(std::bit_width(M)) - 1;
        }
        cfg.message_count = std::uint64_t{1} << k;
        k_column = std::to_string(k);
        est = schemes::simulate_vlsf(cfg, Ensemble::linear_fountain);
    } else if (scheme == "q-channel") {
        const schemes::QChannelEstimate q =
            schemes::simulate_q_channel_error(M, delta, trials, seed, cap, workers);
        cfg.message_count = M;
        est = q.blocklength;  // empirical_error below is 1 - success rate
    } else if (scheme == "sprt") {
        if (m < 1) throw std::invalid_argument("sprt needs --m >= 1");
        const sprt::SprtOperatingPoint oc = sprt::sprt_operating_characteristics(
            sprt::SprtSpec::single(m, sprt::BoundaryVariant::open_lower), delta, trials, seed, workers);
        est.mean = oc.mean_tau_p;
        est.std_error = oc.std_error_tau_p;
        est.trials = oc.trials;
        est.truncated = 0;
        est.empirical_error = 1.0 - oc.q_correct_rate;
        m_column = std::to_string(m);
    } else {
        throw std::invalid_argument(
            "unknown scheme '" + scheme +
            "' (valid: huffman-repeat, vlsf-iid, vlsf-balanced, vlsf-linear, q-channel, sprt)");
    }

    OutputTarget out(out_path);
    json params{{"scheme", scheme}, {"delta", delta}, {"eps", eps},        {"trials", trials},
                {"seed", seed},     {"cap", cap},     {"workers", workers}};
    if (scheme == "vlsf-linear")
        params["k"] = k;
    else if (scheme == "sprt")
        params["m"] = m;
    else
        params["M"] = M;
    write_manifest(out.stream(), "simulate", params);
    out.stream() << "scheme,M,k,m,delta,eps,mean,stderr,trials,truncated,empirical_error\n";
    out.stream() << scheme << "," << (scheme == "vlsf-linear" || scheme == "sprt" ? "" : std::to_string(M))
                 << "," << k_column << "," << m_column << "," << fmt(delta) << "," << fmt(eps) << ","
                 << fmt(est.mean) << "," << fmt(est.std_error) << "," << est.trials << ","
                 << est.truncated << "," << fmt(est.empirical_error) << "\n";
    return kExitOk;
}

struct Check {
    std::string name;
    std::function<bool(std::string&)> run;
};

int cmd_verify(const std::string& level, bool inject_failure) {
    if (level != "quick" && level != "full")
        throw std::invalid_argument("level must be quick or full");
    const bool full = level == "full";
    const std::uint64_t huffman_limit = full ? 65536 : 4096;
    const std::uint64_t grid_limit = full ? 4096 : 1024;
    const std::uint64_t mc_trials = full ? 200000 : 20000;

    std::vector<Check> checks;

    checks.push_back({"huffman-average-vs-lstar", [&](std::string& why) {
        for (std::uint64_t M = 2; M <= huffman_limit; ++M) {
            if (huffman::average_length(huffman::equiprobable_code(M)) != bounds::lstar_exact(M)) {
                why = "M=" + std::to_string(M);
                return false;
            }
        }
        return true;
    }});

    checks.push_back({"iid-inclusion-exclusion-vs-series", [](std::string& why) {
        for (std::uint64_t M = 2; M <= 64; ++M) {
            if (std::abs(to_double(bounds::vlsf_iid_tau0_exact(M)) -
                         oracle::series_expected_tau0_iid(M, 1e-12)) > 1e-9) {
                why = "M=" + std::to_string(M);
                return false;
            }
        }
        return true;
    }});

    checks.push_back({"phase-type-vs-closed-form", [](std::string& why) {
        for (unsigned k = 1; k <= 20; ++k) {
            if (oracle::phase_type_expected_absorption(k) != bounds::vlsf_linear_tau0_exact(k)) {
                why = "k=" + std::to_string(k);
                return false;
            }
        }
        return true;
    }});

    checks.push_back({"zero-error-tightness", [&](std::string& why) {
        for (std::uint64_t M = 2; M <= grid_limit; ++M) {
            for (double delta : {0.0, 0.1, 0.5, 0.9}) {
                const double a = bounds::ach_huffman(M, 0.0, delta).blocklength;
                const double c = bounds::conv_sprt(M, 0.0, delta).blocklength;
                const double z = bounds::zero_error_blocklength(M, delta).blocklength;
                if (std::abs(a - c) > 1e-12 || std::abs(a - z) > 1e-12) {
                    why = "M=" + std::to_string(M);
                    return false;
                }
            }
        }
        return true;
    }});

    checks.push_back({"bound-orderings", [&](std::string& why) {
        for (std::uint64_t M = 2; M <= grid_limit; ++M) {
            if (bounds::ach_huffman(M, 0.0, 0.5).blocklength >
                bounds::ach_repeat(M, 0.0, 0.5).blocklength + 1e-12) {
                why = "huffman > repeat at M=" + std::to_string(M);
                return false;
            }
        }
        for (unsigned k = 1; k <= 16; ++k) {
            if (bounds::vlsf_linear(k, 0.5).blocklength >
                bounds::vlsf_expurgated(std::uint64_t{1} << k, 0.5).blocklength + 1e-12) {
                why = "linear > expurgated at k=" + std::to_string(k);
                return false;
            }
        }
        for (unsigned k = 6; k <= 16; ++k) {
            if (bounds::vlsf_iid(std::uint64_t{1} << k, 0.5, bounds::IidMode::series, 1e-9).blocklength >
                bounds::vlsf_linear(k, 0.5).blocklength + 1e-12) {
                why = "iid > linear at k=" + std::to_string(k);
                return false;
            }
        }
        return true;
    }});

    checks.push_back({"sprt-solve-vs-converse-formula", [](std::string& why) {
        for (std::uint64_t M : {2, 3, 5, 8, 64, 1000, 4096}) {
            for (double eps : {0.0, 0.1, 0.5}) {
                for (double delta : {0.0, 0.5, 0.9}) {
                    if (std::abs(sprt::converse_from_sprt(M, eps, delta).blocklength -
                                 bounds::conv_sprt(M, eps, delta).blocklength) > 1e-12) {
                        why = "M=" + std::to_string(M);
                        return false;
                    }
                }
            }
        }
        return true;
    }});

    checks.push_back({"sprt-beta-negative-binomial", [](std::string& why) {
        for (int m = 1; m <= 20; ++m) {
            for (double delta : {0.1, 0.5, 0.9}) {
                if (std::abs(sprt::beta_open_lower_negative_binomial(m, delta) -
                             sprt::beta_open_lower_closed_form(m)) > 1e-12) {
                    why = "m=" + std::to_string(m);
                    return false;
                }
            }
        }
        return true;
    }});

    checks.push_back({"tiny-enumeration-brackets", [](std::string& why) {
        for (unsigned M = 2; M <= 4; ++M) {
            const auto t = oracle::exhaustive_tau0_tiny(M, Ensemble::iid_bernoulli_half, 20);
            const Rational exact = bounds::vlsf_iid_tau0_exact(M);
            if (t.truncated_mean > exact || t.truncated_mean + t.tail_bound < exact) {
                why = "iid M=" + std::to_string(M);
                return false;
            }
        }
        for (unsigned M = 2; M <= 4; ++M) {
            const auto t = oracle::exhaustive_tau0_tiny(M, Ensemble::balanced_columns, 20);
            if (to_double(t.truncated_mean) > bounds::vlsf_expurgated(M, 0.0).blocklength + 1e-12) {
                why = "balanced M=" + std::to_string(M);
                return false;
            }
        }
        return true;
    }});

    checks.push_back({"simulator-smoke", [&](std::string& why) {
        schemes::SimConfig cfg;
        cfg.message_count = 8;
        cfg.delta = 0.5;
        cfg.trials = mc_trials;
        cfg.seed = 42;
        const SimEstimate hr = schemes::simulate_vlf_huffman_repeat(cfg);
        if (std::abs(hr.mean - 6.0) > 4.0 * hr.std_error || hr.empirical_error != 0.0) {
            why = "huffman-repeat off target";
            return false;
        }
        const SimEstimate lin = schemes::simulate_vlsf(cfg, Ensemble::linear_fountain);
        if (std::abs(lin.mean - 47.0 / 6.0) > 4.0 * lin.std_error || lin.empirical_error != 0.0) {
            why = "linear fountain off target";
            return false;
        }
        return true;
    }});

    if (inject_failure)
        checks.push_back({"injected-failure", [](std::string&) { return false; }});

    int failures = 0;
    for (const Check& check : checks) {
        std::string why;
        bool ok = false;
        try {
            ok = check.run(why);
        } catch (const std::exception& e) {
            why = e.what();
        }
        if (!ok) ++failures;
        std::cout << (ok ? "PASS " : "FAIL ") << check.name;
        if (!ok && !why.empty()) std::cout << " (" << why << ")";
        std::cout << "\n";
    }
    std::cout << (failures == 0 ? "verify: all checks passed\n"
                                : "verify: " + std::to_string(failures) + " check(s) failed\n");
    return failures == 0 ? kExitOk : kExitVerifyFailure;
}

int cmd_figure1(double delta, std::uint64_t m_max, std::uint64_t trials_per_point, std::uint64_t seed,
                unsigned workers, const std::string& out_path) {
    OutputTarget out(out_path);
    json params{{"delta", delta},
                {"M_max", m_max},
                {"trials_per_point", trials_per_point},
                {"seed", seed},
                {"workers", workers}};
    write_manifest(out.stream(), "figure1", params);
    out.stream() << "M,conv_vlf,ach_iid,ach_expurgated,ach_linear,sim_linear_mean,"
                    "sim_linear_stderr,rate_gap\n";

    for (std::uint64_t M = 2; M <= m_max; ++M) {
        const double conv = bounds::zero_error_blocklength(M, delta).blocklength;
        const double iid = bounds::evaluate(bounds::BoundKind::vlsf_iid, M, 0.0, delta).blocklength;
        const double expurgated = bounds::vlsf_expurgated(M, delta).blocklength;
        double best_ach = std::min(iid, expurgated);
        std::string linear_col, sim_mean_col, sim_stderr_col;
        if (std::has_single_bit(M)) {
            const unsigned k = static_cast<unsigned>(std::bit_width(M)) - 1;
            const double linear = bounds::vlsf_linear(k, delta).blocklength;
            best_ach = std::min(best_ach, linear);
            linear_col = fmt(linear);
            schemes::SimConfig cfg;
            cfg.message_count = M;
            cfg.delta = delta;
            cfg.trials = trials_per_point;
            cfg.seed = seed + M;
            cfg.workers = workers;
            const SimEstimate sim = schemes::simulate_vlsf(cfg, Ensemble::linear_fountain);
            sim_mean_col = fmt(sim.mean);
            sim_stderr_col = fmt(sim.std_error);
        }
        const double conv_rate = bounds::rate_of(M, conv);
        const double ach_rate = bounds::rate_of(M, best_ach);
        const double gap = (conv_rate - ach_rate) / conv_rate;
        out.stream() << M << "," << fmt(conv) << "," << fmt(iid) << "," << fmt(expurgated) << ","
                     << linear_col << "," << sim_mean_col << "," << sim_stderr_col << ","
                     << fmt(gap) << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Blocklength bounds and scheme simulators for the binary erasure channel with feedback"};
    app.require_subcommand(1);

    std::string m_range = "2..64";
    double eps = 0.0;
    double delta = 0.5;
    std::string kinds = "all";
    std::string out_path;

    CLI::App* bounds_cmd = app.add_subcommand("bounds", "Tabulate closed-form bounds as CSV");
    bounds_cmd->add_option("--M", m_range, "message count, N or LO..HI");
    bounds_cmd->add_option("--eps", eps, "average error probability");
    bounds_cmd->add_option("--delta", delta, "erasure probability");
    bounds_cmd->add_option("--kinds", kinds, "comma-separated bound kinds, or 'all'");
    bounds_cmd->add_option("--out", out_path, "output file (default stdout)");

    std::string scheme;
    std::uint64_t sim_m = 8;
    unsigned sim_k = 0;
    int sprt_m = 0;
    std::uint64_t trials = 1000000;
    std::uint64_t seed = 42;
    std::uint64_t cap = 100000;
    unsigned workers = 0;

    CLI::App* sim_cmd = app.add_subcommand("simulate", "Run one Monte Carlo experiment");
    sim_cmd->add_option("--scheme", scheme,
                        "huffman-repeat | vlsf-iid | vlsf-balanced | vlsf-linear | q-channel | sprt")
        ->required();
    sim_cmd->add_option("--M", sim_m, "message count");
    sim_cmd->add_option("--k", sim_k, "message bits (vlsf-linear)");
    sim_cmd->add_option("--m", sprt_m, "upper boundary in log-2 units (sprt)");
    sim_cmd->add_option("--delta", delta, "erasure probability");
    sim_cmd->add_option("--eps", eps, "stop-at-zero probability");
    sim_cmd->add_option("--trials", trials, "trial count");
    sim_cmd->add_option("--seed", seed, "base seed; trial i uses stream i");
    sim_cmd->add_option("--cap", cap, "per-trial blocklength cap");
    sim_cmd->add_option("--workers", workers, "worker threads (0 = all cores)");
    sim_cmd->add_option("--out", out_path, "output file (default stdout)");

    std::string level = "quick";
    bool inject_failure = false;
    CLI::App* verify_cmd = app.add_subcommand("verify", "Cross-check formulas against oracles");
    verify_cmd->add_option("--level", level, "quick | full");
    verify_cmd->add_flag("--inject-failure", inject_failure)->group("");  // test hook

    double fig_delta = 0.5;
    std::uint64_t fig_m_max = 1024;
    std::uint64_t fig_trials = 100000;
    CLI::App* fig_cmd = app.add_subcommand("figure1", "Bound curves plus fountain simulation as CSV");
    fig_cmd->add_option("--delta", fig_delta, "erasure probability");
    fig_cmd->add_option("--M-max", fig_m_max, "largest message count");
    fig_cmd->add_option("--trials-per-point", fig_trials, "simulation trials per power of two");
    fig_cmd->add_option("--seed", seed, "base seed");
    fig_cmd->add_option("--workers", workers, "worker threads (0 = all cores)");
    fig_cmd->add_option("--out", out_path, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    const auto start = std::chrono::steady_clock::now();
    int code = kExitOk;
    try {
        if (bounds_cmd->parsed()) {
            code = cmd_bounds(m_range, eps, delta, kinds, out_path);
        } else if (sim_cmd->parsed()) {
            code = cmd_simulate(scheme, sim_m, sim_k, sprt_m, delta, eps, trials, seed, cap, workers,
                                out_path);
        } else if (verify_cmd->parsed()) {
            code = cmd_verify(level, inject_failure);
        } else if (fig_cmd->parsed()) {
            code = cmd_figure1(fig_delta, fig_m_max, fig_trials, seed, workers, out_path);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cerr << "# completed in " << fmt(seconds) << " s\n";
    return code;
}
