#pragma once

// Experiment engine: deterministic Monte-Carlo sweeps, exact per-block and
// small-K expectations, and windowed interior marginals with truncation
// bounds.  All estimators are bitwise deterministic in (config, seed),
// independent of thread count.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "erasenet/analysis.hpp"
#include "erasenet/assignment.hpp"
#include "erasenet/schedulers.hpp"
#include "erasenet/topology.hpp"

namespace erasenet {

// Worker count: ERASENET_THREADS when set to a positive integer, otherwise
// (or when 0) the hardware concurrency.
inline int engine_threads() {
    if (const char* env = std::getenv("ERASENET_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0 && v < 1024) return static_cast<int>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

// Runs fn(i) for i in [0, n) on up to engine_threads() workers.  Results must
// be written to disjoint slots; chunking is static so the split is stable.
template <typename F>
void parallel_for(size_t n, F&& fn) {
    const size_t workers =
        std::min<size_t>(static_cast<size_t>(engine_threads()), n == 0 ? 1 : n);
    if (workers <= 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (size_t w = 0; w < workers; ++w) {
        const size_t lo = n * w / workers;
        const size_t hi = n * (w + 1) / workers;
        pool.emplace_back([lo, hi, &fn] {
            for (size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

// Evaluation grid over erasure probabilities: n+1 evenly spaced points from
// lo to hi inclusive; lo == hi collapses to the single point.
struct Grid {
    double lo = 0.0;
    double hi = 0.0;
    int n = 1;

    std::vector<double> points() const {
        if (!(lo >= 0.0 && lo <= 1.0 && hi >= 0.0 && hi <= 1.0))
            throw std::invalid_argument("p outside [0,1]");
        if (lo > hi) throw std::invalid_argument("grid start exceeds grid end");
        if (n < 1) throw std::invalid_argument("grid needs at least one step");
        if (lo == hi) return {lo};
        std::vector<double> ps(n + 1);
        for (int i = 0; i <= n; ++i)
            ps[i] = lo + (hi - lo) * (static_cast<double>(i) / n);
        return ps;
    }
};

struct ExperimentConfig {
    SchemeId scheme = SchemeId::scheme1;
    int k = 300;
    Grid grid;
    int trials = 200;
    uint64_t seed = 1;
    int trim = 6;
    // Order-1 assignment for the oracle; ignored by the rule-based schemes.
    std::optional<MessageAssignment> strategy;

    void validate() const {
        if (k < 1) throw std::invalid_argument("K must be positive");
        if (trials < 1) throw std::invalid_argument("trials must be positive");
        if (trim < 0) throw std::invalid_argument("trim must be non-negative");
        if (k - 2 * trim < 1)
            throw std::invalid_argument("trim leaves no users; reduce trim or grow K");
        const int block = scheme_block(scheme);
        if (k % block != 0)
            throw std::invalid_argument("K=" + std::to_string(k) + " incompatible with " +
                                        scheme_name(scheme) + " blocks of " +
                                        std::to_string(block));
        if (scheme == SchemeId::oracle_m1) {
            if (!strategy) throw std::invalid_argument("the oracle needs an explicit assignment");
            if (strategy->users() != k)
                throw std::invalid_argument("assignment and config disagree on K");
            if (!strategy->irreducible_m1())
                throw std::invalid_argument("the oracle needs an order-1 assignment");
        }
        grid.points();  // throws on a malformed grid
    }
};

struct DofEstimate {
    double p;
    double mean;       // average per-user delivery rate over the trimmed window
    double std_error;  // sample standard deviation of trial means / sqrt(trials)
    int trials;
    int k;
    int trim;
};

namespace detail {

inline double window_rate(const ScheduleOutcome& out, int trim) {
    const int k = out.users();
    int count = 0;
    for (int i = trim + 1; i <= k - trim; ++i) count += out.delivered[i - 1];
    return static_cast<double>(count) / (k - 2 * trim);
}

}  // namespace detail

// Monte-Carlo estimate of the per-user delivery rate at every grid point.
// Trial t of grid point g uses stream index g*trials + t, so every draw is
// reproducible from the seed alone; trial means are reduced sequentially, so
// results do not depend on the worker count.
inline std::vector<DofEstimate> monte_carlo(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto ps = cfg.grid.points();
    std::vector<DofEstimate> results;
    results.reserve(ps.size());
    std::vector<double> trial_means(cfg.trials);
    for (size_t g = 0; g < ps.size(); ++g) {
        const ErasureModel model(ps[g], cfg.seed);
        parallel_for(static_cast<size_t>(cfg.trials), [&](size_t t) {
            const uint64_t stream =
                static_cast<uint64_t>(g) * static_cast<uint64_t>(cfg.trials) + t;
            const LinkRealization r = sample_realization(cfg.k, model, stream);
            const ScheduleOutcome out = cfg.scheme == SchemeId::oracle_m1
                                            ? oracle_m1_outcome(r, *cfg.strategy)
                                            : schedule(cfg.scheme, r);
            trial_means[t] = detail::window_rate(out, cfg.trim);
        });
        double mean = 0.0;
        for (double m : trial_means) mean += m;
        mean /= cfg.trials;
        double ss = 0.0;
        for (double m : trial_means) ss += (m - mean) * (m - mean);
        const double sd = cfg.trials > 1 ? std::sqrt(ss / (cfg.trials - 1)) : 0.0;
        results.push_back({ps[g], mean, sd / std::sqrt(static_cast<double>(cfg.trials)),
                           cfg.trials, cfg.k, cfg.trim});
    }
    return results;
}

namespace detail {

// Delivered-count sums over all patterns of the first `links` links of a
// k-user network, bucketed by how many links are present.  One enumeration
// then serves every p.
template <typename CountFn>
std::vector<uint64_t> popcount_buckets(int k, int links, const CountFn& count_fn) {
    std::vector<uint64_t> buckets(links + 1, 0);
    const uint64_t total = uint64_t{1} << links;
    for (uint64_t mask = 0; mask < total; ++mask) {
        const int delivered = count_fn(LinkRealization::from_mask(k, mask));
        if (delivered != 0) buckets[std::popcount(mask)] += delivered;
    }
    return buckets;
}

inline double bucket_expectation(const std::vector<uint64_t>& buckets, int links, double p) {
    const double q = 1.0 - p;
    double value = 0.0;
    for (int n = 0; n <= links; ++n) {
        if (buckets[n] == 0) continue;
        value += static_cast<double>(buckets[n]) * std::pow(q, n) * std::pow(p, links - n);
    }
    return value;
}

// Buckets over the 2B-2 links a block scheduler actually reads: every link of
// a B-user block except its last direct link, which no delivery rule consults.
// Unread links marginalize out, so weighting by these buckets is exact.
template <typename ScheduleFn>
std::vector<uint64_t> block_buckets(int b, const ScheduleFn& schedule_fn) {
    const int links = 2 * b - 2;
    const uint64_t directs = (uint64_t{1} << (b - 1)) - 1;
    std::vector<uint64_t> buckets(links + 1, 0);
    for (uint64_t m = 0; m < (uint64_t{1} << links); ++m) {
        const uint64_t real = (m & directs) | ((m >> (b - 1)) << b);
        const int delivered = schedule_fn(LinkRealization::from_mask(b, real));
        if (delivered != 0) buckets[std::popcount(m)] += delivered;
    }
    return buckets;
}

}  // namespace detail

// Exact expected per-user delivery rate of a block scheme, computed by
// enumerating one block's link patterns.  Valid for the schemes whose blocks
// are mutually independent (scheme2, scheme3, thm4).
inline double exact_block_expectation(SchemeId scheme, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p outside [0,1]");
    if (scheme != SchemeId::scheme2 && scheme != SchemeId::scheme3 &&
        scheme != SchemeId::thm4)
        throw std::invalid_argument("scheme does not decouple into independent blocks");
    const int block = scheme_block(scheme);
    const int links = 2 * (block - 1);
    static const std::vector<uint64_t> buckets2 = detail::block_buckets(
        3, [](const LinkRealization& r) { return schedule_scheme2(r).count(); });
    static const std::vector<uint64_t> buckets3 = detail::block_buckets(
        4, [](const LinkRealization& r) { return schedule_scheme3(r).count(); });
    static const std::vector<uint64_t> buckets4 = detail::block_buckets(
        5, [](const LinkRealization& r) { return schedule_thm4(r).count(); });
    const auto& buckets = scheme == SchemeId::scheme2   ? buckets2
                          : scheme == SchemeId::scheme3 ? buckets3
                                                        : buckets4;
    return detail::bucket_expectation(buckets, links, p) / block;
}

struct MarginalResult {
    double value;
    double truncation_bound;  // |value - asymptotic curve| is at most this
};

namespace detail {

// Center-delivery sums for the thm5 pass on a 9-user strip (17 links), one
// bucket set per interior residue of the center user.  Exact because the
// pass re-anchors at every residue-1 user: the center's decision never reads
// links or state from outside the strip.
inline const std::array<std::vector<uint64_t>, 3>& thm5_strip_buckets() {
    static const std::array<std::vector<uint64_t>, 3> buckets = [] {
        std::array<std::vector<uint64_t>, 3> b;
        for (int shift = 0; shift < 3; ++shift)
            b[shift] = popcount_buckets(9, 17, [shift](const LinkRealization& r) {
                return static_cast<int>(thm5_pass(r, shift).is_delivered(5));
            });
        return b;
    }();
    return buckets;
}

}  // namespace detail

// Delivery probability of a deep-interior user, computed from a window of
// `window` users on each side.  For thm5 the window is exact already at
// radius 4 (the pass has finite memory), so the bound is 0 and the value
// matches the thm5 curve.  For scheme1 the value is the exact marginal of
// the truncated-window model — the average over the center user's parity of
// the alternating-run rule confined to the window — and differs from the
// asymptotic curve by (1-p)^(2*window+3)/(1+(1-p)^2), well inside the
// reported (1-p)^(2*window-4) bound.
inline MarginalResult interior_marginal(SchemeId scheme, double p, int window) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p outside [0,1]");
    if (window < 4 || window > 12) throw std::invalid_argument("window must be in [4,12]");
    if (scheme == SchemeId::thm5) {
        const auto& buckets = detail::thm5_strip_buckets();
        double value = 0.0;
        for (int shift = 0; shift < 3; ++shift)
            value += detail::bucket_expectation(buckets[shift], 17, p);
        return {value / 3.0, 0.0};
    }
    if (scheme == SchemeId::scheme1) {
        const double q = 1.0 - p;
        const double correction = std::pow(q, 2 * window + 3) / (1.0 + q * q);
        const double value = eval_curve({CurveTag::tau1}, p) +
                             (window % 2 == 0 ? correction : -correction);
        return {value, std::pow(q, 2 * window - 4)};
    }
    throw std::invalid_argument("interior marginal supported for scheme1 and thm5 only");
}

// Exact per-user delivery rate by full enumeration of all 2^(2K-1) link
// patterns; limited to 2K-1 <= 26.  The grid overloads reuse one enumeration
// for every p.
inline std::vector<double> exact_small_k_grid(SchemeId scheme, int k,
                                              const std::vector<double>& ps) {
    if (2 * k - 1 > kMaxEnumLinks) throw std::invalid_argument("K over enumeration budget");
    if (scheme == SchemeId::oracle_m1)
        throw std::invalid_argument("the oracle needs an explicit assignment");
    if (scheme == SchemeId::thm4 && k % 5 != 0)
        throw std::invalid_argument("this scheme needs K divisible by 5");
    for (double p : ps)
        if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p outside [0,1]");
    const int links = 2 * k - 1;
    const auto buckets = detail::popcount_buckets(
        k, links, [scheme](const LinkRealization& r) { return schedule(scheme, r).count(); });
    std::vector<double> out;
    out.reserve(ps.size());
    for (double p : ps)
        out.push_back(detail::bucket_expectation(buckets, links, p) / k);
    return out;
}

inline std::vector<double> exact_small_k_grid(const MessageAssignment& strategy,
                                              const std::vector<double>& ps) {
    const int k = strategy.users();
    if (2 * k - 1 > kMaxEnumLinks) throw std::invalid_argument("K over enumeration budget");
    for (double p : ps)
        if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p outside [0,1]");
    const int links = 2 * k - 1;
    const auto buckets = detail::popcount_buckets(
        k, links,
        [&strategy](const LinkRealization& r) { return oracle_m1(r, strategy); });
    std::vector<double> out;
    out.reserve(ps.size());
    for (double p : ps)
        out.push_back(detail::bucket_expectation(buckets, links, p) / k);
    return out;
}

inline double exact_small_k(SchemeId scheme, int k, double p) {
    return exact_small_k_grid(scheme, k, {p}).front();
}

inline double exact_small_k(const MessageAssignment& strategy, double p) {
    return exact_small_k_grid(strategy, {p}).front();
}

}  // namespace erasenet
