#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <string>
#include <vector>

#include "erasenet/analysis.hpp"
#include "erasenet/assignment.hpp"
#include "erasenet/engine.hpp"
#include "erasenet/schedulers.hpp"
#include "erasenet/topology.hpp"

using namespace erasenet;
using Catch::Approx;

namespace {

struct EnvGuard {
    std::string name;
    std::string old;
    bool had;
    EnvGuard(const char* n, const char* value) : name(n) {
        const char* prev = std::getenv(n);
        had = prev != nullptr;
        if (had) old = prev;
        setenv(n, value, 1);
    }
    ~EnvGuard() {
        if (had) setenv(name.c_str(), old.c_str(), 1);
        else unsetenv(name.c_str());
    }
};

ExperimentConfig base_config(SchemeId s, int k, double p, int trials, uint64_t seed = 1) {
    ExperimentConfig cfg;
    cfg.scheme = s;
    cfg.k = k;
    cfg.grid = {p, p, 1};
    cfg.trials = trials;
    cfg.seed = seed;
    return cfg;
}

// Independent model of the alternating scheduler's interior-user delivery
// probability on a truncated window: a strip of `w` users on each side of
// the center, links beyond the strip treated as absent, the center's global
// index parity averaged over both possibilities.  The run rule is re-stated
// from scratch: the maximal all-present run around the center is delivered
// on its even global indices when both run endpoints are even, else on the
// odd ones.
std::vector<uint64_t> strip_delivery_buckets(int w) {
    const int n = 2 * w + 1;
    const int links = 2 * n - 1;
    const int center = w + 1;
    std::vector<uint64_t> buckets(links + 1, 0);
    for (uint64_t mask = 0; mask < (uint64_t{1} << links); ++mask) {
        const LinkRealization r = LinkRealization::from_mask(n, mask);
        if (!r.direct(center)) continue;
        int a = center, b = center;
        while (a > 1 && r.cross(a - 1) && r.direct(a - 1)) --a;
        while (b < n && r.cross(b) && r.direct(b + 1)) ++b;
        int delivered_over_parities = 0;
        for (int s = 0; s <= 1; ++s) {  // s = global parity of the center user
            const bool even_a = ((s + a + center) & 1) == 0;
            const bool even_b = ((s + b + center) & 1) == 0;
            const int target = (even_a && even_b) ? 0 : 1;
            if (s == target) ++delivered_over_parities;
        }
        buckets[std::popcount(mask)] += delivered_over_parities;
    }
    return buckets;
}

}  // namespace

TEST_CASE("grids enumerate evenly spaced points") {
    CHECK((Grid{0.0, 0.0, 1}.points()) == std::vector<double>{0.0});
    CHECK((Grid{0.2, 0.2, 7}.points()) == std::vector<double>{0.2});
    const auto pts = Grid{0.0, 1.0, 4}.points();
    REQUIRE(pts.size() == 5);
    CHECK(pts[1] == Approx(0.25).margin(1e-15));
    CHECK(pts[4] == 1.0);
    CHECK_THROWS_WITH((Grid{0.5, 0.2, 1}.points()), "grid start exceeds grid end");
    CHECK_THROWS_WITH((Grid{0.0, 1.0, 0}.points()), "grid needs at least one step");
    CHECK_THROWS_WITH((Grid{-0.1, 0.5, 1}.points()), "p outside [0,1]");
}

TEST_CASE("config validation messages") {
    CHECK_THROWS_WITH(base_config(SchemeId::scheme1, 0, 0.5, 10).validate(),
                      "K must be positive");
    CHECK_THROWS_WITH(base_config(SchemeId::scheme1, 30, 0.5, 0).validate(),
                      "trials must be positive");
    auto trim = base_config(SchemeId::scheme1, 30, 0.5, 10);
    trim.trim = -1;
    CHECK_THROWS_WITH(trim.validate(), "trim must be non-negative");
    trim.trim = 15;
    CHECK_THROWS_WITH(trim.validate(), "trim leaves no users; reduce trim or grow K");
    auto blocky = base_config(SchemeId::scheme2, 10, 0.5, 10);
    blocky.trim = 2;  // keep the trim window valid so the block check fires
    CHECK_THROWS_WITH(blocky.validate(), "K=10 incompatible with scheme2 blocks of 3");
    auto oracle = base_config(SchemeId::oracle_m1, 30, 0.5, 10);
    CHECK_THROWS_WITH(oracle.validate(), "the oracle needs an explicit assignment");
    oracle.strategy = irreducible_m1_assignment(29, 0);
    CHECK_THROWS_WITH(oracle.validate(), "assignment and config disagree on K");
    oracle.strategy = comp_assignment(CompKind::thm5, 30);
    CHECK_THROWS_WITH(oracle.validate(), "the oracle needs an order-1 assignment");
    oracle.strategy = irreducible_m1_assignment(30, 5);
    CHECK_NOTHROW(oracle.validate());
}

TEST_CASE("worker count respects the environment override") {
    {
        EnvGuard env("ERASENET_THREADS", "3");
        CHECK(engine_threads() == 3);
    }
    {
        EnvGuard env("ERASENET_THREADS", "0");
        CHECK(engine_threads() >= 1);
    }
    {
        EnvGuard env("ERASENET_THREADS", "soup");
        CHECK(engine_threads() >= 1);
    }
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), [&](size_t i) { hits[i] += 1; });
    CHECK(std::accumulate(hits.begin(), hits.end(), 0) == 1000);
    CHECK(*std::min_element(hits.begin(), hits.end()) == 1);
}

TEST_CASE("estimates are bitwise independent of the worker count") {
    auto run = [](const char* threads) {
        EnvGuard env("ERASENET_THREADS", threads);
        auto cfg = base_config(SchemeId::thm5, 300, 0.0, 40, 7);
        cfg.grid = {0.1, 0.7, 3};
        return monte_carlo(cfg);
    };
    const auto ones = run("1");
    const auto many = run("5");
    REQUIRE(ones.size() == many.size());
    for (size_t i = 0; i < ones.size(); ++i) {
        CHECK(ones[i].mean == many[i].mean);
        CHECK(ones[i].std_error == many[i].std_error);
        CHECK(ones[i].p == many[i].p);
    }
}

TEST_CASE("degenerate erasure probabilities give exact rates") {
    SECTION("p = 1 delivers nothing, with zero spread") {
        for (SchemeId s : {SchemeId::scheme1, SchemeId::scheme2, SchemeId::thm5}) {
            const auto est = monte_carlo(base_config(s, 300, 1.0, 16));
            REQUIRE(est.size() == 1);
            CHECK(est[0].mean == 0.0);
            CHECK(est[0].std_error == 0.0);
        }
    }
    SECTION("p = 0 hits the all-present window fractions") {
        // Identical per-trial means still pick up one ulp of noise when the
        // trial sum is not a dyadic rational, so compare with a tight margin.
        const int k = 3000;
        const auto rate = [&](SchemeId s) {
            const auto est = monte_carlo(base_config(s, k, 0.0, 8));
            REQUIRE(est.size() == 1);
            CHECK(est[0].std_error <= 1e-15);
            return est[0].mean;
        };
        CHECK(rate(SchemeId::scheme1) == 0.5);
        CHECK(rate(SchemeId::scheme2) == Approx(1992.0 / 2988.0).margin(1e-15));
        CHECK(rate(SchemeId::scheme3) == 0.5);
        CHECK(rate(SchemeId::thm4) == Approx(2390.0 / 2988.0).margin(1e-15));
        CHECK(rate(SchemeId::thm5) == Approx(1992.0 / 2988.0).margin(1e-15));
    }
}

TEST_CASE("sampled rates track the exact interior rates") {
    const auto check_scheme = [](SchemeId s, double want, double p) {
        const auto est = monte_carlo(base_config(s, 300, p, 200)).front();
        INFO(scheme_name(s) << " at p=" << p << ": mean " << est.mean << " vs " << want
                            << " +- " << est.std_error);
        CHECK(std::abs(est.mean - want) <= 4.0 * est.std_error + 1e-12);
    };
    check_scheme(SchemeId::scheme1, eval_curve({CurveTag::tau1}, 0.3), 0.3);
    check_scheme(SchemeId::scheme2, eval_curve({CurveTag::tau2}, 0.3), 0.3);
    check_scheme(SchemeId::scheme3, eval_curve({CurveTag::tau3}, 0.5), 0.5);
    // The period-3 pass delivers the union of its two routes; its closed form
    // adds the route probabilities, which overlap with mass (pq)^3 per cell.
    check_scheme(SchemeId::thm5,
                 eval_curve({CurveTag::thm5_bound}, 0.5) - std::pow(0.25, 3) / 3.0, 0.5);
}

TEST_CASE("the oracle on a tiled double-load strategy matches its curve") {
    auto cfg = base_config(SchemeId::oracle_m1, 300, 0.3, 120);
    cfg.strategy = assignment_from_string({2, 1, 0}, 300);
    const auto est = monte_carlo(cfg).front();
    CHECK(std::abs(est.mean - eval_curve({CurveTag::tau2}, 0.3)) <=
          4.0 * est.std_error + 1e-12);
}

TEST_CASE("trimming more than the boundary layer changes nothing significant") {
    auto narrow = base_config(SchemeId::thm5, 300, 0.5, 120);
    auto wide = narrow;
    wide.trim = 12;
    const auto a = monte_carlo(narrow).front();
    const auto b = monte_carlo(wide).front();
    CHECK(std::abs(a.mean - b.mean) <= 3.0 * (a.std_error + b.std_error) + 1e-12);
}

TEST_CASE("standard error scales like one over the root of the trial count") {
    std::vector<double> scaled;
    for (int trials : {100, 400, 1600}) {
        const auto est = monte_carlo(base_config(SchemeId::thm5, 300, 0.5, trials)).front();
        scaled.push_back(est.std_error * std::sqrt(double(trials)));
    }
    for (double s : scaled) {
        CHECK(s > 0.7 * scaled[0]);
        CHECK(s < 1.3 * scaled[0]);
    }
}

TEST_CASE("block-pattern enumeration reproduces the closed forms exactly") {
    for (int i = 0; i <= 100; ++i) {
        const double p = i / 100.0;
        CHECK(exact_block_expectation(SchemeId::scheme2, p) ==
              Approx(eval_curve({CurveTag::tau2}, p)).margin(1e-12));
        CHECK(exact_block_expectation(SchemeId::scheme3, p) ==
              Approx(eval_curve({CurveTag::tau3}, p)).margin(1e-12));
        CHECK(exact_block_expectation(SchemeId::thm4, p) ==
              Approx(eval_curve({CurveTag::thm4_bound}, p)).margin(1e-12));
    }
    CHECK_THROWS_WITH(exact_block_expectation(SchemeId::scheme1, 0.5),
                      "scheme does not decouple into independent blocks");
    CHECK_THROWS_WITH(exact_block_expectation(SchemeId::thm5, 0.5),
                      "scheme does not decouple into independent blocks");
}

TEST_CASE("interior marginal of the sliding-window scheme is exact") {
    // The pass's exact interior rate sits (pq)^3/3 below its closed form at
    // every p: the form adds the left-route and own-route probabilities for
    // the third residue class, but both routes are live on the six-link
    // "steal" pattern (left neighbour served by ITS left transmitter while
    // the user's own cross, direct are present and the outgoing cross is
    // absent), and a message is only delivered once.
    for (int i = 0; i <= 20; ++i) {
        const double p = i / 20.0;
        const double overlap = std::pow(p * (1.0 - p), 3) / 3.0;
        const auto m = interior_marginal(SchemeId::thm5, p, 4);
        CHECK(m.truncation_bound == 0.0);
        CHECK(m.value ==
              Approx(eval_curve({CurveTag::thm5_bound}, p) - overlap).margin(1e-12));
        for (int w : {5, 9, 12})
            CHECK(interior_marginal(SchemeId::thm5, p, w).value == m.value);
    }
    CHECK_THROWS_WITH(interior_marginal(SchemeId::thm5, 0.5, 3), "window must be in [4,12]");
    CHECK_THROWS_WITH(interior_marginal(SchemeId::thm5, 0.5, 13), "window must be in [4,12]");
    CHECK_THROWS_WITH(interior_marginal(SchemeId::scheme2, 0.5, 4),
                      "interior marginal supported for scheme1 and thm5 only");
}

TEST_CASE("interior marginal of the alternating scheme matches a literal strip model") {
    for (int w : {4, 5}) {
        const auto buckets = strip_delivery_buckets(w);
        const int links = 2 * (2 * w + 1) - 1;
        for (int i = 0; i <= 10; ++i) {
            const double p = i / 10.0;
            const double strip = detail::bucket_expectation(buckets, links, p) / 2.0;
            const auto m = interior_marginal(SchemeId::scheme1, p, w);
            CHECK(m.value == Approx(strip).margin(1e-12));
            CHECK(std::abs(m.value - eval_curve({CurveTag::tau1}, p)) <=
                  m.truncation_bound + 1e-12);
        }
    }
    // The window-4 truncation error at p = 0.5 is exactly (1/2)^11 / (5/4).
    const auto m = interior_marginal(SchemeId::scheme1, 0.5, 4);
    CHECK(m.value - eval_curve({CurveTag::tau1}, 0.5) == Approx(3.90625e-4).margin(1e-15));
    CHECK(m.truncation_bound == Approx(0.0625).margin(1e-15));
}

TEST_CASE("exact small-network enumeration") {
    SECTION("two users under the chain oracle at even odds") {
        CHECK(exact_small_k(irreducible_m1_assignment(2, 0), 0.5) ==
              Approx(7.0 / 16.0).margin(1e-15));
    }
    SECTION("endpoints agree with the degenerate realizations") {
        for (SchemeId s : {SchemeId::scheme1, SchemeId::scheme2, SchemeId::scheme3,
                           SchemeId::thm5}) {
            const int k = s == SchemeId::scheme2 ? 6 : 8;
            const double full = double(schedule(s, LinkRealization::all_present(k)).count()) / k;
            CHECK(exact_small_k(s, k, 0.0) == Approx(full).margin(1e-12));
            CHECK(exact_small_k(s, k, 1.0) == Approx(0.0).margin(1e-12));
        }
        CHECK(exact_small_k(SchemeId::thm4, 5, 0.0) == Approx(0.8).margin(1e-12));
    }
    SECTION("whole-network enumeration agrees with per-block enumeration") {
        for (double p : {0.0, 0.2, 0.5, 0.8, 1.0}) {
            CHECK(exact_small_k(SchemeId::scheme2, 9, p) ==
                  Approx(exact_block_expectation(SchemeId::scheme2, p)).margin(1e-13));
            CHECK(exact_small_k(SchemeId::thm4, 5, p) ==
                  Approx(exact_block_expectation(SchemeId::thm4, p)).margin(1e-13));
        }
    }
    SECTION("budget and precondition errors") {
        CHECK_THROWS_WITH(exact_small_k(SchemeId::scheme1, 14, 0.5),
                          "K over enumeration budget");
        CHECK_THROWS_WITH(exact_small_k(SchemeId::thm4, 9, 0.5),
                          "this scheme needs K divisible by 5");
        CHECK_THROWS_AS(exact_small_k(SchemeId::oracle_m1, 5, 0.5), std::invalid_argument);
    }
    SECTION("a p-grid reuses one enumeration consistently") {
        const std::vector<double> ps{0.1, 0.4, 0.9};
        const auto grid = exact_small_k_grid(SchemeId::scheme3, 8, ps);
        REQUIRE(grid.size() == 3);
        for (size_t i = 0; i < ps.size(); ++i)
            CHECK(grid[i] == exact_small_k(SchemeId::scheme3, 8, ps[i]));
    }
}

TEST_CASE("no single-carrier strategy beats the tiled ones by more than the boundary") {
    // On six users, every irreducible strategy's oracle rate stays within
    // 2/6 of the best tiled strategy: the advantage of bespoke assignments
    // is a boundary effect.
    const std::vector<MessageAssignment> tiled{
        irreducible_m1_assignment(6, 0),
        assignment_from_string({2, 1, 0}, 6),
        assignment_from_string({1, 2, 1, 0}, 6),
    };
    for (double p : {0.1, 0.5, 0.9}) {
        double best_tiled = 0.0;
        for (const auto& a : tiled) best_tiled = std::max(best_tiled, exact_small_k(a, p));
        for (uint64_t mask = 0; mask < irreducible_m1_count(6); ++mask) {
            const double v = exact_small_k(irreducible_m1_assignment(6, mask), p);
            CHECK(v <= best_tiled + 2.0 / 6.0 + 1e-12);
        }
    }
}

TEST_CASE("finite mixtures stay within reach of their asymptotic curve") {
    const MessageAssignment strategy = assignment_from_string({2, 1, 1, 1, 0}, 10);
    for (double p : {0.1, 0.5, 0.9}) {
        const double exact = exact_small_k(strategy, p);
        const double curve = eval_curve({CurveTag::convex_s2, 3}, p);
        CHECK(exact <= curve + 0.2);
        CHECK(exact >= curve - 0.2);
    }
}
