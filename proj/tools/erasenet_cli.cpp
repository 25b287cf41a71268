// erasenet: analytic curves, Monte-Carlo sweeps, exact enumerations, curve
// crossovers, and the acceptance suite, emitting one shared CSV schema.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "erasenet/acceptance.hpp"
#include "erasenet/analysis.hpp"
#include "erasenet/assignment.hpp"
#include "erasenet/csv.hpp"
#include "erasenet/engine.hpp"
#include "erasenet/schedulers.hpp"
#include "erasenet/structure.hpp"
#include "erasenet/topology.hpp"

namespace {

using namespace erasenet;

// "a:b:n" (n+1 evenly spaced points, a==b collapses) or a single "x".
Grid parse_grid(const std::string& text) {
    std::vector<std::string> parts;
    std::string token;
    std::istringstream in(text);
    while (std::getline(in, token, ':')) parts.push_back(token);
    const auto to_double = [&](const std::string& s) {
        size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("malformed grid '" + text + "' (want a:b:n or a single p)");
        }
        if (used != s.size())
            throw std::invalid_argument("malformed grid '" + text + "' (want a:b:n or a single p)");
        return v;
    };
    if (parts.size() == 1) {
        const double p = to_double(parts[0]);
        return {p, p, 1};
    }
    if (parts.size() != 3)
        throw std::invalid_argument("malformed grid '" + text + "' (want a:b:n or a single p)");
    Grid g;
    g.lo = to_double(parts[0]);
    g.hi = to_double(parts[1]);
    try {
        size_t used = 0;
        g.n = std::stoi(parts[2], &used);
        if (used != parts[2].size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
        throw std::invalid_argument("malformed grid '" + text + "' (step count must be an integer)");
    }
    g.points();  // validate now for a prompt error
    return g;
}

std::vector<int> parse_strategy_digits(const std::string& text) {
    std::vector<int> digits;
    std::string token;
    std::istringstream in(text);
    while (std::getline(in, token, ',')) {
        if (token.size() != 1 || token[0] < '0' || token[0] > '2')
            throw std::invalid_argument("strategy '" + text +
                                        "' must be comma-separated digits 0, 1, or 2");
        digits.push_back(token[0] - '0');
    }
    if (digits.empty()) throw std::invalid_argument("empty strategy string");
    return digits;
}

// Applies a line-based `key = value` config file to a subcommand. Keys match
// the long flag names; values given on the command line take precedence.
// Blank lines and full-line '#' comments are allowed.
void apply_config_file(CLI::App* sub, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read config file '" + path + "'");
    const auto trim = [](const std::string& s) {
        const char* ws = " \t\r";
        const size_t b = s.find_first_not_of(ws);
        if (b == std::string::npos) return std::string();
        return s.substr(b, s.find_last_not_of(ws) - b + 1);
    };
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("malformed config line " + std::to_string(lineno) +
                                        ": '" + stripped + "' (want key = value)");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        CLI::Option* op = key.empty() || key == "config"
                              ? nullptr
                              : sub->get_option_no_throw("--" + key);
        if (op == nullptr)
            throw std::invalid_argument("unknown config key '" + key + "' for " +
                                        sub->get_name());
        if (op->count() > 0) continue;  // command-line flags override the file
        op->add_result(value);
        op->run_callback();
    }
}

// Rounds K up to a whole number of scheme blocks, with a note on stderr.
int pad_k(SchemeId scheme, int k) {
    const int block = scheme_block(scheme);
    if (k % block == 0) return k;
    const int padded = ((k + block - 1) / block) * block;
    std::cerr << "note: K padded from " << k << " to " << padded << " for "
              << scheme_name(scheme) << " (block length " << block << ")\n";
    return padded;
}

void emit(const std::string& out_path, const std::string& content) {
    if (out_path == "-") {
        std::cout << content;
        std::cout.flush();
    } else {
        write_text_atomic(out_path, content);
    }
}

double normalized_limit(CurveId id) {
    switch (id.tag) {
        case CurveTag::tau_tdma:
        case CurveTag::convex_s2:
        case CurveTag::convex_s4: return 1.0;
        default: return limit_ratio(id);
    }
}

int run_analytic(const std::vector<std::string>& curve_names, const std::string& grid_text,
                 bool normalize, const std::string& out_path) {
    const Grid grid = parse_grid(grid_text);
    std::vector<CurveId> curves;
    for (const auto& name : curve_names) curves.push_back(parse_curve(name));
    std::string body = std::string(kCsvHeader) + "\n";
    for (const CurveId& curve : curves) {
        for (double p : grid.points()) {
            CsvRow row;
            row.p = p;
            row.id = curve_name(curve);
            row.source = "analytic";
            if (normalize)
                row.value = p == 1.0 ? normalized_limit(curve) : eval_curve(curve, p) / (1.0 - p);
            else
                row.value = eval_curve(curve, p);
            body += row.render() + "\n";
        }
    }
    emit(out_path, body);
    return 0;
}

int run_sweep(const std::string& scheme_name_text, int k, const std::string& grid_text,
              int trials, uint64_t seed, int trim, const std::string& strategy_text,
              const std::string& out_path) {
    ExperimentConfig cfg;
    cfg.scheme = parse_scheme(scheme_name_text);
    cfg.k = pad_k(cfg.scheme, k);
    cfg.grid = parse_grid(grid_text);
    cfg.trials = trials;
    cfg.seed = seed;
    cfg.trim = trim;
    if (cfg.scheme == SchemeId::oracle_m1)
        cfg.strategy = assignment_from_string(parse_strategy_digits(strategy_text), cfg.k);
    std::string body = std::string(kCsvHeader) + "\n";
    for (const DofEstimate& est : monte_carlo(cfg)) {
        CsvRow row;
        row.p = est.p;
        row.id = scheme_name(cfg.scheme);
        row.k = est.k;
        row.trials = est.trials;
        row.value = est.mean;
        row.ci_low = est.mean - 1.96 * est.std_error;
        row.ci_high = est.mean + 1.96 * est.std_error;
        row.source = "mc";
        body += row.render() + "\n";
    }
    emit(out_path, body);
    return 0;
}

void dump_realizations(SchemeId scheme, int k,
                       const std::optional<MessageAssignment>& strategy) {
    // Subnetwork decompositions exist for order-1 assignments only.
    std::optional<MessageAssignment> split_against;
    if (scheme == SchemeId::oracle_m1)
        split_against = strategy;
    else if (scheme != SchemeId::thm4 && scheme != SchemeId::thm5)
        split_against = scheme_assignment(scheme, k);
    enumerate_realizations(k, [&](const LinkRealization& r) {
        const ScheduleOutcome out = scheme == SchemeId::oracle_m1
                                        ? oracle_m1_outcome(r, *strategy)
                                        : schedule(scheme, r);
        std::string line = r.to_hex() + " -> {";
        bool first = true;
        for (int i = 1; i <= k; ++i) {
            if (!out.is_delivered(i)) continue;
            if (!first) line += ",";
            line += std::to_string(i) + "(" + std::to_string(out.server[i - 1]) + ")";
            first = false;
        }
        line += "}";
        if (split_against)
            line += " " + render_decomposition(split_subnetworks(r, *split_against));
        std::cerr << line << "\n";
    });
}

int run_exact(const std::string& scheme_name_text, const std::string& grid_text, int k,
              bool dump, const std::string& strategy_text, const std::string& out_path) {
    const SchemeId scheme = parse_scheme(scheme_name_text);
    const Grid grid = parse_grid(grid_text);
    std::string body = std::string(kCsvHeader) + "\n";
    if (k == 0) {
        if (dump) throw std::invalid_argument("--dump needs --k to pick a network size");
        if (scheme == SchemeId::scheme1 || scheme == SchemeId::thm5)
            throw std::invalid_argument(std::string(scheme_name(scheme)) +
                                        " does not decouple into blocks; pass --k for a "
                                        "finite-K enumeration");
        if (scheme == SchemeId::oracle_m1)
            throw std::invalid_argument("the oracle needs --k (and --strategy)");
        for (double p : grid.points()) {
            CsvRow row;
            row.p = p;
            row.id = scheme_name(scheme);
            row.value = exact_block_expectation(scheme, p);
            row.source = "exact";
            body += row.render() + "\n";
        }
        emit(out_path, body);
        return 0;
    }
    const int padded = scheme == SchemeId::oracle_m1 ? k : pad_k(scheme, k);
    std::optional<MessageAssignment> strategy;
    if (scheme == SchemeId::oracle_m1)
        strategy = assignment_from_string(parse_strategy_digits(strategy_text), padded);
    const std::vector<double> ps = grid.points();
    const std::vector<double> values = scheme == SchemeId::oracle_m1
                                           ? exact_small_k_grid(*strategy, ps)
                                           : exact_small_k_grid(scheme, padded, ps);
    for (size_t i = 0; i < ps.size(); ++i) {
        CsvRow row;
        row.p = ps[i];
        row.id = scheme_name(scheme);
        row.k = padded;
        row.value = values[i];
        row.source = "exact";
        body += row.render() + "\n";
    }
    if (dump) dump_realizations(scheme, padded, strategy);
    emit(out_path, body);
    return 0;
}

int run_crossover(const std::string& a_name, const std::string& b_name, double lo, double hi,
                  const std::string& out_path) {
    const CurveId a = parse_curve(a_name);
    const CurveId b = parse_curve(b_name);
    const double p = find_crossover(a, b, lo, hi);
    std::string body = "curve_a,curve_b,p_star\n";
    body += curve_name(a) + "," + curve_name(b) + "," + format_sig10(p) + "\n";
    emit(out_path, body);
    return 0;
}

int run_verify(const AcceptanceOptions& opt) {
    const std::vector<CheckResult> results = run_acceptance(opt);
    bool all = true;
    for (const CheckResult& c : results) {
        std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << " — " << c.detail << "\n";
        all = all && c.pass;
    }
    std::cout << (all ? "all checks passed" : "SOME CHECKS FAILED") << "\n";
    return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Erasure-network throughput toolkit"};
    app.require_subcommand(1);

    // analytic
    auto* analytic = app.add_subcommand("analytic", "evaluate closed-form curves on a p grid");
    std::vector<std::string> curve_names;
    std::string grid_text = "0:1:100";
    bool normalize = false;
    std::string out_path = "-";
    analytic->add_option("--curves", curve_names,
                         "comma-separated curves (tau1,tau2,tau3,tau_tdma,thm4,thm5,"
                         "convex_s2:<n>,convex_s4:<n>)")
        ->required()
        ->delimiter(',');
    analytic->add_option("--p", grid_text, "p grid a:b:n (n+1 points) or a single p");
    analytic->add_flag("--normalize", normalize, "divide values by 1-p (limit ratio at p=1)");
    analytic->add_option("--out", out_path, "output file, '-' for stdout");
    std::string analytic_config;
    analytic->add_option("--config", analytic_config,
                         "key = value file with the same keys as the flags");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Monte-Carlo delivery-rate sweep");
    std::string scheme_text = "scheme1";
    int k = 300;
    std::string sweep_grid = "0.1:0.9:8";
    int trials = 200;
    uint64_t seed = 1;
    int trim = 6;
    std::string strategy_text = "1";
    std::string sweep_out = "-";
    sweep->add_option("--scheme", scheme_text,
                      "scheme1|scheme2|scheme3|thm4|thm5|oracle")
        ->required();
    sweep->add_option("--k", k, "number of users (padded up to whole blocks)");
    sweep->add_option("--p", sweep_grid, "p grid a:b:n or a single p");
    sweep->add_option("--trials", trials, "Monte-Carlo trials per grid point");
    sweep->add_option("--seed", seed, "RNG seed");
    sweep->add_option("--trim", trim, "users dropped from each edge before averaging");
    sweep->add_option("--strategy", strategy_text,
                      "oracle only: strategy string digits, e.g. 2,1,0");
    sweep->add_option("--out", sweep_out, "output file, '-' for stdout");
    std::string sweep_config;
    sweep->add_option("--config", sweep_config,
                      "key = value file with the same keys as the flags");

    // exact
    auto* exact = app.add_subcommand("exact", "exact expectations by enumeration");
    std::string exact_scheme = "scheme2";
    std::string exact_grid = "0:1:100";
    int exact_k = 0;
    bool dump = false;
    std::string exact_strategy = "1";
    std::string exact_out = "-";
    exact->add_option("--scheme", exact_scheme,
                      "scheme1|scheme2|scheme3|thm4|thm5|oracle")
        ->required();
    exact->add_option("--p", exact_grid, "p grid a:b:n or a single p");
    exact->add_option("--k", exact_k,
                      "finite network size (omit for the per-block expectation)");
    exact->add_flag("--dump", dump, "list every realization's deliveries on stderr");
    exact->add_option("--strategy", exact_strategy,
                      "oracle only: strategy string digits, e.g. 2,1,0");
    exact->add_option("--out", exact_out, "output file, '-' for stdout");
    std::string exact_config;
    exact->add_option("--config", exact_config,
                      "key = value file with the same keys as the flags");

    // crossover
    auto* crossover = app.add_subcommand("crossover", "bisection crossover of two curves");
    std::string curve_a, curve_b;
    double lo = 0.0, hi = 1.0;
    std::string cross_out = "-";
    crossover->add_option("--a", curve_a, "first curve")->required();
    crossover->add_option("--b", curve_b, "second curve")->required();
    crossover->add_option("--lo", lo, "bracket start")->required();
    crossover->add_option("--hi", hi, "bracket end")->required();
    crossover->add_option("--out", cross_out, "output file, '-' for stdout");

    // verify
    auto* verify = app.add_subcommand("verify", "run the acceptance checks");
    AcceptanceOptions opt;
    verify->add_option("--seed", opt.seed, "RNG seed for the statistical checks");
    verify->add_option("--k", opt.mc_k, "network size for the Monte-Carlo checks");
    verify->add_option("--trials", opt.mc_trials, "trials for the Monte-Carlo checks");
    verify->add_option("--runs", opt.validity_runs, "random validity runs per scheme");
    std::string verify_config;
    verify->add_option("--config", verify_config,
                       "key = value file with the same keys as the flags");

    CLI11_PARSE(app, argc, argv);

    try {
        if (analytic->parsed() && !analytic_config.empty())
            apply_config_file(analytic, analytic_config);
        if (sweep->parsed() && !sweep_config.empty())
            apply_config_file(sweep, sweep_config);
        if (exact->parsed() && !exact_config.empty())
            apply_config_file(exact, exact_config);
        if (verify->parsed() && !verify_config.empty())
            apply_config_file(verify, verify_config);
        if (analytic->parsed())
            return run_analytic(curve_names, grid_text, normalize, out_path);
        if (sweep->parsed())
            return run_sweep(scheme_text, k, sweep_grid, trials, seed, trim, strategy_text,
                             sweep_out);
        if (exact->parsed())
            return run_exact(exact_scheme, exact_grid, exact_k, dump, exact_strategy,
                             exact_out);
        if (crossover->parsed()) return run_crossover(curve_a, curve_b, lo, hi, cross_out);
        if (verify->parsed()) return run_verify(opt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
