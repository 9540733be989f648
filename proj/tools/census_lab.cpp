#include "census/asymptotics.hpp"
#include "census/count_table.hpp"
#include "census/errors.hpp"
#include "census/exact.hpp"
#include "census/graph_sampler.hpp"
#include "census/montecarlo.hpp"
#include "census/rng.hpp"
#include "census/tilt.hpp"
#include "census/version.hpp"
#include "census/walk.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace {

using json = nlohmann::ordered_json;

constexpr int exit_usage = 2;
constexpr int exit_cap = 3;
constexpr int exit_budget = 4;

struct Caps {
    int max_vertices = 32;
    long long max_edges = 496;   // C(32,2)
    int exact_tree_k = 200;
    int exact_mstar_k = 30;
};

Caps load_caps() {
    Caps caps;
    const char* raw = std::getenv("CENSUS_LAB_CAPS");
    if (raw == nullptr || *raw == '\0') return caps;
    json parsed;
    try {
        parsed = json::parse(raw);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("CENSUS_LAB_CAPS is not valid JSON: ") + e.what());
    }
    if (parsed.contains("max_vertices")) caps.max_vertices = parsed["max_vertices"].get<int>();
    if (parsed.contains("max_edges")) caps.max_edges = parsed["max_edges"].get<long long>();
    if (parsed.contains("exact_tree_k")) caps.exact_tree_k = parsed["exact_tree_k"].get<int>();
    if (parsed.contains("exact_mstar_k")) caps.exact_mstar_k = parsed["exact_mstar_k"].get<int>();
    return caps;
}

std::vector<long long> parse_ll_list(const std::string& text) {
    std::vector<long long> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stoll(item));
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    return out;
}

// l-rule mini-language: const:N, pow:a -> floor(k^a), lin:b -> floor(b*k),
// nlogn:c -> floor(c*k*ln k).
std::function<long long(long long)> parse_l_rule(const std::string& rule) {
    const auto colon = rule.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("l-rule must look like const:N, pow:a, lin:b, or nlogn:c");
    const std::string kind = rule.substr(0, colon);
    const double arg = std::stod(rule.substr(colon + 1));
    if (kind == "const") {
        const auto fixed = static_cast<long long>(arg);
        return [fixed](long long) { return fixed; };
    }
    if (kind == "pow")
        return [arg](long long k) {
            return static_cast<long long>(std::floor(std::pow(static_cast<double>(k), arg)));
        };
    if (kind == "lin")
        return [arg](long long k) {
            return static_cast<long long>(std::floor(arg * static_cast<double>(k)));
        };
    if (kind == "nlogn")
        return [arg](long long k) {
            const double kd = static_cast<double>(k);
            return static_cast<long long>(std::floor(arg * kd * std::log(kd)));
        };
    throw std::invalid_argument("unknown l-rule kind: " + kind);
}

std::uint64_t pick_seed(const std::optional<std::uint64_t>& given) {
    if (given) return *given;
    std::random_device dev;
    return (static_cast<std::uint64_t>(dev()) << 32) ^ dev();
}

json base_record(const char* command) {
    json out;
    out["version"] = census::version;
    out["command"] = command;
    return out;
}

void attach_model_params(json& out, long long k, double p) {
    out["epsilon"] = census::epsilon_value(k, p);
    out["c"] = p * static_cast<double>(k);
}

void emit(const json& out) { std::cout << out.dump() << "\n"; }

// ---------------------------------------------------------------------------

struct CountArgs {
    long long k = 0;
    long long l = 0;
    bool asymptotic = false;
};

int run_count(const CountArgs& args, const Caps& caps) {
    if (args.k < 1 || args.l < 0)
        throw std::invalid_argument("count: need k >= 1 and l >= 0");
    json out = base_record("count");
    out["k"] = args.k;
    out["l"] = args.l;
    const census::RegimeTag tag = census::classify_regime(args.k, static_cast<double>(args.l));
    out["regime"] = census::regime_name(tag.kind);

    const long long edges = args.k - 1 + args.l;
    const bool within_caps = args.k <= caps.max_vertices && edges <= caps.max_edges;
    if (!args.asymptotic && !within_caps)
        throw census::cap_error("count: (k, l) exceeds table caps; pass --asymptotic or raise "
                                "CENSUS_LAB_CAPS");
    if (within_caps) {
        const census::CountTable table(static_cast<int>(args.k), edges);
        out["exact"] = census::to_string(table.by_complexity(static_cast<int>(args.k), args.l));
    } else {
        out["exact"] = nullptr;
    }
    if (args.asymptotic) {
        out["log_asymptotic"] = census::asymptotic_log_count(args.k, args.l).log_value;
    } else {
        out["log_asymptotic"] = nullptr;
    }
    out["arithmetic_mode"] = within_caps ? "exact" : "float";
    emit(out);
    return 0;
}

struct VerifyArgs {
    int k_max = 0;
    std::string p_list;
};

int run_verify_identity(const VerifyArgs& args, const Caps& caps) {
    if (args.k_max < 2) throw std::invalid_argument("verify-identity: k_max must be >= 2");
    if (args.k_max > caps.exact_mstar_k)
        throw census::cap_error("verify-identity: k_max exceeds exact DP cap " +
                                std::to_string(caps.exact_mstar_k));
    std::vector<census::ExactRational> ps;
    {
        std::stringstream ss(args.p_list);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (item.empty()) continue;
            ps.push_back(census::parse_rational(item));
        }
    }
    if (ps.empty()) throw std::invalid_argument("verify-identity: empty p list");
    for (const auto& p : ps) census::require_tilt(p);

    const long long max_edges =
        args.k_max - 1 + census::CountTable::max_complexity(args.k_max);
    const census::CountTable table(args.k_max, max_edges);
    long long rows = 0, failures = 0;
    for (int k = 2; k <= args.k_max; ++k) {
        for (const auto& p : ps) {
            const census::MStarDistribution dist =
                census::mstar_distribution(k, p, caps.exact_mstar_k);
            const long long l_max = census::CountTable::max_complexity(k);
            for (long long l = 0; l <= l_max; ++l) {
                const census::IdentityReport rep = census::verify_identity(k, l, p, table, dist);
                json row = base_record("verify-identity");
                row["k"] = rep.k;
                row["l"] = rep.l;
                row["p"] = census::to_string(rep.p);
                row["a1"] = census::to_string(rep.a1);
                row["a2"] = census::to_string(rep.a2);
                row["a3"] = census::to_string(rep.a3);
                row["lhs"] = census::to_string(rep.lhs);
                row["rhs"] = census::to_string(rep.rhs);
                row["equal"] = rep.equal;
                row["arithmetic_mode"] = "exact";
                emit(row);
                ++rows;
                if (!rep.equal) ++failures;
            }
        }
    }
    json summary = base_record("verify-identity-summary");
    summary["rows"] = rows;
    summary["failures"] = failures;
    summary["arithmetic_mode"] = "exact";
    emit(summary);
    return failures == 0 ? 0 : exit_budget;
}

struct SimulateArgs {
    long long k = 0;
    std::string p;
    double lambda = 0.0;
    double eps = 0.0;
    long long horizon = 0;
    long long l = -1;
    long long samples = 100000;
    std::optional<std::uint64_t> seed;
    unsigned workers = 1;
    std::string u_grid = "-2,-1,-0.5,0,0.5,1,2";
};

int run_simulate_tree(const SimulateArgs& args) {
    if (args.p.empty()) throw std::invalid_argument("simulate tree: --p is required");
    const double p = census::parse_rational(args.p).convert_to<double>();
    const std::uint64_t seed = pick_seed(args.seed);
    const census::McEstimate est =
        census::estimate_prob_tree(static_cast<int>(args.k), p, args.samples, seed, args.workers);
    json out = base_record("simulate-tree");
    out["k"] = args.k;
    out["p"] = p;
    out["samples"] = est.n;
    out["accepted"] = est.accepted;
    out["mean"] = est.mean;
    out["stderr"] = est.stderr_;
    out["seed"] = est.seed;
    out["workers"] = est.workers;
    attach_model_params(out, args.k, p);
    out["arithmetic_mode"] = "float";
    emit(out);
    return 0;
}

int run_simulate_esc_left(const SimulateArgs& args) {
    const std::uint64_t seed = pick_seed(args.seed);
    const census::McEstimate est =
        census::estimate_esc_left(args.lambda, args.horizon, args.samples, seed, args.workers);
    json out = base_record("simulate-esc-left");
    out["lambda"] = args.lambda;
    out["L"] = args.horizon;
    out["samples"] = est.n;
    out["mean"] = est.mean;
    out["stderr"] = est.stderr_;
    out["target"] = census::survival_probability(args.lambda);
    out["seed"] = est.seed;
    out["workers"] = est.workers;
    out["arithmetic_mode"] = "float";
    emit(out);
    return 0;
}

int run_simulate_esc_right(const SimulateArgs& args) {
    if (args.eps <= 0 || args.eps >= 1)
        throw std::invalid_argument("simulate esc-right: --eps must lie in (0,1)");
    const std::uint64_t seed = pick_seed(args.seed);
    const double lambda_r = 1.0 - args.eps;
    const census::McEstimate est =
        census::estimate_esc_right(lambda_r, args.horizon, args.samples, seed, args.workers);
    json out = base_record("simulate-esc-right");
    out["eps"] = args.eps;
    out["lambda_r"] = lambda_r;
    out["L"] = args.horizon;
    out["samples"] = est.n;
    out["mean"] = est.mean;
    out["stderr"] = est.stderr_;
    out["target"] = census::esc_right_probability(args.eps);
    out["seed"] = est.seed;
    out["workers"] = est.workers;
    out["arithmetic_mode"] = "float";
    emit(out);
    return 0;
}

int run_simulate_mstar(const SimulateArgs& args) {
    if (args.p.empty()) throw std::invalid_argument("simulate mstar: --p is required");
    const census::ExactRational p = census::parse_rational(args.p);
    const std::vector<double> grid = parse_double_list(args.u_grid);
    const std::uint64_t seed = pick_seed(args.seed);
    const census::CltReport report = census::sample_mstar_clt(static_cast<int>(args.k), p,
                                                              args.samples, grid, seed,
                                                              args.workers);
    json out = base_record("simulate-mstar");
    out["k"] = report.k;
    out["p"] = census::to_string(p);
    out["accepted"] = report.accepted;
    out["u_grid"] = report.u_grid;
    out["empirical"] = report.empirical;
    out["gaussian"] = report.gaussian;
    out["max_abs_dev"] = report.max_abs_dev;
    out["seed"] = report.seed;
    out["workers"] = report.workers;
    attach_model_params(out, args.k, report.p);
    out["arithmetic_mode"] = "exact";
    emit(out);
    return 0;
}

int run_simulate_a3(const SimulateArgs& args) {
    if (args.l < 0) throw std::invalid_argument("simulate a3: --l is required");
    double p;
    if (args.p.empty())
        p = census::solve_tilt(args.k, args.l);
    else
        p = census::parse_rational(args.p).convert_to<double>();
    const std::uint64_t seed = pick_seed(args.seed);
    const census::McEstimate est = census::estimate_a3(static_cast<int>(args.k), p, args.l,
                                                       args.samples, seed, args.workers);
    json out = base_record("simulate-a3");
    out["k"] = args.k;
    out["l"] = args.l;
    out["p"] = p;
    out["samples"] = est.n;
    out["accepted"] = est.accepted;
    out["mean"] = est.mean;
    out["stderr"] = est.stderr_;
    const double sigma_y2 = static_cast<double>(
        census::sigma_y_squared(args.k, static_cast<long double>(p)));
    out["sigma_y_squared"] = sigma_y2;
    out["gaussian_reference"] =
        sigma_y2 > 0 ? 1.0 / std::sqrt(2.0 * M_PI * sigma_y2) : 0.0;
    out["seed"] = est.seed;
    out["workers"] = est.workers;
    attach_model_params(out, args.k, p);
    out["arithmetic_mode"] = "float";
    emit(out);
    return 0;
}

struct TableArgs {
    std::string k_list;
    std::string l_rule = "const:0";
};

int run_table(const TableArgs& args, const Caps& caps) {
    const std::vector<long long> ks = parse_ll_list(args.k_list);
    const auto rule = parse_l_rule(args.l_rule);
    std::printf("k,l,log_exact,log_asymptotic,rel_log_error,regime\n");
    if (ks.empty()) return 0;

    long long max_k = 0, max_edges = 0;
    for (long long k : ks) {
        const long long l = rule(k);
        if (l < 0 || l > census::CountTable::max_complexity(k))
            throw std::invalid_argument("table: l-rule gives l out of range at k = " +
                                        std::to_string(k));
        max_k = std::max(max_k, k);
        max_edges = std::max(max_edges, k - 1 + l);
    }
    if (max_k > caps.max_vertices || max_edges > caps.max_edges)
        throw census::cap_error("table: request exceeds caps; raise CENSUS_LAB_CAPS");

    const census::CountTable table(static_cast<int>(max_k), max_edges);
    for (const auto& row : census::compare_table(ks, rule, table)) {
        std::printf("%lld,%lld,%.12g,%.12g,%.12g,%s\n", row.k, row.l, row.log_exact_value,
                    row.log_asymptotic, row.rel_log_error, row.regime.c_str());
    }
    return 0;
}

struct SampleGraphArgs {
    long long k = 0;
    long long l = 0;
    long long count = 1;
    std::optional<std::uint64_t> seed;
    std::string format = "edges";
    double tilt = 0.0;
    long long max_trials = 10'000'000;
};

int run_sample_graph(const SampleGraphArgs& args) {
    if (args.count < 1) throw std::invalid_argument("sample-graph: --count must be >= 1");
    if (args.format != "edges" && args.format != "json")
        throw std::invalid_argument("sample-graph: --format must be edges or json");
    census::SamplerOptions options;
    options.tilt = args.tilt;
    options.max_trials = args.max_trials;
    const std::uint64_t seed = pick_seed(args.seed);
    census::SplitMix64 rng = census::derive_stream(seed, 0);

    json graphs = json::array();
    double tilt_used = 0.0;
    long long total_trials = 0;
    for (long long i = 0; i < args.count; ++i) {
        const census::SampleResult result =
            census::sample_connected_graph(static_cast<int>(args.k), args.l, options, rng);
        tilt_used = result.tilt;
        total_trials += result.trials;
        if (args.format == "edges") {
            if (i > 0) std::printf("\n");
            for (const auto& [a, b] : result.graph.edges) std::printf("%d %d\n", a, b);
        } else {
            json edges = json::array();
            for (const auto& [a, b] : result.graph.edges) edges.push_back({a, b});
            graphs.push_back(std::move(edges));
        }
    }
    if (args.format == "json") {
        json out = base_record("sample-graph");
        out["k"] = args.k;
        out["l"] = args.l;
        out["count"] = args.count;
        out["graphs"] = std::move(graphs);
        out["tilt"] = tilt_used;
        out["trials"] = total_trials;
        out["seed"] = seed;
        attach_model_params(out, args.k, tilt_used);
        out["arithmetic_mode"] = "float";
        emit(out);
    }
    return 0;
}

}

int main(int argc, char** argv) {
    CLI::App app{"Connected-graph census laboratory: exact counts, the tilted "
                 "balls-into-bins identity, walk simulations, asymptotic tables, and "
                 "uniform connected-graph sampling"};
    app.require_subcommand(1);

    CountArgs count_args;
    auto* count_cmd = app.add_subcommand("count", "Exact and/or asymptotic count C(k,l)");
    count_cmd->add_option("k", count_args.k, "vertex count")->required();
    count_cmd->add_option("l", count_args.l, "complexity (edges minus k-1)")->required();
    count_cmd->add_flag("--asymptotic", count_args.asymptotic, "evaluate the regime formula");

    VerifyArgs verify_args;
    auto* verify_cmd =
        app.add_subcommand("verify-identity", "Check the exact three-factor product identity");
    verify_cmd->add_option("k_max", verify_args.k_max, "verify all k in [2, k_max]")->required();
    verify_cmd->add_option("p_list", verify_args.p_list, "comma-separated rationals, e.g. 1/4,1/2")
        ->required();

    SimulateArgs sim_args;
    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo estimates");
    sim_cmd->require_subcommand(1);
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--samples", sim_args.samples, "sample count");
        cmd->add_option("--seed", sim_args.seed, "RNG seed (default: entropy)");
        cmd->add_option("--workers", sim_args.workers, "worker threads");
    };
    auto* sim_tree = sim_cmd->add_subcommand("tree", "probability the queue walk stays positive");
    sim_tree->add_option("--k", sim_args.k, "vertex count")->required();
    sim_tree->add_option("--p", sim_args.p, "tilt (rational or decimal)")->required();
    add_common(sim_tree);
    auto* sim_left = sim_cmd->add_subcommand("esc-left", "upward Poisson walk escape");
    sim_left->add_option("--lambda", sim_args.lambda, "Poisson mean")->required();
    sim_left->add_option("--L", sim_args.horizon, "horizon")->required();
    add_common(sim_left);
    auto* sim_right = sim_cmd->add_subcommand("esc-right", "downward Poisson walk escape");
    sim_right->add_option("--eps", sim_args.eps, "drift; walk uses Po(1-eps)")->required();
    sim_right->add_option("--L", sim_args.horizon, "horizon")->required();
    add_common(sim_right);
    auto* sim_mstar = sim_cmd->add_subcommand("mstar", "conditioned excess CDF vs Gaussian");
    sim_mstar->add_option("--k", sim_args.k, "vertex count")->required();
    sim_mstar->add_option("--p", sim_args.p, "tilt (parsed exactly)")->required();
    sim_mstar->add_option("--u-grid", sim_args.u_grid, "comma-separated standardized cutpoints");
    add_common(sim_mstar);
    auto* sim_a3 = sim_cmd->add_subcommand("a3", "surplus-edge count probability");
    sim_a3->add_option("--k", sim_args.k, "vertex count")->required();
    sim_a3->add_option("--l", sim_args.l, "target complexity")->required();
    sim_a3->add_option("--p", sim_args.p, "tilt (default: solves p*E[M] = l)");
    add_common(sim_a3);

    TableArgs table_args;
    auto* table_cmd = app.add_subcommand("table", "CSV of exact vs asymptotic log-counts");
    table_cmd->add_option("--k-list", table_args.k_list, "comma-separated k values");
    table_cmd->add_option("--l-rule", table_args.l_rule,
                          "const:N | pow:a | lin:b | nlogn:c (default const:0)");

    SampleGraphArgs graph_args;
    auto* graph_cmd =
        app.add_subcommand("sample-graph", "Uniform connected graphs with k-1+l edges");
    graph_cmd->add_option("k", graph_args.k, "vertex count")->required();
    graph_cmd->add_option("l", graph_args.l, "complexity")->required();
    graph_cmd->add_option("--count", graph_args.count, "number of graphs");
    graph_cmd->add_option("--seed", graph_args.seed, "RNG seed (default: entropy)");
    graph_cmd->add_option("--format", graph_args.format, "edges | json");
    graph_cmd->add_option("--tilt", graph_args.tilt, "override the sampling tilt");
    graph_cmd->add_option("--max-trials", graph_args.max_trials, "rejection budget");

    try {
        app.parse(argc, argv);
        const Caps caps = load_caps();
        if (count_cmd->parsed()) return run_count(count_args, caps);
        if (verify_cmd->parsed()) return run_verify_identity(verify_args, caps);
        if (sim_cmd->parsed()) {
            if (sim_tree->parsed()) return run_simulate_tree(sim_args);
            if (sim_left->parsed()) return run_simulate_esc_left(sim_args);
            if (sim_right->parsed()) return run_simulate_esc_right(sim_args);
            if (sim_mstar->parsed()) return run_simulate_mstar(sim_args);
            if (sim_a3->parsed()) return run_simulate_a3(sim_args);
        }
        if (table_cmd->parsed()) return run_table(table_args, caps);
        if (graph_cmd->parsed()) return run_sample_graph(graph_args);
        std::cerr << "no subcommand selected\n";
        return exit_usage;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    } catch (const census::cap_error& e) {
        std::cerr << "cap exceeded: " << e.what() << "\n";
        return exit_cap;
    } catch (const census::budget_error& e) {
        std::cerr << "budget failure: " << e.what() << "\n";
        return exit_budget;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    }
}
