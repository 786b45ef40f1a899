// Command-line front end: simulate | oracle | frontier | bounds.
// Exit codes: 0 success, 1 configuration error, 2 verification violations.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ralab/analysis.hpp"
#include "ralab/config.hpp"
#include "ralab/oracle.hpp"
#include "ralab/simulator.hpp"

namespace {

using namespace ralab;
using nlohmann::json;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text << std::endl;
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << text;
}

std::uint64_t entropy_seed() {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

json verification_json(const VerificationReport& report) {
    json doc;
    doc["check"] = report.check;
    doc["cases_checked"] = report.cases_checked;
    json v = json::array();
    for (const auto& w : report.violations) v.push_back(w.detail);
    doc["violations"] = std::move(v);
    return doc;
}

int cmd_simulate(const std::string& config_path, std::optional<std::uint64_t> seed,
                 const std::string& out, const std::string& trace, int reps,
                 int threads) {
    ExperimentConfig cfg = parse_config(read_file(config_path));
    if (seed) {
        cfg.master_seed = *seed;
        cfg.seed_from_entropy = false;
    }
    if (!out.empty()) cfg.out_path = out;
    if (!trace.empty()) cfg.trace_path = trace;
    if (reps > 0) cfg.replications = reps;
    if (threads > 0) cfg.threads = threads;
    if (cfg.seed_from_entropy) {
        cfg.master_seed = entropy_seed();
        std::cerr << "seed drawn from entropy: " << cfg.master_seed << "\n";
    }
    RevenueReport report = run_experiment(cfg);
    write_output(cfg.out_path, report_to_json(report));
    return 0;
}

int cmd_oracle(int grid_points, std::int64_t T, const std::string& eps_text,
               const std::string& rho_text, int k_max, bool include_myopic,
               const std::string& out) {
    Rational eps = parse_rational_field(eps_text);
    Rational rho = rho_text.empty() ? eps / (Rational(2) - eps)
                                    : parse_rational_field(rho_text);
    if (grid_points < 2) throw ConfigError("--grid must be >= 2");

    DistributionSpec dspec;
    dspec.kind = "uniform";
    dspec.B = 1.0;
    dspec.tick = 1.0 / static_cast<double>(grid_points - 1);
    ValuationDistribution dist = make_distribution(dspec);

    MechanismParams params;
    params.epsilon = eps;
    params.rho = rho;
    params.horizon = T;
    params.support_bound = dist.support_max();
    params.mean_ticks = dist.mean_ticks();
    params.price = myerson(dist).price;
    Mechanism mech(MechanismKind::AvgBidPrice, params);
    LookaheadOracle oracle(mech, dist);

    json doc;
    doc["instance"] = {{"grid_points", grid_points},
                       {"T", T},
                       {"epsilon", eps.str()},
                       {"rho", rho.str()},
                       {"price_ticks", params.price},
                       {"k_max", k_max}};
    bool violations = false;

    auto persistence =
        verify_good_persistence(oracle, k_max, include_myopic ? 0 : 1);
    doc["good_persistence"] = verification_json(persistence);
    violations |= !persistence.passed();

    std::int64_t mid_t = std::max<std::int64_t>(1, T / 2);
    auto border = verify_border_dominance(oracle, k_max, mid_t);
    doc["border_dominance"] = verification_json(border);
    violations |= !border.passed();

    auto delta = verify_delta_positive(oracle, k_max, mid_t);
    doc["delta_positive"] = verification_json(delta);
    violations |= !delta.passed();

    double worst = 0.0;
    for (int i = 1; i <= 10; ++i) {
        for (int k = 1; k <= 10; ++k) {
            auto g = geometric_truncated_mean(static_cast<double>(i) / 10.0, k);
            worst = std::max(worst, g.discrepancy());
        }
    }
    doc["geometric_identity"] = {{"grid", "rho in {0.1..1.0} x k in {1..10}"},
                                 {"max_discrepancy", worst}};
    violations |= worst > 1e-12;

    doc["all_pass"] = !violations;
    write_output(out, doc.dump(2));
    return violations ? 2 : 0;
}

int cmd_frontier(const std::string& config_path, std::optional<std::uint64_t> seed,
                 const std::string& out, int reps, int threads,
                 const std::vector<std::string>& eps_texts) {
    ExperimentConfig cfg = parse_config(read_file(config_path));
    if (seed) {
        cfg.master_seed = *seed;
        cfg.seed_from_entropy = false;
    }
    if (cfg.seed_from_entropy) {
        cfg.master_seed = entropy_seed();
        std::cerr << "seed drawn from entropy: " << cfg.master_seed << "\n";
    }
    if (reps > 0) cfg.replications = reps;
    if (threads > 0) cfg.threads = threads;
    std::vector<Rational> eps_list;
    if (eps_texts.empty()) {
        for (int i = 1; i <= 9; ++i) eps_list.push_back(Rational(i, 10));
    } else {
        for (const auto& e : eps_texts) eps_list.push_back(parse_rational_field(e));
    }
    auto points = frontier_sweep(eps_list, cfg);
    write_output(out.empty() ? cfg.out_path : out, frontier_csv(points));
    return 0;
}

int cmd_bounds(const std::vector<int>& k_list, double mu, const std::string& out) {
    std::vector<int> ks = k_list;
    if (ks.empty()) ks = {1, 2, 4, 8, 16, 32};
    auto rows = expost_bound_table(ks, mu);
    write_output(out, expost_bound_csv(rows));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"repeated-auction mechanism laboratory"};
    app.require_subcommand(1);

    std::string config_path, out, trace;
    std::optional<std::uint64_t> seed;
    int reps = 0, threads = 0;

    auto* sim = app.add_subcommand("simulate", "run a configured experiment");
    sim->add_option("--config", config_path, "experiment config JSON")->required();
    sim->add_option("--seed", seed, "master seed (drawn from entropy if omitted)");
    sim->add_option("--out", out, "report output path (stdout if omitted)");
    sim->add_option("--trace", trace, "per-round trace CSV path");
    sim->add_option("--reps", reps, "replication count override");
    sim->add_option("--threads", threads, "worker thread count");

    int grid_points = 5, k_max = 3;
    std::int64_t T = 8;
    std::string eps_text = "0.5", rho_text;
    bool include_myopic = false;
    auto* orc = app.add_subcommand("oracle", "exhaustive lookahead verification");
    orc->add_option("--grid", grid_points, "uniform value grid size (default 5)");
    orc->add_option("--T", T, "horizon (default 8)");
    orc->add_option("--epsilon", eps_text, "epsilon (number or a/b)");
    orc->add_option("--rho", rho_text, "rho (default eps/(2-eps))");
    orc->add_option("--k", k_max, "max lookahead depth (default 3)");
    orc->add_flag("--include-myopic", include_myopic,
                  "also check k=0 (expected to produce violations)");
    orc->add_option("--out", out, "report output path");

    std::vector<std::string> eps_texts;
    auto* fro = app.add_subcommand("frontier", "revenue tradeoff sweep");
    fro->add_option("--config", config_path, "base experiment config JSON")->required();
    fro->add_option("--seed", seed, "master seed");
    fro->add_option("--out", out, "CSV output path");
    fro->add_option("--reps", reps, "replication count override");
    fro->add_option("--threads", threads, "worker thread count");
    fro->add_option("--epsilon", eps_texts, "epsilon list (default 0.1..0.9)");

    std::vector<int> k_list;
    double mu = 1.0;
    auto* bnd = app.add_subcommand("bounds", "per-round ex-post IR revenue caps");
    bnd->add_option("--k", k_list, "lookahead depths");
    bnd->add_option("--mu", mu, "distribution mean");
    bnd->add_option("--out", out, "CSV output path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return cmd_simulate(config_path, seed, out, trace, reps, threads);
        if (orc->parsed())
            return cmd_oracle(grid_points, T, eps_text, rho_text, k_max,
                              include_myopic, out);
        if (fro->parsed())
            return cmd_frontier(config_path, seed, out, reps, threads, eps_texts);
        if (bnd->parsed()) return cmd_bounds(k_list, mu, out);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
