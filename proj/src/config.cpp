#include "ralab/config.hpp"

#include <set>

#include <json.hpp>

namespace ralab {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError(path + ": " + what);
}

void reject_unknown(const json& obj, const std::string& path,
                    const std::set<std::string>& allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key())) fail(path + "." + it.key(), "unknown key");
}

double get_number(const json& obj, const std::string& path, const std::string& key,
                  double fallback, bool required = false) {
    if (!obj.contains(key)) {
        if (required) fail(path + "." + key, "missing required field");
        return fallback;
    }
    if (!obj[key].is_number()) fail(path + "." + key, "expected a number");
    return obj[key].get<double>();
}

std::int64_t get_integer(const json& obj, const std::string& path,
                         const std::string& key, std::int64_t fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number_integer()) fail(path + "." + key, "expected an integer");
    return obj[key].get<std::int64_t>();
}

std::string get_string(const json& obj, const std::string& path,
                       const std::string& key, const std::string& fallback,
                       bool required = false) {
    if (!obj.contains(key)) {
        if (required) fail(path + "." + key, "missing required field");
        return fallback;
    }
    if (!obj[key].is_string()) fail(path + "." + key, "expected a string");
    return obj[key].get<std::string>();
}

Rational get_rational(const json& obj, const std::string& path,
                      const std::string& key, const Rational& fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj[key];
    try {
        if (v.is_string()) return parse_rational_field(v.get<std::string>());
        if (v.is_number()) return rationalize(v.get<double>());
    } catch (const std::exception& e) {
        fail(path + "." + key, e.what());
    }
    fail(path + "." + key, "expected a number or \"a/b\" string");
}

}  // namespace

Rational parse_rational_field(const std::string& text) {
    auto slash = text.find('/');
    if (slash == std::string::npos) return rationalize(std::stod(text));
    std::int64_t num = std::stoll(text.substr(0, slash));
    std::int64_t den = std::stoll(text.substr(slash + 1));
    return Rational(num, den);
}

ExperimentConfig parse_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");

    ExperimentConfig cfg;
    reject_unknown(doc, "config",
                   {"mechanism", "agent", "distribution", "T", "replications",
                    "master_seed", "out", "trace", "threads", "measure_regret",
                    "measure_policy_regret"});

    if (!doc.contains("mechanism") || !doc["mechanism"].is_object())
        throw ConfigError("mechanism: missing required object");
    {
        const auto& m = doc["mechanism"];
        reject_unknown(m, "mechanism", {"kind", "epsilon", "rho", "price"});
        cfg.mechanism_kind = get_string(m, "mechanism", "kind", "avg_price");
        try {
            mechanism_kind_from_string(cfg.mechanism_kind);
        } catch (const std::exception& e) {
            fail("mechanism.kind", e.what());
        }
        cfg.epsilon = get_rational(m, "mechanism", "epsilon", cfg.epsilon);
        cfg.rho = get_rational(m, "mechanism", "rho", cfg.rho);
        if (!(cfg.epsilon > Rational(0) && cfg.epsilon < Rational(1)))
            fail("mechanism.epsilon", "must be in (0,1)");
        if (!(cfg.rho >= Rational(0) && cfg.rho <= Rational(1)))
            fail("mechanism.rho", "must be in [0,1]");
        if (m.contains("price"))
            cfg.price = get_number(m, "mechanism", "price", 0.0, true);
    }

    if (!doc.contains("distribution") || !doc["distribution"].is_object())
        throw ConfigError("distribution: missing required object");
    {
        const auto& d = doc["distribution"];
        reject_unknown(d, "distribution",
                       {"kind", "B", "tick", "value", "rate", "H", "values", "probs"});
        cfg.distribution.kind = get_string(d, "distribution", "kind", "", true);
        cfg.distribution.B = get_number(d, "distribution", "B", 1.0);
        cfg.distribution.tick = get_number(d, "distribution", "tick", 0.01);
        cfg.distribution.value = get_number(d, "distribution", "value", 0.0);
        cfg.distribution.rate = get_number(d, "distribution", "rate", 1.0);
        cfg.distribution.H = get_number(d, "distribution", "H", 0.0);
        if (d.contains("values")) {
            if (!d["values"].is_array()) fail("distribution.values", "expected array");
            for (const auto& v : d["values"])
                cfg.distribution.values.push_back(v.get<double>());
        }
        if (d.contains("probs")) {
            if (!d["probs"].is_array()) fail("distribution.probs", "expected array");
            for (const auto& v : d["probs"])
                cfg.distribution.probs.push_back(v.get<double>());
        }
    }

    if (!doc.contains("agent") || !doc["agent"].is_object())
        throw ConfigError("agent: missing required object");
    {
        const auto& a = doc["agent"];
        reject_unknown(a, "agent",
                       {"kind", "k", "k_policy", "expert_grid_points", "candidates",
                        "bid"});
        cfg.agent.kind = get_string(a, "agent", "kind", "", true);
        cfg.agent.k = static_cast<int>(get_integer(a, "agent", "k", 1));
        cfg.agent.k_policy = get_string(a, "agent", "k_policy", "constant");
        cfg.agent.expert_grid_points =
            static_cast<int>(get_integer(a, "agent", "expert_grid_points", 11));
        cfg.agent.constant_bid = get_number(a, "agent", "bid", 0.0);
        if (a.contains("candidates")) {
            if (!a["candidates"].is_array()) fail("agent.candidates", "expected array");
            for (const auto& v : a["candidates"])
                cfg.agent.etc_candidates.push_back(v.get<double>());
        }
    }

    cfg.T = get_integer(doc, "config", "T", cfg.T);
    if (cfg.T < 1) fail("T", "must be >= 1");
    cfg.replications = get_integer(doc, "config", "replications", cfg.replications);
    if (cfg.replications < 1) fail("replications", "must be >= 1");
    if (doc.contains("master_seed")) {
        if (!doc["master_seed"].is_number_integer())
            fail("master_seed", "expected an integer");
        cfg.master_seed = doc["master_seed"].get<std::uint64_t>();
        cfg.seed_from_entropy = false;
    }
    cfg.out_path = get_string(doc, "config", "out", "");
    cfg.trace_path = get_string(doc, "config", "trace", "");
    cfg.threads = static_cast<int>(get_integer(doc, "config", "threads", 1));
    if (cfg.threads < 1) fail("threads", "must be >= 1");

    if (doc.contains("measure_regret")) {
        const auto& r = doc["measure_regret"];
        if (!r.is_object()) fail("measure_regret", "expected object");
        reject_unknown(r, "measure_regret", {"expert_grid_points"});
        cfg.regret_expert_points =
            static_cast<int>(get_integer(r, "measure_regret", "expert_grid_points", 11));
    }
    if (doc.contains("measure_policy_regret")) {
        const auto& r = doc["measure_policy_regret"];
        if (!r.is_object()) fail("measure_policy_regret", "expected object");
        reject_unknown(r, "measure_policy_regret", {"benchmarks"});
        if (!r.contains("benchmarks") || !r["benchmarks"].is_array())
            fail("measure_policy_regret.benchmarks", "expected array");
        std::vector<double> bs;
        for (const auto& v : r["benchmarks"]) bs.push_back(v.get<double>());
        cfg.policy_regret_benchmarks = std::move(bs);
    }
    return cfg;
}

std::string emit_config(const ExperimentConfig& cfg) {
    json doc;
    doc["mechanism"] = {{"kind", cfg.mechanism_kind},
                        {"epsilon", cfg.epsilon.str()},
                        {"rho", cfg.rho.str()}};
    if (cfg.price) doc["mechanism"]["price"] = *cfg.price;
    json d = {{"kind", cfg.distribution.kind},
              {"B", cfg.distribution.B},
              {"tick", cfg.distribution.tick}};
    if (cfg.distribution.kind == "point") d["value"] = cfg.distribution.value;
    if (cfg.distribution.kind == "exponential") d["rate"] = cfg.distribution.rate;
    if (cfg.distribution.kind == "equal_revenue" && cfg.distribution.H > 0)
        d["H"] = cfg.distribution.H;
    if (!cfg.distribution.values.empty()) {
        d["values"] = cfg.distribution.values;
        d["probs"] = cfg.distribution.probs;
    }
    doc["distribution"] = std::move(d);
    json a = {{"kind", cfg.agent.kind}};
    if (cfg.agent.kind == "lookahead") {
        a["k"] = cfg.agent.k;
        a["k_policy"] = cfg.agent.k_policy;
    }
    if (cfg.agent.kind == "exp3") a["expert_grid_points"] = cfg.agent.expert_grid_points;
    if (cfg.agent.kind == "etc" && !cfg.agent.etc_candidates.empty())
        a["candidates"] = cfg.agent.etc_candidates;
    if (cfg.agent.kind == "constant") a["bid"] = cfg.agent.constant_bid;
    doc["agent"] = std::move(a);
    doc["T"] = cfg.T;
    doc["replications"] = cfg.replications;
    if (!cfg.seed_from_entropy) doc["master_seed"] = cfg.master_seed;
    if (!cfg.out_path.empty()) doc["out"] = cfg.out_path;
    if (!cfg.trace_path.empty()) doc["trace"] = cfg.trace_path;
    if (cfg.threads != 1) doc["threads"] = cfg.threads;
    if (cfg.regret_expert_points)
        doc["measure_regret"] = {{"expert_grid_points", *cfg.regret_expert_points}};
    if (cfg.policy_regret_benchmarks)
        doc["measure_policy_regret"] = {{"benchmarks", *cfg.policy_regret_benchmarks}};
    return doc.dump(2);
}

Mechanism make_mechanism(const ExperimentConfig& cfg,
                         const ValuationDistribution& dist) {
    MechanismParams params;
    params.epsilon = cfg.epsilon;
    params.rho = cfg.rho;
    params.horizon = cfg.T;
    params.support_bound = dist.support_max();
    params.mean_ticks = dist.mean_ticks();
    if (cfg.price) {
        params.price = dist.grid().to_ticks(*cfg.price);
    } else {
        params.price = myerson(dist).price;
    }
    return Mechanism(mechanism_kind_from_string(cfg.mechanism_kind), params);
}

std::string report_to_json(const RevenueReport& report) {
    json doc;
    doc["mechanism"] = report.mechanism;
    doc["agent"] = report.agent;
    doc["params"] = {{"epsilon", report.epsilon},
                     {"rho", report.rho},
                     {"price", report.price},
                     {"T", report.T},
                     {"B", report.B}};
    doc["reps"] = report.replications;
    doc["seed"] = report.master_seed;
    doc["mean_revenue"] = report.mean_revenue;
    doc["stderr"] = report.stderr_revenue;
    doc["bad_state_fraction"] = report.bad_state_fraction;
    doc["mean_buyer_utility"] = report.mean_buyer_utility;
    if (report.regret_per_round) doc["regret_per_round"] = *report.regret_per_round;
    if (report.policy_regret_per_round)
        doc["policy_regret_per_round"] = *report.policy_regret_per_round;
    doc["ir"] = {{"neg_rounds", report.mean_negative_utility_rounds},
                 {"max_neg_rounds", report.max_negative_utility_rounds},
                 {"min_prefix", report.mean_min_prefix_utility},
                 {"total", report.mean_total_utility}};
    if (report.etc_explore_fraction) {
        doc["etc"] = {{"explore_fraction", *report.etc_explore_fraction},
                      {"post_commit_bad_fraction",
                       report.etc_post_commit_bad_fraction.value_or(0.0)},
                      {"committed_bid", report.etc_committed_bid.value_or(0.0)}};
    }
    doc["regime"] = report.regime_notes;
    return doc.dump(2);
}

}  // namespace ralab
