#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ralab/agents.hpp"
#include "ralab/mechanism.hpp"
#include "ralab/rational.hpp"
#include "ralab/simulator.hpp"
#include "ralab/valuation.hpp"

namespace ralab {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    std::string mechanism_kind = "avg_price";
    Rational epsilon{1, 2};
    Rational rho{1, 3};
    std::optional<double> price;  // currency; defaults to the Myerson price

    AgentSpec agent;
    DistributionSpec distribution;

    std::int64_t T = 1000;
    std::int64_t replications = 100;
    std::uint64_t master_seed = 0;
    bool seed_from_entropy = true;  // no seed given; one is drawn and recorded

    std::string out_path;
    std::string trace_path;
    int threads = 1;

    std::optional<int> regret_expert_points;
    std::optional<std::vector<double>> policy_regret_benchmarks;  // currency
};

// Parses and validates the JSON config document. Unknown keys and range
// violations are reported with their field paths.
ExperimentConfig parse_config(const std::string& json_text);
std::string emit_config(const ExperimentConfig& config);

// Mechanism assembled from config + distribution (mu, B, default price).
Mechanism make_mechanism(const ExperimentConfig& config,
                         const ValuationDistribution& dist);

std::string report_to_json(const RevenueReport& report);

// Accepts a plain number (nicest rational within 1e-12) or "a/b".
Rational parse_rational_field(const std::string& text);

}  // namespace ralab
