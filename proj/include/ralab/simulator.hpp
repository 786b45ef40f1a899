#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ralab/agents.hpp"
#include "ralab/mechanism.hpp"
#include "ralab/valuation.hpp"

namespace ralab {

struct RoundRecord {
    std::int64_t round = 0;  // 1-based
    bool good = true;        // state flag at the start of the round
    double ledger_a = 0.0;   // avg: bid_sum ticks; credit: TP
    double ledger_b = 0.0;   // avg: count; credit: EP
    Money value = 0;
    Money bid = 0;
    int allocated = 0;
    double payment = 0.0;  // ticks
    double utility = 0.0;  // ticks
};

struct Trajectory {
    std::vector<RoundRecord> rounds;
    std::uint64_t seed = 0;
    double total_payment = 0.0;  // ticks
    double total_utility = 0.0;  // ticks
    std::int64_t bad_rounds = 0;
};

// T rounds of sample -> bid -> allocate -> charge -> transition -> feedback.
// Bit-identical output for identical seeds: values, mechanism coins and
// agent randomness run on three independent streams derived from the seed.
Trajectory run_trajectory(const Mechanism& mech, Agent& agent,
                          const ValuationDistribution& dist, std::int64_t T,
                          std::uint64_t seed);

// True when the state-flag sequence is single good states separated by
// runs of bad states (the myopic trace shape).
bool matches_single_good_cycles(const std::vector<RoundRecord>& rounds);

struct IrAudit {
    std::int64_t negative_rounds = 0;
    double min_prefix_utility = 0.0;  // ticks
    double total_utility = 0.0;       // ticks
    bool per_round_ir() const { return negative_rounds == 0; }
    bool aggregate_ir() const { return total_utility >= 0.0; }
};

IrAudit ex_post_ir_audit(const Trajectory& traj);

// Expected per-round utility of a bid given the state flag, with the
// bad-state Bernoulli branch taken analytically. Avg-bid mechanisms only.
double analytic_utility(const Mechanism& mech, bool good, Money value, Money bid);

// max over experts of hindsight expected utility on the realized
// (flag, value) sequence, minus the realized total; in ticks.
double measured_regret(const Trajectory& traj, const std::vector<Expert>& experts,
                       const Mechanism& mech);

// For each benchmark bid, replays a full constant-bid trajectory on the
// same seed (common random numbers share the value stream) and returns
// max benchmark total utility minus the realized total; in ticks.
double measured_policy_regret(const Mechanism& mech, const ValuationDistribution& dist,
                              std::int64_t T, std::uint64_t seed,
                              double realized_total_utility,
                              const std::vector<Money>& benchmark_bids);

struct ExperimentConfig;  // config.hpp

struct RevenueReport {
    std::string mechanism;
    std::string agent;
    double epsilon = 0.0;
    double rho = 0.0;
    double price = 0.0;  // currency
    std::int64_t T = 0;
    double B = 0.0;  // currency
    std::int64_t replications = 0;
    std::uint64_t master_seed = 0;

    double mean_revenue = 0.0;   // currency per round
    double stderr_revenue = 0.0;
    double bad_state_fraction = 0.0;
    double mean_buyer_utility = 0.0;  // currency per round

    std::optional<double> regret_per_round;         // currency
    std::optional<double> policy_regret_per_round;  // currency

    double mean_negative_utility_rounds = 0.0;
    std::int64_t max_negative_utility_rounds = 0;
    double mean_min_prefix_utility = 0.0;  // currency
    double mean_total_utility = 0.0;       // currency

    std::optional<double> etc_explore_fraction;
    std::optional<double> etc_post_commit_bad_fraction;
    std::optional<double> etc_committed_bid;  // currency

    std::vector<std::string> regime_notes;
};

RevenueReport run_experiment(const ExperimentConfig& config);

void write_trace_csv(const std::string& path, const Trajectory& traj,
                     const Mechanism& mech);

// Deterministic reduction independent of accumulation order.
double pairwise_sum(const std::vector<double>& values);

}  // namespace ralab
