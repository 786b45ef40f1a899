#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ralab/mechanism.hpp"
#include "ralab/oracle.hpp"
#include "ralab/rng.hpp"
#include "ralab/valuation.hpp"

namespace ralab {

// What a buyer sees before bidding. Learning buyers see nothing else;
// the informed closed-form buyers additionally receive the true ledger.
struct Observation {
    bool good = true;
    Money value = 0;
    std::int64_t round = 1;         // 1-based
    std::int64_t rounds_total = 1;  // T
};

// Parametric expert: bid good_bid in good states; in bad states bid
// bad_threshold when the value clears it, else 0.
struct Expert {
    Money good_bid = 0;
    Money bad_threshold = 0;

    Money induced_bid(bool good, Money value) const {
        if (good) return good_bid;
        return value >= bad_threshold ? bad_threshold : 0;
    }
};

// All (g, beta) pairs over the given bid set.
std::vector<Expert> make_expert_grid(const std::vector<Money>& bids);
// n evenly spaced bids on [0, B]; requires n >= 2 and (n-1) | B.
std::vector<Money> evenly_spaced_bids(Money B, int points);

// Closed-form bids.
Money myopic_bid(const Observation& obs, Money escape_price);
Money stay_good_bid(const AvgBidLedger& ledger, const Observation& obs,
                    const MechanismParams& params);
Money truthful_bid(const Observation& obs);

// EXP3 over a finite expert class, multiplicative weights with
// importance-weighted reward estimates. Rewards are per-round utilities
// in [-B, B], rescaled to [0,1]; eta = sqrt(ln N / (N T)). Sampling mixes
// a gamma/N uniform floor into the weight simplex, which caps the
// importance weights at N/gamma and keeps the weight updates bounded.
class Exp3State {
public:
    Exp3State(std::size_t n_experts, Money B, std::int64_t T);

    std::size_t size() const { return weights_.size(); }
    const std::vector<double>& weights() const { return weights_; }
    std::vector<double> probabilities() const;  // mixed sampling simplex
    double eta() const { return eta_; }
    double gamma() const { return gamma_; }

    // Samples an expert from the mixed simplex; remembers its probability
    // for the matching update.
    std::size_t step(Rng& rng);
    void update(std::size_t chosen, double utility);

private:
    double probability_of(std::size_t i) const;

    std::vector<double> weights_;
    double weight_sum_;
    double eta_;
    double gamma_;
    double scale_;        // 2B, reward rescale denominator
    Money B_;
    double last_prob_ = 1.0;
    std::size_t last_chosen_ = 0;
    bool pending_ = false;
};

// Explore-then-commit over constant bids. Each candidate gets one
// contiguous block; the block is preceded by a normalization preamble
// (bid 0 until the state goes bad, then bid B until it resets to
// borderline) so every candidate is evaluated from the same borderline
// start. Without the preamble, candidates between the good-state
// boundary and the escape price are unmeasurable: they can neither
// escape a bad entry state nor outrun the ledger inertia of a good one.
class EtcState {
public:
    EtcState(std::vector<Money> candidates, std::int64_t block_len,
             std::int64_t burn_in, Money max_bid, Rational rho);

    Money step(const Observation& obs);
    void feedback(const Observation& obs, Money bid, int allocated, double payment);

    bool committed() const { return phase_ == Phase::Committed; }
    std::optional<Money> committed_bid() const {
        return committed() ? std::optional<Money>(commit_bid_) : std::nullopt;
    }
    std::int64_t exploration_rounds() const { return explored_rounds_; }
    const std::vector<double>& tallies() const { return tally_; }
    std::int64_t tally_rounds_per_candidate() const { return block_len_ - burn_in_; }

private:
    enum class Phase { DriveBad, Escape, Tally, FinalEscape, Committed };

    Money choose(const Observation& obs);
    void advance_candidate();
    void commit();

    std::vector<Money> candidates_;
    std::int64_t block_len_;
    std::int64_t burn_in_;
    Money max_bid_;
    std::int64_t drive_cap_;
    std::int64_t escape_cap_;

    Phase phase_ = Phase::DriveBad;
    std::size_t current_ = 0;
    std::int64_t phase_round_ = 0;
    std::vector<double> tally_;
    std::int64_t explored_rounds_ = 0;
    Money commit_bid_ = 0;
};

// Per-trajectory bidding policy. Informed policies read the ledger;
// learners must ignore it.
class Agent {
public:
    virtual ~Agent() = default;
    virtual Money bid(const Observation& obs, const LedgerState& state, Rng& rng) = 0;
    virtual void feedback(const Observation&, Money, int, double) {}
    virtual std::string name() const = 0;
    // Non-null for the explore-then-commit agent; lets the simulator report
    // exploration and commitment statistics.
    virtual const EtcState* etc_state() const { return nullptr; }
};

struct AgentSpec {
    std::string kind;  // myopic | stay_good | lookahead | exp3 | etc | truthful | constant
    int k = 1;                     // lookahead depth
    std::string k_policy = "constant";  // constant | uniform_random
    int expert_grid_points = 11;   // exp3
    std::vector<double> etc_candidates;  // currency units; empty = value grid
    double constant_bid = 0.0;     // constant agent, currency units
};

std::unique_ptr<Agent> make_agent(const AgentSpec& spec, const Mechanism& mech,
                                  const ValuationDistribution& dist);

// Constant-bid agent, used directly by policy-regret counterfactuals.
std::unique_ptr<Agent> make_constant_agent(Money bid);

}  // namespace ralab
