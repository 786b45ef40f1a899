#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "ralab/rational.hpp"
#include "ralab/rng.hpp"
#include "ralab/valuation.hpp"

namespace ralab {

// Ledger of accepted bids: the state statistic is bid_sum/count, with the
// empty ledger conventionally sitting exactly on the good/bad boundary.
struct AvgBidLedger {
    Money bid_sum = 0;
    std::int64_t count = 0;

    bool operator==(const AvgBidLedger&) const = default;
};

// Credit ledger for the horizon-capped variant: total paid vs. the running
// payment expectation, plus the number of completed rounds.
struct CreditLedger {
    double total_paid = 0.0;     // TP, tick units
    double expected_paid = 0.0;  // EP, tick units
    std::int64_t round = 0;      // completed rounds

    bool operator==(const CreditLedger&) const = default;
};

using LedgerState = std::variant<AvgBidLedger, CreditLedger>;

enum class MechanismKind {
    AvgBid,       // bad states escape with probability rho at any bid
    AvgBidPrice,  // bad states escape with probability rho only at bids >= price
    Credit,       // TP/EP ledger with revenue target cap
};

std::string to_string(MechanismKind kind);
MechanismKind mechanism_kind_from_string(const std::string& name);

struct MechanismParams {
    Rational epsilon;        // in (0,1)
    Rational rho;            // in [0,1]
    Money price = 0;         // escape price p in ticks
    std::int64_t horizon = 1;  // T
    Money support_bound = 1;   // B in ticks
    Rational mean_ticks;       // mu in ticks

    void validate() const;  // throws std::invalid_argument on bad ranges

    // (1 - epsilon) * mu, the good-state boundary in ticks.
    Rational threshold() const { return (Rational(1) - epsilon) * mean_ticks; }

    // rho <= epsilon / (2 - epsilon): the k-lookahead guarantee regime.
    bool in_lookahead_regime() const {
        return rho <= epsilon / (Rational(2) - epsilon);
    }
    // rho <= epsilon: the 1-lookahead / policy-regret regime.
    bool in_policy_regret_regime() const { return rho <= epsilon; }
};

struct RoundOutcome {
    int allocated = 0;
    double payment = 0.0;  // tick units; integer-valued for avg-bid kinds
    LedgerState next;
};

// Revenue level at which the credit mechanism stops charging. Homogeneous
// of degree one in the money unit, so callers may pass currency or ticks.
double r_target(std::int64_t T, double mu, double epsilon, double B);

// A mechanism is an immutable parameter bundle; states are plain values
// owned by whoever runs the trajectory.
class Mechanism {
public:
    Mechanism(MechanismKind kind, MechanismParams params);

    MechanismKind kind() const { return kind_; }
    const MechanismParams& params() const { return params_; }
    const Rational& threshold() const { return threshold_; }
    double revenue_target() const { return r_target_; }  // ticks; Credit only

    LedgerState init_state() const;
    bool is_good(const LedgerState& state) const;

    // Consumes exactly one rng draw in the Bernoulli branch, zero otherwise.
    int allocate(const LedgerState& state, Money bid, Rng& rng) const;
    double charge(const LedgerState& state, Money bid, int allocated) const;
    LedgerState transition(const LedgerState& state, Money bid, int allocated,
                           double payment) const;

    RoundOutcome run_round(const LedgerState& state, Money bid, Rng& rng) const;

    // Minimum integer bid keeping the next state good, or 0 if any bid does.
    // Only meaningful for the avg-bid kinds in a good state.
    Money min_stay_good_bid(const AvgBidLedger& ledger) const;

private:
    MechanismKind kind_;
    MechanismParams params_;
    Rational threshold_;
    double r_target_ = 0.0;
    double initial_credit_ = 0.0;
};

struct AuditViolation {
    std::string detail;
};

struct AuditReport {
    std::int64_t cases_checked = 0;
    std::vector<AuditViolation> violations;
    bool passed() const { return violations.empty(); }
};

// Fuzzes random (state, bid) pairs against the non-payment-forceful
// conditions: payment >= 0 always and payment(bid=0) = 0.
AuditReport audit_non_payment_forceful(const Mechanism& mech,
                                       std::int64_t fuzz_budget, Rng& rng);

}  // namespace ralab
