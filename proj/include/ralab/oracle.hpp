#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "ralab/mechanism.hpp"
#include "ralab/rational.hpp"
#include "ralab/valuation.hpp"

namespace ralab {

// Exact finite-horizon backward induction of the lookahead-utility
// recursion for the avg-bid mechanisms. All arithmetic is rational, so
// utilities are evaluation-order independent and ties are decided exactly.
//
// Bad states collapse to a single class: their dynamics depend only on
// the bid (escape resets the ledger), never on the ledger content. This
// keeps the enumerable state space polynomial. Credit-ledger mechanisms
// have a continuous state space and are not supported here.
class LookaheadOracle {
public:
    LookaheadOracle(const Mechanism& mech, const ValuationDistribution& dist);

    const Mechanism& mechanism() const { return mech_; }
    const ValuationDistribution& distribution() const { return dist_; }
    // Value grid plus the minimum stay-good bid, if off the grid.
    const std::vector<Money>& bid_grid() const { return bid_grid_; }

    // U_ell(state, v, bid); requires ell <= T - t.
    Rational utility(const LedgerState& state, Money value, Money bid, int ell,
                     std::int64_t t);

    struct Best {
        Money bid = 0;
        Rational utility;
    };
    // argmax over the bid grid with ell = min(k, T - t); ties go to the
    // lowest bid.
    Best optimal_bid(const LedgerState& state, Money value, int k, std::int64_t t);

    // E_v[ max_b U_ell(state, v, b) ], the optimal continuation value.
    Rational continuation(const LedgerState& state, int ell);

    // Good ledgers reachable from the borderline start within max_count
    // accepted bids, every prefix state good.
    std::vector<AvgBidLedger> reachable_good_states(std::int64_t max_count) const;

private:
    struct Entry {
        Rational value;
        bool known = false;
    };

    Rational utility_inner(bool good, const AvgBidLedger& ledger, Money value,
                           Money bid, int ell);
    Rational best_utility(bool good, const AvgBidLedger& ledger, Money value, int ell,
                          Money* best_bid);
    Rational continuation_inner(bool good, const AvgBidLedger& ledger, int ell);

    std::uint64_t pack_key(bool good, const AvgBidLedger& ledger, int ell) const;

    const Mechanism& mech_;
    const ValuationDistribution& dist_;
    std::vector<Money> bid_grid_;
    std::vector<Money> support_;  // values with positive mass
    std::unordered_map<std::uint64_t, Rational> memo_;
};

struct VerifyWitness {
    std::string detail;
};

struct VerificationReport {
    std::string check;
    std::int64_t cases_checked = 0;
    std::vector<VerifyWitness> violations;
    bool passed() const { return violations.empty(); }
};

// Every optimal k-lookahead bid from a reachable good state keeps the next
// state good, for k in [k_min, k_max] and t in [1, T-1]. Including k = 0
// documents the myopic counterexample (those violations are expected).
VerificationReport verify_good_persistence(LookaheadOracle& oracle, int k_max,
                                           int k_min = 1);

// Optimal utility from any reachable good state dominates the optimal
// utility from the borderline state, at lookahead min(k, T-t).
VerificationReport verify_border_dominance(LookaheadOracle& oracle, int k,
                                           std::int64_t t);

// For every reachable good state and every bid whose transition is bad,
// the minimum stay-good bid is strictly better at lookahead min(k, T-t).
VerificationReport verify_delta_positive(LookaheadOracle& oracle, int k,
                                         std::int64_t t);

struct GeometricTruncatedMean {
    double closed_form = 0.0;  // (1/rho) P(X < k) + P(X >= k)
    double enumeration = 0.0;  // sum_j min(j,k) P(X = j)
    double discrepancy() const;
};

// E[min(X, k)] for X ~ Geometric(rho), both by closed form and by direct
// summation; the two routes must agree to 1e-12.
GeometricTruncatedMean geometric_truncated_mean(double rho, int k);

// Steady-state per-round revenue of the myopic-buyer Markov chain on the
// priced-escape mechanism: p * q / (1 + q) with q = rho * P(v >= p).
Rational myopic_markov_revenue(const ValuationDistribution& dist,
                               const MechanismParams& params);

// Finite-horizon revenue floor in currency units:
// rho/(rho+1) * Rev_Mye - 1/T.
double myopic_revenue_floor(const ValuationDistribution& dist,
                            const MechanismParams& params);

}  // namespace ralab
