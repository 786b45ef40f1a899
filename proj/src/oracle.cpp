#include "ralab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace ralab {

namespace {

std::string ledger_str(const AvgBidLedger& ledger) {
    return "(sum=" + std::to_string(ledger.bid_sum) +
           ", count=" + std::to_string(ledger.count) + ")";
}

}  // namespace

LookaheadOracle::LookaheadOracle(const Mechanism& mech,
                                 const ValuationDistribution& dist)
    : mech_(mech), dist_(dist) {
    if (mech_.kind() == MechanismKind::Credit)
        throw std::invalid_argument(
            "lookahead oracle requires an enumerable ledger (avg-bid mechanisms)");
    for (Money m = 0; m <= dist_.grid().max_ticks; ++m) bid_grid_.push_back(m);
    Money stay = mech_.min_stay_good_bid(AvgBidLedger{0, 0});
    if (!std::binary_search(bid_grid_.begin(), bid_grid_.end(), stay)) {
        bid_grid_.push_back(stay);
        std::sort(bid_grid_.begin(), bid_grid_.end());
    }
    for (Money m = 0; m <= dist_.grid().max_ticks; ++m)
        if (dist_.weights()[static_cast<std::size_t>(m)] > 0) support_.push_back(m);
}

std::uint64_t LookaheadOracle::pack_key(bool good, const AvgBidLedger& ledger,
                                        int ell) const {
    if (!good) {
        // Single bad class per lookahead depth.
        return (1ULL << 63) | static_cast<std::uint64_t>(ell);
    }
    if (ell == 0) {
        // Myopic continuation in a good state is ledger-independent: the
        // round is won at any bid, so max_b (v - b) = v for every ledger.
        return (1ULL << 62);
    }
    if (ledger.bid_sum < 0 || ledger.bid_sum >= (1LL << 38) ||
        ledger.count >= (1LL << 18) || ell >= (1 << 6))
        throw std::overflow_error("oracle state space exceeds the packed key range");
    return (static_cast<std::uint64_t>(ledger.bid_sum) << 25) |
           (static_cast<std::uint64_t>(ledger.count) << 7) |
           (static_cast<std::uint64_t>(ell) << 1) | 1ULL;
}

Rational LookaheadOracle::utility(const LedgerState& state, Money value, Money bid,
                                  int ell, std::int64_t t) {
    if (ell < 0) throw std::invalid_argument("lookahead must be >= 0");
    if (t < 1 || t > mech_.params().horizon)
        throw std::invalid_argument("round outside [1, T]");
    if (ell > mech_.params().horizon - t)
        throw std::invalid_argument("lookahead exceeds remaining rounds");
    const auto& ledger = std::get<AvgBidLedger>(state);
    return utility_inner(mech_.is_good(state), ledger, value, bid, ell);
}

Rational LookaheadOracle::utility_inner(bool good, const AvgBidLedger& ledger,
                                        Money value, Money bid, int ell) {
    const auto& p = mech_.params();
    if (good) {
        // Allocation is certain; the next ledger classifies itself.
        AvgBidLedger next{ledger.bid_sum + bid, ledger.count + 1};
        Rational u = Rational(value) - Rational(bid);
        if (ell > 0) u += continuation_inner(mech_.is_good(LedgerState{next}), next, ell - 1);
        return u;
    }
    bool escapes = mech_.kind() == MechanismKind::AvgBid || bid >= p.price;
    if (!escapes)
        return ell > 0 ? continuation_inner(false, ledger, ell - 1) : Rational(0);
    Rational win = Rational(value) - Rational(bid);
    if (ell > 0) {
        win += continuation_inner(true, AvgBidLedger{0, 0}, ell - 1);
        Rational lose = continuation_inner(false, ledger, ell - 1);
        return p.rho * win + (Rational(1) - p.rho) * lose;
    }
    return p.rho * win;
}

Rational LookaheadOracle::best_utility(bool good, const AvgBidLedger& ledger,
                                       Money value, int ell, Money* best_bid) {
    Rational best;
    Money arg = 0;
    bool first = true;
    for (Money b : bid_grid_) {
        Rational u = utility_inner(good, ledger, value, b, ell);
        if (first || u > best) {
            best = u;
            arg = b;
            first = false;
        }
    }
    if (best_bid) *best_bid = arg;
    return best;
}

Rational LookaheadOracle::continuation_inner(bool good, const AvgBidLedger& ledger,
                                             int ell) {
    std::uint64_t key = pack_key(good, ledger, ell);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    Rational acc(0);
    for (Money v : support_)
        acc += dist_.pmf(v) * best_utility(good, ledger, v, ell, nullptr);
    memo_.emplace(key, acc);
    return acc;
}

Rational LookaheadOracle::continuation(const LedgerState& state, int ell) {
    const auto& ledger = std::get<AvgBidLedger>(state);
    return continuation_inner(mech_.is_good(state), ledger, ell);
}

LookaheadOracle::Best LookaheadOracle::optimal_bid(const LedgerState& state,
                                                   Money value, int k,
                                                   std::int64_t t) {
    if (k < 0) throw std::invalid_argument("lookahead must be >= 0");
    auto remaining = mech_.params().horizon - t;
    int ell = static_cast<int>(std::min<std::int64_t>(k, remaining));
    const auto& ledger = std::get<AvgBidLedger>(state);
    Best best;
    best.utility = best_utility(mech_.is_good(state), ledger, value, ell, &best.bid);
    return best;
}

std::vector<AvgBidLedger> LookaheadOracle::reachable_good_states(
    std::int64_t max_count) const {
    std::set<std::pair<Money, std::int64_t>> seen;
    std::vector<AvgBidLedger> frontier{AvgBidLedger{0, 0}};
    std::vector<AvgBidLedger> out;
    seen.insert({0, 0});
    out.push_back(frontier.front());
    while (!frontier.empty()) {
        std::vector<AvgBidLedger> next_frontier;
        for (const auto& s : frontier) {
            if (s.count >= max_count) continue;
            for (Money b : bid_grid_) {
                AvgBidLedger next{s.bid_sum + b, s.count + 1};
                if (!mech_.is_good(LedgerState{next})) continue;
                if (!seen.insert({next.bid_sum, next.count}).second) continue;
                next_frontier.push_back(next);
                out.push_back(next);
            }
        }
        frontier = std::move(next_frontier);
    }
    return out;
}

VerificationReport verify_good_persistence(LookaheadOracle& oracle, int k_max,
                                           int k_min) {
    VerificationReport report;
    report.check = "good_persistence";
    const auto& mech = oracle.mechanism();
    auto T = mech.params().horizon;
    auto states = oracle.reachable_good_states(std::max<std::int64_t>(T - 2, 0));
    std::set<std::tuple<Money, std::int64_t, Money, int>> done;
    for (int k = k_min; k <= k_max; ++k) {
        for (std::int64_t t = 1; t < T; ++t) {
            int ell = static_cast<int>(std::min<std::int64_t>(k, T - t));
            for (const auto& s : states) {
                if (s.count > t - 1) continue;
                for (Money v = 0; v <= oracle.distribution().grid().max_ticks; ++v) {
                    if (!done.insert({s.bid_sum, s.count, v, ell}).second) continue;
                    auto best = oracle.optimal_bid(LedgerState{s}, v, ell, t);
                    AvgBidLedger next{s.bid_sum + best.bid, s.count + 1};
                    ++report.cases_checked;
                    if (!mech.is_good(LedgerState{next})) {
                        report.violations.push_back(
                            {"state " + ledger_str(s) + " v=" + std::to_string(v) +
                             " ell=" + std::to_string(ell) + " optimal bid " +
                             std::to_string(best.bid) + " transitions bad"});
                    }
                }
            }
        }
    }
    return report;
}

VerificationReport verify_border_dominance(LookaheadOracle& oracle, int k,
                                           std::int64_t t) {
    VerificationReport report;
    report.check = "border_dominance";
    const auto& mech = oracle.mechanism();
    auto T = mech.params().horizon;
    int ell = static_cast<int>(std::min<std::int64_t>(k, T - t));
    auto states = oracle.reachable_good_states(std::max<std::int64_t>(t - 1, 0));
    LedgerState borderline = AvgBidLedger{0, 0};
    for (const auto& s : states) {
        for (Money v = 0; v <= oracle.distribution().grid().max_ticks; ++v) {
            auto from_s = oracle.optimal_bid(LedgerState{s}, v, ell, t);
            auto from_border = oracle.optimal_bid(borderline, v, ell, t);
            ++report.cases_checked;
            if (from_s.utility < from_border.utility) {
                report.violations.push_back(
                    {"state " + ledger_str(s) + " v=" + std::to_string(v) +
                     " utility " + from_s.utility.str() + " < borderline " +
                     from_border.utility.str()});
            }
        }
    }
    return report;
}

VerificationReport verify_delta_positive(LookaheadOracle& oracle, int k,
                                         std::int64_t t) {
    VerificationReport report;
    report.check = "delta_positive";
    const auto& mech = oracle.mechanism();
    if (!mech.params().in_lookahead_regime())
        throw std::invalid_argument("delta check requires rho <= eps/(2-eps)");
    auto T = mech.params().horizon;
    int ell = static_cast<int>(std::min<std::int64_t>(k, T - t));
    if (ell < 1) throw std::invalid_argument("delta check requires lookahead >= 1");
    auto states = oracle.reachable_good_states(std::max<std::int64_t>(t - 1, 0));
    for (const auto& s : states) {
        Money stay = mech.min_stay_good_bid(s);
        for (Money v = 0; v <= oracle.distribution().grid().max_ticks; ++v) {
            Rational stay_u = oracle.utility(LedgerState{s}, v, stay, ell, t);
            for (Money b : oracle.bid_grid()) {
                AvgBidLedger next{s.bid_sum + b, s.count + 1};
                if (mech.is_good(LedgerState{next})) continue;
                Rational bad_u = oracle.utility(LedgerState{s}, v, b, ell, t);
                ++report.cases_checked;
                if (!(stay_u > bad_u)) {
                    report.violations.push_back(
                        {"state " + ledger_str(s) + " v=" + std::to_string(v) +
                         " bad bid " + std::to_string(b) + " utility " + bad_u.str() +
                         " not dominated by stay-good bid " + std::to_string(stay) +
                         " utility " + stay_u.str()});
                }
            }
        }
    }
    return report;
}

double GeometricTruncatedMean::discrepancy() const {
    return std::abs(closed_form - enumeration);
}

GeometricTruncatedMean geometric_truncated_mean(double rho, int k) {
    if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("rho must be in (0,1]");
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    GeometricTruncatedMean out;
    double tail_k = std::pow(1.0 - rho, k - 1);  // P(X >= k)
    out.closed_form = (1.0 / rho) * (1.0 - tail_k) + tail_k;
    double acc = 0.0;
    double pj = rho;  // P(X = j), j = 1
    for (int j = 1; j < k; ++j) {
        acc += static_cast<double>(j) * pj;
        pj *= (1.0 - rho);
    }
    acc += static_cast<double>(k) * tail_k;
    out.enumeration = acc;
    return out;
}

Rational myopic_markov_revenue(const ValuationDistribution& dist,
                               const MechanismParams& params) {
    Rational q = params.rho * dist.tail(params.price);
    if (q.is_zero()) return Rational(0);
    return Rational(params.price) * q / (Rational(1) + q);
}

double myopic_revenue_floor(const ValuationDistribution& dist,
                            const MechanismParams& params) {
    MyersonStats stats = myerson(dist);
    double rev_mye = stats.revenue.to_double() * dist.grid().tick;
    double rho = params.rho.to_double();
    return rho / (rho + 1.0) * rev_mye - 1.0 / static_cast<double>(params.horizon);
}

}  // namespace ralab
