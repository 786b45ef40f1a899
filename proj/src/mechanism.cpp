#include "ralab/mechanism.hpp"

#include <cmath>
#include <stdexcept>

namespace ralab {

std::string to_string(MechanismKind kind) {
    switch (kind) {
        case MechanismKind::AvgBid: return "avg";
        case MechanismKind::AvgBidPrice: return "avg_price";
        case MechanismKind::Credit: return "credit";
    }
    return "?";
}

MechanismKind mechanism_kind_from_string(const std::string& name) {
    if (name == "avg") return MechanismKind::AvgBid;
    if (name == "avg_price") return MechanismKind::AvgBidPrice;
    if (name == "credit") return MechanismKind::Credit;
    throw std::invalid_argument("unknown mechanism kind: " + name);
}

void MechanismParams::validate() const {
    if (!(epsilon > Rational(0) && epsilon < Rational(1)))
        throw std::invalid_argument("mechanism.epsilon must be in (0,1)");
    if (!(rho >= Rational(0) && rho <= Rational(1)))
        throw std::invalid_argument("mechanism.rho must be in [0,1]");
    if (price < 0) throw std::invalid_argument("mechanism.price must be >= 0");
    if (horizon < 1) throw std::invalid_argument("T must be >= 1");
    if (support_bound < 1) throw std::invalid_argument("support bound must be >= 1 tick");
    if (!(mean_ticks > Rational(0)))
        throw std::invalid_argument("distribution mean must be positive");
    if (Rational(support_bound) < mean_ticks)
        throw std::invalid_argument("support bound below distribution mean");
}

double r_target(std::int64_t T, double mu, double epsilon, double B) {
    double lnT = std::log(static_cast<double>(T));
    double sqrtT = std::sqrt(static_cast<double>(T));
    double inv_sqrt_sum = 0.0;
    for (std::int64_t j = T; j >= 1; --j)
        inv_sqrt_sum += 1.0 / std::sqrt(static_cast<double>(j));
    return static_cast<double>(T) * mu * (1.0 - epsilon)
         - std::sqrt(4.0 * B * mu * sqrtT * lnT)
         - std::sqrt(2.0 * B * mu * lnT) * inv_sqrt_sum;
}

Mechanism::Mechanism(MechanismKind kind, MechanismParams params)
    : kind_(kind), params_(std::move(params)) {
    params_.validate();
    threshold_ = params_.threshold();
    if (kind_ == MechanismKind::Credit) {
        double mu = params_.mean_ticks.to_double();
        auto B = static_cast<double>(params_.support_bound);
        auto T = params_.horizon;
        double lnT = std::log(static_cast<double>(T));
        r_target_ = r_target(T, mu, params_.epsilon.to_double(), B);
        initial_credit_ = mu * std::sqrt(static_cast<double>(T)) +
                          std::sqrt(4.0 * B * mu * std::sqrt(static_cast<double>(T)) * lnT);
    }
}

LedgerState Mechanism::init_state() const {
    if (kind_ == MechanismKind::Credit)
        return CreditLedger{initial_credit_, 0.0, 0};
    return AvgBidLedger{0, 0};
}

bool Mechanism::is_good(const LedgerState& state) const {
    if (const auto* credit = std::get_if<CreditLedger>(&state))
        return credit->total_paid >= credit->expected_paid;
    const auto& ledger = std::get<AvgBidLedger>(state);
    if (ledger.count == 0) return true;  // borderline convention
    return Rational(ledger.bid_sum, ledger.count) >= threshold_;
}

int Mechanism::allocate(const LedgerState& state, Money bid, Rng& rng) const {
    if (bid < 0) throw std::invalid_argument("bid must be >= 0");
    if (is_good(state)) return 1;
    if (kind_ == MechanismKind::AvgBid)
        return rng.bernoulli(params_.rho.num(), params_.rho.den()) ? 1 : 0;
    if (bid >= params_.price)
        return rng.bernoulli(params_.rho.num(), params_.rho.den()) ? 1 : 0;
    return 0;
}

double Mechanism::charge(const LedgerState& state, Money bid, int allocated) const {
    if (allocated == 0) return 0.0;
    if (kind_ == MechanismKind::Credit) {
        const auto& credit = std::get<CreditLedger>(state);
        if (credit.total_paid > r_target_) return 0.0;
        return std::min(static_cast<double>(bid), r_target_ - credit.total_paid);
    }
    return static_cast<double>(bid);
}

LedgerState Mechanism::transition(const LedgerState& state, Money bid, int allocated,
                                  double payment) const {
    if (kind_ == MechanismKind::Credit) {
        auto credit = std::get<CreditLedger>(state);
        std::int64_t t = credit.round + 1;  // 1-based index of the round just played
        credit.round = t;
        if (credit.total_paid >= r_target_) {
            credit.expected_paid = 0.0;
            return credit;
        }
        if (credit.total_paid >= credit.expected_paid) {
            // Good state: the allocation rule always allocates here.
            if (allocated == 1) {
                double mu = params_.mean_ticks.to_double();
                auto B = static_cast<double>(params_.support_bound);
                double lnT = std::log(static_cast<double>(params_.horizon));
                double slack = std::sqrt(2.0 * B * mu * lnT / static_cast<double>(t));
                credit.total_paid += payment;
                credit.expected_paid += mu * (1.0 - params_.epsilon.to_double()) - slack;
            }
            return credit;
        }
        if (allocated == 1) credit.expected_paid = credit.total_paid;
        return credit;
    }
    auto ledger = std::get<AvgBidLedger>(state);
    if (allocated == 0) return ledger;
    if (is_good(state)) return AvgBidLedger{ledger.bid_sum + bid, ledger.count + 1};
    return AvgBidLedger{0, 0};  // bad-state exit resets to borderline
}

RoundOutcome Mechanism::run_round(const LedgerState& state, Money bid, Rng& rng) const {
    RoundOutcome out;
    out.allocated = allocate(state, bid, rng);
    out.payment = charge(state, bid, out.allocated);
    out.next = transition(state, bid, out.allocated, out.payment);
    return out;
}

Money Mechanism::min_stay_good_bid(const AvgBidLedger& ledger) const {
    Rational needed = threshold_ * Rational(ledger.count + 1) - Rational(ledger.bid_sum);
    std::int64_t bid = needed.ceil();
    return bid > 0 ? bid : 0;
}

AuditReport audit_non_payment_forceful(const Mechanism& mech,
                                       std::int64_t fuzz_budget, Rng& rng) {
    AuditReport report;
    const auto& p = mech.params();
    for (std::int64_t i = 0; i < fuzz_budget; ++i) {
        LedgerState state;
        if (mech.kind() == MechanismKind::Credit) {
            double scale = mech.revenue_target() > 0 ? mech.revenue_target() * 1.5
                                                     : static_cast<double>(p.support_bound);
            CreditLedger credit;
            credit.total_paid = rng.next_double() * scale;
            credit.expected_paid = rng.next_double() * scale;
            credit.round = static_cast<std::int64_t>(rng.below(
                static_cast<std::uint64_t>(p.horizon)));
            state = credit;
        } else {
            AvgBidLedger ledger;
            ledger.count = static_cast<std::int64_t>(rng.below(64));
            Money cap = p.support_bound * (ledger.count > 0 ? ledger.count : 1);
            ledger.bid_sum = ledger.count == 0
                ? 0
                : static_cast<Money>(rng.below(static_cast<std::uint64_t>(cap + 1)));
            state = ledger;
        }
        // Alternate random bids with the forced zero-bid probe.
        Money bid = (i % 2 == 0)
            ? 0
            : static_cast<Money>(rng.below(static_cast<std::uint64_t>(p.support_bound + 1)));
        int x = mech.allocate(state, bid, rng);
        double pay = mech.charge(state, bid, x);
        ++report.cases_checked;
        if (pay < 0.0)
            report.violations.push_back({"negative payment " + std::to_string(pay) +
                                         " at bid " + std::to_string(bid)});
        if (bid == 0 && pay != 0.0)
            report.violations.push_back({"nonzero payment " + std::to_string(pay) +
                                         " at zero bid"});
    }
    return report;
}

}  // namespace ralab
