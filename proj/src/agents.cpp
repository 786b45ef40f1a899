#include "ralab/agents.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ralab {

std::vector<Expert> make_expert_grid(const std::vector<Money>& bids) {
    std::vector<Expert> experts;
    experts.reserve(bids.size() * bids.size());
    for (Money g : bids)
        for (Money beta : bids) experts.push_back(Expert{g, beta});
    return experts;
}

std::vector<Money> evenly_spaced_bids(Money B, int points) {
    if (points < 2) throw std::invalid_argument("bid grid needs at least 2 points");
    if (B % (points - 1) != 0)
        throw std::invalid_argument("bid grid points must divide the support bound");
    std::vector<Money> bids;
    Money step = B / (points - 1);
    for (int i = 0; i < points; ++i) bids.push_back(step * i);
    return bids;
}

Money myopic_bid(const Observation& obs, Money escape_price) {
    if (obs.good) return 0;
    return obs.value >= escape_price ? escape_price : 0;
}

Money stay_good_bid(const AvgBidLedger& ledger, const Observation& obs,
                    const MechanismParams& params) {
    if (obs.round >= obs.rounds_total) return myopic_bid(obs, params.price);
    if (!obs.good) return obs.value >= params.price ? params.price : 0;
    Rational needed =
        params.threshold() * Rational(ledger.count + 1) - Rational(ledger.bid_sum);
    std::int64_t bid = needed.ceil();
    return bid > 0 ? bid : 0;
}

Money truthful_bid(const Observation& obs) { return obs.value; }

Exp3State::Exp3State(std::size_t n_experts, Money B, std::int64_t T)
    : weights_(n_experts, 1.0), weight_sum_(static_cast<double>(n_experts)) {
    if (n_experts == 0) throw std::invalid_argument("expert class is empty");
    if (B <= 0) throw std::invalid_argument("utility bound must be positive");
    if (T < 1) throw std::invalid_argument("horizon must be >= 1");
    B_ = B;
    scale_ = 2.0 * static_cast<double>(B);
    auto n = static_cast<double>(n_experts);
    eta_ = std::sqrt(std::log(n) / (n * static_cast<double>(T)));
    gamma_ = std::min(
        1.0, std::sqrt(n * std::log(n) /
                       ((std::exp(1.0) - 1.0) * static_cast<double>(T))));
}

double Exp3State::probability_of(std::size_t i) const {
    return (1.0 - gamma_) * weights_[i] / weight_sum_ +
           gamma_ / static_cast<double>(weights_.size());
}

std::vector<double> Exp3State::probabilities() const {
    std::vector<double> probs(weights_.size());
    for (std::size_t i = 0; i < weights_.size(); ++i) probs[i] = probability_of(i);
    return probs;
}

std::size_t Exp3State::step(Rng& rng) {
    double r = rng.next_double();
    double acc = 0.0;
    std::size_t chosen = weights_.size() - 1;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        acc += probability_of(i);
        if (r < acc) {
            chosen = i;
            break;
        }
    }
    last_chosen_ = chosen;
    last_prob_ = probability_of(chosen);
    pending_ = true;
    return chosen;
}

void Exp3State::update(std::size_t chosen, double utility) {
    double bound = static_cast<double>(B_);
    if (utility < -bound - 1e-9 || utility > bound + 1e-9)
        throw std::invalid_argument("utility outside [-B, B]");
    if (!pending_ || chosen != last_chosen_)
        throw std::logic_error("update must follow the matching step");
    pending_ = false;
    double reward = (utility + bound) / scale_;  // [0,1]
    if (reward <= 0.0) return;                   // exp(0) multiplier
    double estimate = reward / last_prob_;
    double multiplier = std::exp(eta_ * estimate);
    double old = weights_[chosen];
    weights_[chosen] = old * multiplier;
    weight_sum_ += weights_[chosen] - old;
    if (weight_sum_ > 1e100) {
        double inv = 1.0 / weight_sum_;
        weight_sum_ = 0.0;
        for (auto& w : weights_) {
            w *= inv;
            weight_sum_ += w;
        }
    }
}

EtcState::EtcState(std::vector<Money> candidates, std::int64_t block_len,
                   std::int64_t burn_in, Money max_bid, Rational rho)
    : candidates_(std::move(candidates)),
      block_len_(block_len),
      burn_in_(burn_in),
      max_bid_(max_bid) {
    if (candidates_.empty()) throw std::invalid_argument("no ETC candidates");
    if (block_len_ <= burn_in_)
        throw std::invalid_argument("ETC block shorter than its burn-in");
    std::sort(candidates_.begin(), candidates_.end());
    candidates_.erase(std::unique(candidates_.begin(), candidates_.end()),
                      candidates_.end());
    tally_.assign(candidates_.size(), 0.0);
    drive_cap_ = 3 * block_len_;
    double r = std::max(rho.to_double(), 0.01);
    escape_cap_ = static_cast<std::int64_t>(std::ceil(50.0 / r));
}

Money EtcState::step(const Observation& obs) {
    if (phase_ == Phase::Committed) return commit_bid_;
    if (obs.round == 1) {
        // The mechanism starts at borderline; the first block needs no reset.
        phase_ = Phase::Tally;
        phase_round_ = 0;
    }
    Money b = choose(obs);
    if (phase_ != Phase::Committed) ++explored_rounds_;
    return b;
}

Money EtcState::choose(const Observation& obs) {
    if (phase_ == Phase::DriveBad) {
        if (obs.good && phase_round_ < drive_cap_) {
            ++phase_round_;
            return 0;
        }
        phase_ = Phase::Escape;
        phase_round_ = 0;
    }
    if (phase_ == Phase::Escape) {
        if (!obs.good && phase_round_ < escape_cap_) {
            ++phase_round_;
            return max_bid_;
        }
        phase_ = Phase::Tally;
        phase_round_ = 0;
    }
    if (phase_ == Phase::Tally) {
        if (phase_round_ < block_len_) {
            ++phase_round_;
            return candidates_[current_];
        }
        advance_candidate();
        return choose(obs);
    }
    // FinalEscape: make sure the committed bid starts from a good state.
    if (!obs.good && phase_round_ < escape_cap_) {
        ++phase_round_;
        return max_bid_;
    }
    commit();
    return commit_bid_;
}

void EtcState::feedback(const Observation& obs, Money /*bid*/, int allocated,
                        double payment) {
    if (phase_ != Phase::Tally) return;
    if (phase_round_ <= burn_in_) return;
    tally_[current_] +=
        static_cast<double>(obs.value) * allocated - payment;
}

void EtcState::advance_candidate() {
    ++current_;
    phase_round_ = 0;
    if (current_ >= candidates_.size()) {
        phase_ = Phase::FinalEscape;
        return;
    }
    phase_ = Phase::DriveBad;
}

void EtcState::commit() {
    std::size_t best = 0;
    for (std::size_t i = 1; i < tally_.size(); ++i)
        if (tally_[i] > tally_[best]) best = i;  // ties keep the lower bid
    commit_bid_ = candidates_[best];
    phase_ = Phase::Committed;
}

namespace {

class MyopicAgent final : public Agent {
public:
    explicit MyopicAgent(Money escape_price) : price_(escape_price) {}
    Money bid(const Observation& obs, const LedgerState&, Rng&) override {
        return myopic_bid(obs, price_);
    }
    std::string name() const override { return "myopic"; }

private:
    Money price_;
};

// Bids 0 everywhere: the optimal myopic response when bad states escape
// at any bid, so the escape price is no reason to bid above 0.
class ZeroAgent final : public Agent {
public:
    Money bid(const Observation&, const LedgerState&, Rng&) override { return 0; }
    std::string name() const override { return "myopic"; }
};

class StayGoodAgent final : public Agent {
public:
    explicit StayGoodAgent(const MechanismParams& params) : params_(params) {}
    Money bid(const Observation& obs, const LedgerState& state, Rng&) override {
        return stay_good_bid(std::get<AvgBidLedger>(state), obs, params_);
    }
    std::string name() const override { return "stay_good"; }

private:
    MechanismParams params_;
};

class TruthfulAgent final : public Agent {
public:
    Money bid(const Observation& obs, const LedgerState&, Rng&) override {
        return truthful_bid(obs);
    }
    std::string name() const override { return "truthful"; }
};

class ConstantAgent final : public Agent {
public:
    explicit ConstantAgent(Money bid) : bid_(bid) {}
    Money bid(const Observation&, const LedgerState&, Rng&) override { return bid_; }
    std::string name() const override { return "constant"; }

private:
    Money bid_;
};

class Exp3Agent final : public Agent {
public:
    Exp3Agent(std::vector<Expert> experts, Money B, std::int64_t T)
        : experts_(std::move(experts)), state_(experts_.size(), B, T) {}

    Money bid(const Observation& obs, const LedgerState&, Rng& rng) override {
        chosen_ = state_.step(rng);
        return experts_[chosen_].induced_bid(obs.good, obs.value);
    }
    void feedback(const Observation& obs, Money, int allocated,
                  double payment) override {
        double utility = static_cast<double>(obs.value) * allocated - payment;
        state_.update(chosen_, utility);
    }
    std::string name() const override { return "exp3"; }
    const Exp3State& state() const { return state_; }

private:
    std::vector<Expert> experts_;
    Exp3State state_;
    std::size_t chosen_ = 0;
};

class EtcAgent final : public Agent {
public:
    EtcAgent(std::vector<Money> candidates, std::int64_t block_len,
             std::int64_t burn_in, Money max_bid, Rational rho)
        : state_(std::move(candidates), block_len, burn_in, max_bid, rho) {}

    Money bid(const Observation& obs, const LedgerState&, Rng&) override {
        return state_.step(obs);
    }
    void feedback(const Observation& obs, Money bid, int allocated,
                  double payment) override {
        state_.feedback(obs, bid, allocated, payment);
    }
    std::string name() const override { return "etc"; }
    const EtcState* etc_state() const override { return &state_; }

private:
    EtcState state_;
};

class LookaheadAgent final : public Agent {
public:
    LookaheadAgent(const Mechanism& mech, const ValuationDistribution& dist, int k,
                   bool random_k)
        : oracle_(mech, dist), k_(k), random_k_(random_k) {}

    Money bid(const Observation& obs, const LedgerState& state, Rng& rng) override {
        auto remaining = obs.rounds_total - obs.round;
        int k = k_;
        if (random_k_) {
            k = remaining > 0
                ? 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(remaining)))
                : 0;
        }
        return oracle_.optimal_bid(state, obs.value, k, obs.round).bid;
    }
    std::string name() const override { return "lookahead"; }

private:
    LookaheadOracle oracle_;
    int k_;
    bool random_k_;
};

}  // namespace

std::unique_ptr<Agent> make_agent(const AgentSpec& spec, const Mechanism& mech,
                                  const ValuationDistribution& dist) {
    const auto& params = mech.params();
    if (spec.kind == "myopic") {
        if (mech.kind() == MechanismKind::AvgBid)
            return std::make_unique<ZeroAgent>();
        return std::make_unique<MyopicAgent>(params.price);
    }
    if (spec.kind == "stay_good") {
        if (mech.kind() == MechanismKind::Credit)
            throw std::invalid_argument("stay_good agent needs an avg-bid ledger");
        return std::make_unique<StayGoodAgent>(params);
    }
    if (spec.kind == "truthful") return std::make_unique<TruthfulAgent>();
    if (spec.kind == "constant")
        return std::make_unique<ConstantAgent>(dist.grid().to_ticks(spec.constant_bid));
    if (spec.kind == "exp3") {
        auto bids = evenly_spaced_bids(dist.support_max(), spec.expert_grid_points);
        return std::make_unique<Exp3Agent>(make_expert_grid(bids), dist.support_max(),
                                           params.horizon);
    }
    if (spec.kind == "etc") {
        std::vector<Money> candidates;
        if (spec.etc_candidates.empty()) {
            for (Money m = 0; m <= dist.support_max(); ++m) candidates.push_back(m);
        } else {
            for (double c : spec.etc_candidates)
                candidates.push_back(dist.grid().to_ticks(c));
        }
        auto n = static_cast<double>(candidates.size());
        auto T = static_cast<double>(params.horizon);
        auto block = static_cast<std::int64_t>(std::ceil(std::pow(T, 2.0 / 3.0) / n));
        block = std::max<std::int64_t>(block, 100);
        return std::make_unique<EtcAgent>(std::move(candidates), block, 10,
                                          dist.support_max(), params.rho);
    }
    if (spec.kind == "lookahead") {
        if (spec.k < 1) throw std::invalid_argument("lookahead k must be >= 1");
        bool random_k = spec.k_policy == "uniform_random";
        if (!random_k && spec.k_policy != "constant")
            throw std::invalid_argument("agent.k_policy must be constant or uniform_random");
        return std::make_unique<LookaheadAgent>(mech, dist, spec.k, random_k);
    }
    throw std::invalid_argument("unknown agent kind: " + spec.kind);
}

std::unique_ptr<Agent> make_constant_agent(Money bid) {
    return std::make_unique<ConstantAgent>(bid);
}

}  // namespace ralab
