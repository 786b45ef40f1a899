#include "ralab/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "ralab/config.hpp"
#include "ralab/rng.hpp"

namespace ralab {

namespace {

void snapshot_ledger(const LedgerState& state, RoundRecord& rec) {
    if (const auto* credit = std::get_if<CreditLedger>(&state)) {
        rec.ledger_a = credit->total_paid;
        rec.ledger_b = credit->expected_paid;
    } else {
        const auto& ledger = std::get<AvgBidLedger>(state);
        rec.ledger_a = static_cast<double>(ledger.bid_sum);
        rec.ledger_b = static_cast<double>(ledger.count);
    }
}

template <typename Sink>
void run_rounds(const Mechanism& mech, Agent& agent, const ValuationDistribution& dist,
                std::int64_t T, std::uint64_t seed, Sink&& sink) {
    Rng values(derive_seed(seed, 0));
    Rng coins(derive_seed(seed, 1));
    Rng agent_rng(derive_seed(seed, 2));
    LedgerState state = mech.init_state();
    for (std::int64_t t = 1; t <= T; ++t) {
        Money v = dist.sample(values);
        Observation obs{mech.is_good(state), v, t, T};
        Money b = agent.bid(obs, state, agent_rng);
        RoundOutcome out = mech.run_round(state, b, coins);
        RoundRecord rec;
        rec.round = t;
        rec.good = obs.good;
        snapshot_ledger(state, rec);
        rec.value = v;
        rec.bid = b;
        rec.allocated = out.allocated;
        rec.payment = out.payment;
        rec.utility = static_cast<double>(v) * out.allocated - out.payment;
        sink(rec);
        agent.feedback(obs, b, out.allocated, out.payment);
        state = std::move(out.next);
    }
}

// Streaming hindsight tallies for the expert class: good rounds need only
// (count, value sum); bad rounds a value histogram, so each expert's
// hindsight utility is O(1) after suffix sums.
class RegretAccumulator {
public:
    RegretAccumulator(const Mechanism& mech, Money support_max)
        : mech_(mech), bad_hist_(static_cast<std::size_t>(support_max) + 1, 0) {}

    void add(bool good, Money v, Money bid) {
        realized_ += analytic_utility(mech_, good, v, bid);
        if (good) {
            ++good_rounds_;
            good_value_sum_ += static_cast<double>(v);
        } else {
            ++bad_hist_[static_cast<std::size_t>(v)];
        }
    }

    double regret(const std::vector<Expert>& experts) const {
        std::size_t n = bad_hist_.size();
        std::vector<double> s0(n + 1, 0.0), s1(n + 1, 0.0);
        for (std::size_t i = n; i-- > 0;) {
            s0[i] = s0[i + 1] + static_cast<double>(bad_hist_[i]);
            s1[i] = s1[i + 1] + static_cast<double>(bad_hist_[i]) * static_cast<double>(i);
        }
        double bad_total_value = s1[0];
        double rho = mech_.params().rho.to_double();
        Money p = mech_.params().price;
        bool priced = mech_.kind() == MechanismKind::AvgBidPrice;
        double best = 0.0;
        bool first = true;
        for (const auto& e : experts) {
            double good_part =
                good_value_sum_ -
                static_cast<double>(good_rounds_) * static_cast<double>(e.good_bid);
            auto beta = static_cast<std::size_t>(e.bad_threshold);
            double bad_part;
            if (priced) {
                bad_part = e.bad_threshold >= p
                    ? rho * (s1[beta] - static_cast<double>(e.bad_threshold) * s0[beta])
                    : 0.0;
            } else {
                // Escape at any bid: values below beta are bid at 0, still
                // won with probability rho at zero payment.
                bad_part = rho * (bad_total_value -
                                  static_cast<double>(e.bad_threshold) * s0[beta]);
            }
            double total = good_part + bad_part;
            if (first || total > best) {
                best = total;
                first = false;
            }
        }
        return best - realized_;
    }

private:
    const Mechanism& mech_;
    std::vector<std::int64_t> bad_hist_;
    std::int64_t good_rounds_ = 0;
    double good_value_sum_ = 0.0;
    double realized_ = 0.0;
};

struct RepResult {
    double payment_sum = 0.0;  // ticks
    double utility_sum = 0.0;  // ticks
    std::int64_t bad_rounds = 0;
    std::int64_t negative_rounds = 0;
    double min_prefix = 0.0;  // ticks
    std::optional<double> regret;         // ticks
    std::optional<double> policy_regret;  // ticks
    std::optional<double> etc_explore_fraction;
    std::optional<double> etc_post_commit_bad_fraction;
    std::optional<double> etc_committed_bid;  // ticks
};

double mean_of(const std::vector<double>& xs) {
    return xs.empty() ? 0.0 : pairwise_sum(xs) / static_cast<double>(xs.size());
}

}  // namespace

Trajectory run_trajectory(const Mechanism& mech, Agent& agent,
                          const ValuationDistribution& dist, std::int64_t T,
                          std::uint64_t seed) {
    if (T < 1) throw std::invalid_argument("T must be >= 1");
    Trajectory traj;
    traj.seed = seed;
    traj.rounds.reserve(static_cast<std::size_t>(T));
    run_rounds(mech, agent, dist, T, seed, [&](const RoundRecord& rec) {
        traj.rounds.push_back(rec);
        traj.total_payment += rec.payment;
        traj.total_utility += rec.utility;
        if (!rec.good) ++traj.bad_rounds;
    });
    return traj;
}

bool matches_single_good_cycles(const std::vector<RoundRecord>& rounds) {
    if (rounds.empty()) return true;
    if (!rounds.front().good) return false;
    for (std::size_t i = 1; i < rounds.size(); ++i)
        if (rounds[i].good && rounds[i - 1].good) return false;
    return true;
}

IrAudit ex_post_ir_audit(const Trajectory& traj) {
    IrAudit audit;
    double prefix = 0.0;
    double min_prefix = 0.0;
    for (const auto& rec : traj.rounds) {
        if (rec.utility < 0.0) ++audit.negative_rounds;
        prefix += rec.utility;
        min_prefix = std::min(min_prefix, prefix);
    }
    audit.min_prefix_utility = min_prefix;
    audit.total_utility = prefix;
    return audit;
}

double analytic_utility(const Mechanism& mech, bool good, Money value, Money bid) {
    if (mech.kind() == MechanismKind::Credit)
        throw std::invalid_argument("analytic utility requires an avg-bid mechanism");
    if (good) return static_cast<double>(value - bid);
    double rho = mech.params().rho.to_double();
    if (mech.kind() == MechanismKind::AvgBidPrice && bid < mech.params().price)
        return 0.0;
    return rho * static_cast<double>(value - bid);
}

double measured_regret(const Trajectory& traj, const std::vector<Expert>& experts,
                       const Mechanism& mech) {
    RegretAccumulator acc(mech, mech.params().support_bound);
    for (const auto& rec : traj.rounds) acc.add(rec.good, rec.value, rec.bid);
    return acc.regret(experts);
}

double measured_policy_regret(const Mechanism& mech, const ValuationDistribution& dist,
                              std::int64_t T, std::uint64_t seed,
                              double realized_total_utility,
                              const std::vector<Money>& benchmark_bids) {
    if (benchmark_bids.empty())
        throw std::invalid_argument("policy regret needs at least one benchmark bid");
    double best = 0.0;
    bool first = true;
    for (Money b : benchmark_bids) {
        auto agent = make_constant_agent(b);
        double total = 0.0;
        run_rounds(mech, *agent, dist, T, seed,
                   [&](const RoundRecord& rec) { total += rec.utility; });
        if (first || total > best) {
            best = total;
            first = false;
        }
    }
    return best - realized_total_utility;
}

double pairwise_sum(const std::vector<double>& values) {
    // Fixed reduction tree: the result depends only on the index order.
    std::vector<double> level(values);
    if (level.empty()) return 0.0;
    while (level.size() > 1) {
        std::vector<double> next;
        next.reserve((level.size() + 1) / 2);
        for (std::size_t i = 0; i + 1 < level.size(); i += 2)
            next.push_back(level[i] + level[i + 1]);
        if (level.size() % 2 == 1) next.push_back(level.back());
        level = std::move(next);
    }
    return level.front();
}

RevenueReport run_experiment(const ExperimentConfig& config) {
    if (config.replications < 1)
        throw std::invalid_argument("replications must be >= 1");
    ValuationDistribution dist = make_distribution(config.distribution);
    Mechanism mech = make_mechanism(config, dist);
    const auto T = config.T;
    const double tick = dist.grid().tick;

    std::vector<Expert> experts;
    if (config.regret_expert_points) {
        auto bids = evenly_spaced_bids(dist.support_max(), *config.regret_expert_points);
        experts = make_expert_grid(bids);
    }
    std::vector<Money> benchmarks;
    if (config.policy_regret_benchmarks) {
        for (double b : *config.policy_regret_benchmarks)
            benchmarks.push_back(dist.grid().to_ticks(b));
    }

    auto reps = static_cast<std::size_t>(config.replications);
    std::vector<RepResult> results(reps);

    auto run_rep = [&](std::size_t rep) {
        std::uint64_t seed = derive_seed(config.master_seed, rep);
        auto agent = make_agent(config.agent, mech, dist);
        const EtcState* etc = agent->etc_state();
        RepResult r;
        std::optional<RegretAccumulator> regret_acc;
        if (!experts.empty()) regret_acc.emplace(mech, mech.params().support_bound);
        double prefix = 0.0, min_prefix = 0.0;
        std::int64_t post_commit_rounds = 0, post_commit_bad = 0;
        bool tracing = rep == 0 && !config.trace_path.empty();
        Trajectory trace_traj;
        trace_traj.seed = seed;
        run_rounds(mech, *agent, dist, T, seed, [&](const RoundRecord& rec) {
            r.payment_sum += rec.payment;
            r.utility_sum += rec.utility;
            if (!rec.good) ++r.bad_rounds;
            if (rec.utility < 0.0) ++r.negative_rounds;
            prefix += rec.utility;
            min_prefix = std::min(min_prefix, prefix);
            if (regret_acc) regret_acc->add(rec.good, rec.value, rec.bid);
            if (etc && etc->committed()) {
                ++post_commit_rounds;
                if (!rec.good) ++post_commit_bad;
            }
            if (tracing) trace_traj.rounds.push_back(rec);
        });
        r.min_prefix = min_prefix;
        if (regret_acc) r.regret = regret_acc->regret(experts);
        if (!benchmarks.empty())
            r.policy_regret =
                measured_policy_regret(mech, dist, T, seed, r.utility_sum, benchmarks);
        if (etc) {
            r.etc_explore_fraction =
                static_cast<double>(etc->exploration_rounds()) / static_cast<double>(T);
            if (etc->committed_bid())
                r.etc_committed_bid = static_cast<double>(*etc->committed_bid());
            r.etc_post_commit_bad_fraction = post_commit_rounds > 0
                ? static_cast<double>(post_commit_bad) /
                      static_cast<double>(post_commit_rounds)
                : 0.0;
        }
        if (tracing) write_trace_csv(config.trace_path, trace_traj, mech);
        results[rep] = r;
    };

    int threads = std::max(1, config.threads);
    if (threads == 1 || reps == 1) {
        for (std::size_t rep = 0; rep < reps; ++rep) run_rep(rep);
    } else {
        std::exception_ptr failure;
        std::mutex failure_mutex;
        std::vector<std::thread> pool;
        auto worker = [&](std::size_t start) {
            try {
                for (std::size_t rep = start; rep < reps;
                     rep += static_cast<std::size_t>(threads))
                    run_rep(rep);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        };
        pool.reserve(static_cast<std::size_t>(threads));
        for (int i = 0; i < threads; ++i)
            pool.emplace_back(worker, static_cast<std::size_t>(i));
        for (auto& th : pool) th.join();
        if (failure) std::rethrow_exception(failure);
    }

    RevenueReport report;
    report.mechanism = config.mechanism_kind;
    report.agent = config.agent.kind;
    report.epsilon = config.epsilon.to_double();
    report.rho = config.rho.to_double();
    report.price = static_cast<double>(mech.params().price) * tick;
    report.T = T;
    report.B = static_cast<double>(dist.support_max()) * tick;
    report.replications = config.replications;
    report.master_seed = config.master_seed;

    std::vector<double> rev, util, bad, neg, minp, tot;
    rev.reserve(reps);
    for (const auto& r : results) {
        rev.push_back(r.payment_sum * tick / static_cast<double>(T));
        util.push_back(r.utility_sum * tick / static_cast<double>(T));
        bad.push_back(static_cast<double>(r.bad_rounds) / static_cast<double>(T));
        neg.push_back(static_cast<double>(r.negative_rounds));
        minp.push_back(r.min_prefix * tick);
        tot.push_back(r.utility_sum * tick);
        report.max_negative_utility_rounds =
            std::max(report.max_negative_utility_rounds, r.negative_rounds);
    }
    report.mean_revenue = mean_of(rev);
    if (reps > 1) {
        double acc = 0.0;
        for (double x : rev) acc += (x - report.mean_revenue) * (x - report.mean_revenue);
        report.stderr_revenue =
            std::sqrt(acc / static_cast<double>(reps - 1) / static_cast<double>(reps));
    }
    report.mean_buyer_utility = mean_of(util);
    report.bad_state_fraction = mean_of(bad);
    report.mean_negative_utility_rounds = mean_of(neg);
    report.mean_min_prefix_utility = mean_of(minp);
    report.mean_total_utility = mean_of(tot);

    if (results.front().regret) {
        std::vector<double> xs;
        for (const auto& r : results) xs.push_back(*r.regret * tick / static_cast<double>(T));
        report.regret_per_round = mean_of(xs);
    }
    if (results.front().policy_regret) {
        std::vector<double> xs;
        for (const auto& r : results)
            xs.push_back(*r.policy_regret * tick / static_cast<double>(T));
        report.policy_regret_per_round = mean_of(xs);
    }
    if (results.front().etc_explore_fraction) {
        std::vector<double> ef, pb, cb;
        for (const auto& r : results) {
            ef.push_back(*r.etc_explore_fraction);
            pb.push_back(r.etc_post_commit_bad_fraction.value_or(0.0));
            cb.push_back(r.etc_committed_bid.value_or(0.0) * tick);
        }
        report.etc_explore_fraction = mean_of(ef);
        report.etc_post_commit_bad_fraction = mean_of(pb);
        report.etc_committed_bid = mean_of(cb);
    }

    const auto& p = mech.params();
    report.regime_notes.push_back(
        p.in_lookahead_regime()
            ? "rho <= eps/(2-eps): k-lookahead guarantee regime"
            : "rho > eps/(2-eps): k-lookahead guarantee not claimed");
    report.regime_notes.push_back(p.in_policy_regret_regime()
                                      ? "rho <= eps: policy-regret regime"
                                      : "rho > eps: policy-regret guarantee not claimed");
    return report;
}

void write_trace_csv(const std::string& path, const Trajectory& traj,
                     const Mechanism& mech) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open trace file: " + path);
    out.precision(12);
    const bool credit = mech.kind() == MechanismKind::Credit;
    // Money columns are in decimal ticks; avg_bid holds the state statistic
    // (ledger average, or TP - EP margin for the credit ledger).
    out << "round,state,avg_bid,value,bid,alloc,payment,utility\n";
    const Rational threshold = mech.threshold();
    for (const auto& rec : traj.rounds) {
        double avg_stat;
        if (credit) {
            avg_stat = rec.ledger_a - rec.ledger_b;
        } else {
            avg_stat = rec.ledger_b > 0 ? rec.ledger_a / rec.ledger_b
                                        : threshold.to_double();
        }
        out << rec.round << ',' << (rec.good ? 'G' : 'B') << ',' << avg_stat << ','
            << rec.value << ',' << rec.bid << ',' << rec.allocated << ','
            << rec.payment << ',' << rec.utility << '\n';
    }
}

}  // namespace ralab
