#include "ralab/analysis.hpp"

#include <cmath>
#include <sstream>

#include "ralab/simulator.hpp"

namespace ralab {

std::vector<FrontierPoint> frontier_sweep(const std::vector<Rational>& eps_list,
                                          const ExperimentConfig& base_config) {
    std::vector<FrontierPoint> points;
    ValuationDistribution dist = make_distribution(base_config.distribution);
    MyersonStats stats = myerson(dist);
    double rev_mye = stats.revenue.to_double() * dist.grid().tick;
    double mu = dist.mean_value();

    for (const auto& eps : eps_list) {
        ExperimentConfig cfg = base_config;
        cfg.epsilon = eps;
        cfg.rho = eps / (Rational(2) - eps);

        cfg.agent.kind = "myopic";
        RevenueReport myopic = run_experiment(cfg);

        cfg.agent.kind = "stay_good";
        cfg.replications = 1;  // deterministic revenue path
        RevenueReport staygood = run_experiment(cfg);

        FrontierPoint pt;
        pt.epsilon = eps.to_double();
        pt.rho = cfg.rho.to_double();
        pt.alpha_hat = myopic.mean_revenue / rev_mye;
        pt.alpha_ci = 3.0 * myopic.stderr_revenue / rev_mye;
        pt.beta_hat = staygood.mean_revenue / mu;
        pt.beta_ci = 3.0 * staygood.stderr_revenue / mu;
        pt.alpha_theory = pt.epsilon / 2.0;
        pt.beta_theory = 1.0 - pt.epsilon;
        pt.impossibility_beta = 1.0 - pt.alpha_hat / 2.0;
        MechanismParams params;
        params.epsilon = eps;
        params.rho = cfg.rho;
        params.horizon = cfg.T;
        params.support_bound = dist.support_max();
        params.mean_ticks = dist.mean_ticks();
        pt.lookahead_regime = params.in_lookahead_regime();
        pt.policy_regret_regime = params.in_policy_regret_regime();
        points.push_back(pt);
    }
    return points;
}

std::string frontier_csv(const std::vector<FrontierPoint>& points) {
    std::ostringstream out;
    out.precision(10);
    out << "epsilon,rho,alpha_hat,alpha_ci,beta_hat,beta_ci,alpha_theory,"
           "beta_theory,impossibility_beta\n";
    for (const auto& p : points) {
        out << p.epsilon << ',' << p.rho << ',' << p.alpha_hat << ',' << p.alpha_ci
            << ',' << p.beta_hat << ',' << p.beta_ci << ',' << p.alpha_theory << ','
            << p.beta_theory << ',' << p.impossibility_beta << '\n';
    }
    return out.str();
}

std::vector<ExpostBoundRow> expost_bound_table(const std::vector<int>& k_list,
                                               double mu) {
    if (mu <= 0.0) throw std::invalid_argument("mu must be positive");
    std::vector<ExpostBoundRow> rows;
    for (int k : k_list) {
        if (k < 1) throw std::invalid_argument("k must be >= 1");
        ExpostBoundRow row;
        row.k = k;
        row.mu = mu;
        double kmu = static_cast<double>(k) * mu;
        row.bound = std::log(kmu) + 1.0;
        row.vacuous = kmu < 1.0;
        rows.push_back(row);
    }
    return rows;
}

std::vector<ExpostBoundRow> expost_bound_table(const std::vector<int>& k_list,
                                               const ValuationDistribution& dist) {
    return expost_bound_table(k_list, dist.mean_value());
}

std::string expost_bound_csv(const std::vector<ExpostBoundRow>& rows) {
    std::ostringstream out;
    out.precision(12);
    out << "k,bound,mu,vacuous\n";
    for (const auto& r : rows)
        out << r.k << ',' << r.bound << ',' << r.mu << ',' << (r.vacuous ? 1 : 0)
            << '\n';
    return out.str();
}

}  // namespace ralab
