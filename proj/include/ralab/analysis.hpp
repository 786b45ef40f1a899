#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ralab/config.hpp"
#include "ralab/valuation.hpp"

namespace ralab {

struct FrontierPoint {
    double epsilon = 0.0;
    double rho = 0.0;
    double alpha_hat = 0.0;  // achieved myopic revenue / Rev_Mye
    double alpha_ci = 0.0;   // 3 stderr, same normalization
    double beta_hat = 0.0;   // achieved lookahead revenue / mu
    double beta_ci = 0.0;
    double alpha_theory = 0.0;        // eps/2
    double beta_theory = 0.0;         // 1 - eps
    double impossibility_beta = 0.0;  // 1 - alpha_hat/2
    bool lookahead_regime = true;
    bool policy_regret_regime = true;
};

// For each epsilon: rho = eps/(2-eps), run the myopic and stay-good
// experiments on base_config, and emit achieved points with the
// theoretical curves and the impossibility boundary.
std::vector<FrontierPoint> frontier_sweep(const std::vector<Rational>& eps_list,
                                          const ExperimentConfig& base_config);

std::string frontier_csv(const std::vector<FrontierPoint>& points);

struct ExpostBoundRow {
    int k = 0;
    double bound = 0.0;  // ln(k mu) + 1
    double mu = 0.0;     // full surplus, for contrast
    bool vacuous = false;  // k mu < 1: the bound is below 1 here
};

// Natural-log revenue cap per lookahead depth for per-round ex-post IR
// mechanisms, against the full surplus mu.
std::vector<ExpostBoundRow> expost_bound_table(const std::vector<int>& k_list,
                                               double mu);
std::vector<ExpostBoundRow> expost_bound_table(const std::vector<int>& k_list,
                                               const ValuationDistribution& dist);

std::string expost_bound_csv(const std::vector<ExpostBoundRow>& rows);

}  // namespace ralab
