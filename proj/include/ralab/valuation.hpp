#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ralab/rational.hpp"
#include "ralab/rng.hpp"

namespace ralab {

// All money is an integer count of grid ticks. Conversion to real
// currency happens only at I/O boundaries (config parsing, reports).
using Money = std::int64_t;

// Discretized money axis: points k * tick for k in [0, max_ticks].
struct MoneyGrid {
    double tick = 0.01;     // spacing in currency units, > 0
    Money max_ticks = 100;  // support bound B in ticks

    double to_value(Money m) const { return static_cast<double>(m) * tick; }
    Money point_count() const { return max_ticks + 1; }

    // Currency value -> tick count; rejects off-grid values.
    Money to_ticks(double value) const;
    bool operator==(const MoneyGrid&) const = default;
};

// Discrete distribution on a MoneyGrid. Probabilities are integer
// weights over a common total, so mean and tails are exact rationals.
class ValuationDistribution {
public:
    ValuationDistribution(MoneyGrid grid, std::vector<std::int64_t> weights);

    const MoneyGrid& grid() const { return grid_; }
    const std::vector<std::int64_t>& weights() const { return weights_; }
    std::int64_t total_weight() const { return total_; }

    // P(V = m) for m in ticks.
    Rational pmf(Money m) const;
    // Exact mean in ticks.
    Rational mean_ticks() const;
    double mean_value() const { return mean_ticks().to_double() * grid_.tick; }
    // P(V >= p), closed tail matching the allocation condition b >= p.
    Rational tail(Money p) const;

    Money sample(Rng& rng) const;

    Money support_max() const { return grid_.max_ticks; }

private:
    MoneyGrid grid_;
    std::vector<std::int64_t> weights_;  // index = tick count
    std::vector<std::int64_t> cumulative_;
    std::int64_t total_ = 0;
};

struct MyersonStats {
    Money price = 0;          // p*, on the grid
    Rational revenue;         // p* . P(V >= p*), in ticks
    Rational tail_at_price;   // P(V >= p*)
};

// argmax over grid prices of p * P(V >= p); ties go to the lowest price.
MyersonStats myerson(const ValuationDistribution& dist);

// Config-facing distribution description.
struct DistributionSpec {
    std::string kind;  // uniform | exponential | equal_revenue | point | explicit
    double B = 1.0;
    double tick = 0.01;
    double value = 0.0;              // point
    double rate = 1.0;               // exponential
    double H = 0.0;                  // equal_revenue upper end (defaults to B)
    std::vector<double> values;      // explicit
    std::vector<double> probs;       // explicit
};

ValuationDistribution make_distribution(const DistributionSpec& spec);

}  // namespace ralab
