#include "ralab/valuation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ralab {

namespace {

constexpr std::int64_t kWeightScale = 1'000'000'000'000LL;  // 1e12

// Round real-valued masses to integer weights summing to exactly
// kWeightScale; the largest atom absorbs the rounding residue.
std::vector<std::int64_t> quantize(const std::vector<double>& masses) {
    std::vector<std::int64_t> w(masses.size(), 0);
    std::int64_t total = 0;
    std::size_t largest = 0;
    for (std::size_t i = 0; i < masses.size(); ++i) {
        if (masses[i] < 0)
            throw std::invalid_argument("distribution mass must be nonnegative");
        w[i] = std::llround(masses[i] * static_cast<double>(kWeightScale));
        total += w[i];
        if (masses[i] > masses[largest]) largest = i;
    }
    std::int64_t residue = kWeightScale - total;
    if (std::llabs(residue) > kWeightScale / 1000)
        throw std::invalid_argument("distribution masses do not sum to 1");
    if (w[largest] + residue < 0)
        throw std::invalid_argument("distribution masses do not sum to 1");
    w[largest] += residue;
    return w;
}

}  // namespace

Money MoneyGrid::to_ticks(double value) const {
    double scaled = value / tick;
    auto m = static_cast<Money>(std::llround(scaled));
    if (std::abs(scaled - static_cast<double>(m)) > 1e-6 * std::max(1.0, std::abs(scaled)))
        throw std::invalid_argument("value " + std::to_string(value) +
                                    " is not a multiple of tick " + std::to_string(tick));
    return m;
}

ValuationDistribution::ValuationDistribution(MoneyGrid grid,
                                             std::vector<std::int64_t> weights)
    : grid_(grid), weights_(std::move(weights)) {
    if (grid_.tick <= 0) throw std::invalid_argument("grid tick must be > 0");
    if (grid_.max_ticks < 1) throw std::invalid_argument("grid must have max_value >= tick");
    if (weights_.size() != static_cast<std::size_t>(grid_.point_count()))
        throw std::invalid_argument("weight vector does not match grid size");
    cumulative_.resize(weights_.size());
    total_ = 0;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        if (weights_[i] < 0) throw std::invalid_argument("negative probability weight");
        total_ += weights_[i];
        cumulative_[i] = total_;
    }
    if (total_ <= 0) throw std::invalid_argument("distribution has zero total mass");
}

Rational ValuationDistribution::pmf(Money m) const {
    if (m < 0 || m > grid_.max_ticks) return Rational(0);
    return Rational(weights_[static_cast<std::size_t>(m)], total_);
}

Rational ValuationDistribution::mean_ticks() const {
    __int128 acc = 0;
    for (std::size_t i = 0; i < weights_.size(); ++i)
        acc += static_cast<__int128>(i) * weights_[i];
    // acc <= max_ticks * total, checked to fit int64 by construction scale
    if (acc > INT64_MAX) throw std::overflow_error("mean accumulator overflow");
    return Rational(static_cast<std::int64_t>(acc), total_);
}

Rational ValuationDistribution::tail(Money p) const {
    if (p <= 0) return Rational(1);
    if (p > grid_.max_ticks) return Rational(0);
    std::int64_t below = cumulative_[static_cast<std::size_t>(p - 1)];
    return Rational(total_ - below, total_);
}

Money ValuationDistribution::sample(Rng& rng) const {
    auto r = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(total_)));
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), r);
    return static_cast<Money>(it - cumulative_.begin());
}

MyersonStats myerson(const ValuationDistribution& dist) {
    MyersonStats best;
    best.price = 0;
    best.revenue = Rational(0);
    best.tail_at_price = Rational(1);
    for (Money p = 0; p <= dist.grid().max_ticks; ++p) {
        Rational t = dist.tail(p);
        Rational rev = Rational(p) * t;
        if (rev > best.revenue) {
            best.price = p;
            best.revenue = rev;
            best.tail_at_price = t;
        }
    }
    return best;
}

ValuationDistribution make_distribution(const DistributionSpec& spec) {
    MoneyGrid grid;
    grid.tick = spec.tick;
    if (grid.tick <= 0) throw std::invalid_argument("distribution.tick must be > 0");
    grid.max_ticks = [&] {
        MoneyGrid probe{spec.tick, 1};
        return probe.to_ticks(spec.B);
    }();
    if (grid.max_ticks < 1)
        throw std::invalid_argument("distribution.B must be at least one tick");
    auto n = static_cast<std::size_t>(grid.point_count());

    if (spec.kind == "uniform") {
        std::vector<std::int64_t> w(n, 1);
        return {grid, std::move(w)};
    }
    if (spec.kind == "point") {
        Money at = grid.to_ticks(spec.value);
        if (at < 0 || at > grid.max_ticks)
            throw std::invalid_argument("point mass outside [0, B]");
        std::vector<std::int64_t> w(n, 0);
        w[static_cast<std::size_t>(at)] = 1;
        return {grid, std::move(w)};
    }
    if (spec.kind == "explicit") {
        if (spec.values.size() != spec.probs.size() || spec.values.empty())
            throw std::invalid_argument("explicit distribution needs matching values/probs");
        double sum = std::accumulate(spec.probs.begin(), spec.probs.end(), 0.0);
        if (std::abs(sum - 1.0) > 1e-9)
            throw std::invalid_argument("explicit probs sum to " + std::to_string(sum) +
                                        ", expected 1");
        std::vector<double> masses(n, 0.0);
        for (std::size_t i = 0; i < spec.values.size(); ++i) {
            Money at = grid.to_ticks(spec.values[i]);
            if (at < 0 || at > grid.max_ticks)
                throw std::invalid_argument("explicit value outside [0, B]");
            masses[static_cast<std::size_t>(at)] += spec.probs[i];
        }
        return {grid, quantize(masses)};
    }
    if (spec.kind == "exponential") {
        // Truncated exponential on [0, B]: mass of [v_i, v_{i+1}) per atom,
        // remainder of the cell containing B folded into the last atom.
        if (spec.rate <= 0) throw std::invalid_argument("exponential.rate must be > 0");
        double B = grid.to_value(grid.max_ticks);
        double z = 1.0 - std::exp(-spec.rate * B);
        std::vector<double> masses(n, 0.0);
        // Atom i carries the cell [v_i, v_{i+1}); the cells tile [0, B).
        for (std::size_t i = 0; i + 1 < n; ++i) {
            double lo = grid.to_value(static_cast<Money>(i));
            double hi = grid.to_value(static_cast<Money>(i + 1));
            masses[i] = (std::exp(-spec.rate * lo) - std::exp(-spec.rate * hi)) / z;
        }
        return {grid, quantize(masses)};
    }
    if (spec.kind == "equal_revenue") {
        // Support [1, H]: density 1/v^2 plus an atom of 1/H at H, so that
        // p * P(V >= p) = 1 on the whole support.
        double H = spec.H > 0 ? spec.H : spec.B;
        Money one = grid.to_ticks(1.0);
        Money top = grid.to_ticks(H);
        if (top > grid.max_ticks)
            throw std::invalid_argument("equal_revenue H exceeds B");
        if (one >= top)
            throw std::invalid_argument("equal_revenue needs H > 1 on the grid");
        std::vector<double> masses(n, 0.0);
        for (Money m = one; m < top; ++m) {
            double lo = grid.to_value(m);
            double hi = grid.to_value(m + 1);
            masses[static_cast<std::size_t>(m)] = 1.0 / lo - 1.0 / hi;
        }
        masses[static_cast<std::size_t>(top)] = 1.0 / H;
        return {grid, quantize(masses)};
    }
    throw std::invalid_argument("unknown distribution kind: " + spec.kind);
}

}  // namespace ralab
