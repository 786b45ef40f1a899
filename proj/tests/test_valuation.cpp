#include <cmath>
#include <doctest.h>

#include "ralab/rng.hpp"
#include "ralab/valuation.hpp"

using namespace ralab;

namespace {

ValuationDistribution uniform101() {
    DistributionSpec spec;
    spec.kind = "uniform";
    spec.B = 1.0;
    spec.tick = 0.01;
    return make_distribution(spec);
}

}  // namespace

TEST_CASE("uniform grid: equal atoms, exact symmetric mean") {
    auto dist = uniform101();
    CHECK(dist.grid().max_ticks == 100);
    CHECK(dist.pmf(0) == Rational(1, 101));
    CHECK(dist.pmf(50) == Rational(1, 101));
    CHECK(dist.mean_ticks() == Rational(50));
    CHECK(dist.mean_value() == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("point mass") {
    DistributionSpec spec;
    spec.kind = "point";
    spec.B = 1.0;
    spec.tick = 0.01;
    spec.value = 0.3;
    auto dist = make_distribution(spec);
    CHECK(dist.pmf(30) == Rational(1));
    CHECK(dist.mean_ticks() == Rational(30));
    CHECK(dist.tail(50) == Rational(0));
    CHECK(dist.tail(30) == Rational(1));
    auto stats = myerson(dist);
    CHECK(stats.price == 30);
    CHECK(stats.revenue == Rational(30));
}

TEST_CASE("tail semantics: closed at the price") {
    auto dist = uniform101();
    CHECK(dist.tail(50) == Rational(51, 101));
    CHECK(dist.tail(0) == Rational(1));
    CHECK(dist.tail(-5) == Rational(1));
    CHECK(dist.tail(100) == Rational(1, 101));
    CHECK(dist.tail(101) == Rational(0));
}

TEST_CASE("myerson on the uniform grid, brute-force cross-check") {
    auto dist = uniform101();
    auto stats = myerson(dist);
    // Independent brute force over all grid prices.
    Rational best(0);
    Money best_price = 0;
    for (Money p = 0; p <= 100; ++p) {
        Rational rev = Rational(p) * dist.tail(p);
        if (rev > best) {
            best = rev;
            best_price = p;
        }
    }
    CHECK(stats.price == best_price);
    CHECK(stats.revenue == best);
    CHECK(stats.price == 50);
    CHECK(stats.revenue == Rational(50) * Rational(51, 101));
    // argmax property: no grid price beats the reported revenue
    for (Money p = 0; p <= 100; ++p) CHECK(stats.revenue >= Rational(p) * dist.tail(p));
}

TEST_CASE("equal-revenue distribution: mean approaches 1 + ln H") {
    DistributionSpec spec;
    spec.kind = "equal_revenue";
    spec.B = 2.719;  // one tick above e, keeps H on the grid
    spec.tick = 0.001;
    spec.H = 2.718;
    auto dist = make_distribution(spec);
    // Closed-form oracle: mu = 1 + ln H for the continuous law.
    double target = 1.0 + std::log(2.718);
    CHECK(dist.mean_value() == doctest::Approx(target).epsilon(2e-3));

    // p * P(v >= p) stays within a tick of 1 across the support.
    for (Money p = dist.grid().to_ticks(1.0); p <= dist.grid().to_ticks(2.718);
         p += 97) {
        double rev = static_cast<double>(p) * dist.tail(p).to_double() * 0.001;
        CHECK(rev == doctest::Approx(1.0).epsilon(3e-3));
    }
    auto stats = myerson(dist);
    CHECK(stats.revenue.to_double() * 0.001 == doctest::Approx(1.0).epsilon(3e-3));

    // Coarser ticks drift further from the continuous mean.
    DistributionSpec coarse = spec;
    coarse.tick = 0.01;
    coarse.B = 2.72;
    coarse.H = 2.72;
    auto cdist = make_distribution(coarse);
    double fine_err = std::abs(dist.mean_value() - target);
    double coarse_err = std::abs(cdist.mean_value() - (1.0 + std::log(2.72)));
    CHECK(fine_err < coarse_err);
}

TEST_CASE("explicit pmf validation") {
    DistributionSpec spec;
    spec.kind = "explicit";
    spec.B = 1.0;
    spec.tick = 0.25;
    spec.values = {0.25, 0.75};
    spec.probs = {0.5, 0.5};
    auto dist = make_distribution(spec);
    CHECK(dist.pmf(1) == Rational(1, 2));
    CHECK(dist.mean_ticks() == Rational(2));

    spec.probs = {0.5, 0.4};
    CHECK_THROWS_AS(make_distribution(spec), std::invalid_argument);
    spec.probs = {0.5, 0.5};
    spec.values = {0.26, 0.75};  // off grid
    CHECK_THROWS_AS(make_distribution(spec), std::invalid_argument);
}

TEST_CASE("off-grid support bound rejected") {
    DistributionSpec spec;
    spec.kind = "uniform";
    spec.B = 1.005;
    spec.tick = 0.01;
    CHECK_THROWS_AS(make_distribution(spec), std::invalid_argument);
}

TEST_CASE("sampling is reproducible and matches atom frequencies") {
    auto dist = uniform101();
    Rng a(42), b(42);
    for (int i = 0; i < 1000; ++i) CHECK(dist.sample(a) == dist.sample(b));

    // 1e6 draws: empirical mean within 3 sigma, atom frequencies within
    // 4 sqrt(p(1-p)/n).
    Rng rng(7);
    const int n = 1'000'000;
    std::vector<int> counts(101, 0);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        Money v = dist.sample(rng);
        ++counts[static_cast<std::size_t>(v)];
        sum += static_cast<double>(v) * 0.01;
    }
    double mean = sum / n;
    double sigma = std::sqrt(1.0 / 12.0) / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(mean - 0.5) < 3.0 * sigma);
    double p = 1.0 / 101.0;
    double band = 4.0 * std::sqrt(p * (1.0 - p) / n);
    for (int i = 0; i <= 100; ++i)
        CHECK(std::abs(static_cast<double>(counts[i]) / n - p) < band);
}

TEST_CASE("point mass sampling is constant") {
    DistributionSpec spec;
    spec.kind = "point";
    spec.B = 1.0;
    spec.tick = 0.01;
    spec.value = 0.3;
    auto dist = make_distribution(spec);
    Rng rng(1);
    for (int i = 0; i < 100; ++i) CHECK(dist.sample(rng) == 30);
}

TEST_CASE("weights sum exactly to the declared total") {
    DistributionSpec spec;
    spec.kind = "exponential";
    spec.B = 1.0;
    spec.tick = 0.01;
    spec.rate = 1.0;
    auto dist = make_distribution(spec);
    std::int64_t total = 0;
    for (auto w : dist.weights()) total += w;
    CHECK(total == dist.total_weight());
    CHECK(dist.tail(0) == Rational(1));
}
