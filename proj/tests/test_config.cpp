#include <doctest.h>

#include "ralab/config.hpp"

using namespace ralab;

namespace {

const char* kMinimal = R"({
  "mechanism": {"kind": "avg_price", "epsilon": 0.5, "rho": "1/3"},
  "distribution": {"kind": "uniform", "B": 1.0, "tick": 0.01},
  "agent": {"kind": "myopic"},
  "T": 1000
})";

}  // namespace

TEST_CASE("minimal config parses with documented defaults") {
    auto cfg = parse_config(kMinimal);
    CHECK(cfg.replications == 100);
    CHECK(cfg.trace_path.empty());
    CHECK(cfg.seed_from_entropy);
    CHECK(cfg.epsilon == Rational(1, 2));
    CHECK(cfg.rho == Rational(1, 3));
    CHECK(cfg.T == 1000);
    CHECK(!cfg.price.has_value());
}

TEST_CASE("range violations name the offending field") {
    std::string bad = R"({
      "mechanism": {"kind": "avg_price", "epsilon": 1.2, "rho": 0.3},
      "distribution": {"kind": "uniform"},
      "agent": {"kind": "myopic"}
    })";
    CHECK_THROWS_WITH_AS(parse_config(bad),
                         "mechanism.epsilon: must be in (0,1)", ConfigError);
}

TEST_CASE("unknown keys are rejected with their path") {
    std::string bad = R"({
      "mechanism": {"kind": "avg_price", "epsilon": 0.5, "rho": 0.3, "pirce": 0.5},
      "distribution": {"kind": "uniform"},
      "agent": {"kind": "myopic"}
    })";
    CHECK_THROWS_WITH_AS(parse_config(bad), "mechanism.pirce: unknown key",
                         ConfigError);
    std::string bad2 = R"({
      "mechanism": {"kind": "avg_price"},
      "distribution": {"kind": "uniform"},
      "agent": {"kind": "myopic"},
      "regret": true
    })";
    CHECK_THROWS_WITH_AS(parse_config(bad2), "config.regret: unknown key",
                         ConfigError);
}

TEST_CASE("rho above the lookahead regime parses but is flagged") {
    std::string text = R"({
      "mechanism": {"kind": "avg_price", "epsilon": 0.5, "rho": 0.4},
      "distribution": {"kind": "uniform", "B": 1.0, "tick": 0.01},
      "agent": {"kind": "myopic"},
      "T": 100, "replications": 2, "master_seed": 1
    })";
    auto cfg = parse_config(text);
    // eps/(2-eps) = 1/3 < 0.4
    auto dist = make_distribution(cfg.distribution);
    auto mech = make_mechanism(cfg, dist);
    CHECK(!mech.params().in_lookahead_regime());
    CHECK(mech.params().in_policy_regret_regime());
    auto report = run_experiment(cfg);
    bool found = false;
    for (const auto& note : report.regime_notes)
        if (note.find("not claimed") != std::string::npos) found = true;
    CHECK(found);
}

TEST_CASE("config round-trips through emit and parse") {
    auto cfg = parse_config(kMinimal);
    cfg.master_seed = 99;
    cfg.seed_from_entropy = false;
    cfg.price = 0.5;
    cfg.regret_expert_points = 11;
    auto text = emit_config(cfg);
    auto back = parse_config(text);
    CHECK(back.mechanism_kind == cfg.mechanism_kind);
    CHECK(back.epsilon == cfg.epsilon);
    CHECK(back.rho == cfg.rho);
    CHECK(back.T == cfg.T);
    CHECK(back.replications == cfg.replications);
    CHECK(back.master_seed == cfg.master_seed);
    CHECK(back.price == cfg.price);
    CHECK(back.regret_expert_points == cfg.regret_expert_points);
    CHECK(back.agent.kind == cfg.agent.kind);
    CHECK(back.distribution.kind == cfg.distribution.kind);
    CHECK(emit_config(back) == text);
}

TEST_CASE("rational fields accept fraction strings") {
    CHECK(parse_rational_field("1/3") == Rational(1, 3));
    CHECK(parse_rational_field("0.45") == Rational(9, 20));
    CHECK(parse_rational_field("2/6") == Rational(1, 3));
}

TEST_CASE("default price is the Myerson price") {
    auto cfg = parse_config(kMinimal);
    auto dist = make_distribution(cfg.distribution);
    auto mech = make_mechanism(cfg, dist);
    CHECK(mech.params().price == 50);
    cfg.price = 0.6;
    auto mech2 = make_mechanism(cfg, dist);
    CHECK(mech2.params().price == 60);
}
