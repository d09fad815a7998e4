#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hcprisk/monte_carlo.hpp"

#include "hcprisk/errors.hpp"
#include "hcprisk/individual_risk.hpp"
#include "support/oracles.hpp"

#include <cmath>
#include <vector>

using namespace hcprisk;

namespace {

SimulationConfig fast_config(std::uint64_t seed, std::uint64_t trials = 100'000) {
    SimulationConfig config;
    config.trials = trials;
    config.seed = seed;
    return config;
}

}  // namespace

TEST_CASE("certain transmission is certain") {
    const std::vector<double> probs = {1.0};
    const SimulationResult result =
        simulate_first_success(probs, fast_config(1, 5'000));
    CHECK(result.empirical_risk == 1.0);
    CHECK(result.successes == 5'000);
}

TEST_CASE("impossible transmission never fires") {
    const std::vector<double> probs = {0.0, 0.0};
    const SimulationResult result =
        simulate_first_success(probs, fast_config(2, 5'000));
    CHECK(result.empirical_risk == 0.0);
}

TEST_CASE("no contacts, no risk") {
    const SimulationResult result =
        simulate_first_success({}, fast_config(3, 1'000));
    CHECK(result.empirical_risk == 0.0);
}

TEST_CASE("binomial simulation tracks the analytic value within 3 sigma") {
    const std::vector<double> probs = {0.01, 0.05, 0.05};
    const double analytic = first_success_risk(probs);
    const SimulationResult result =
        simulate_first_success(probs, fast_config(4));
    const double se = std::sqrt(analytic * (1.0 - analytic) /
                                static_cast<double>(result.trials));
    CHECK(std::abs(result.empirical_risk - analytic) <= 3.0 * se);
}

TEST_CASE("same seed, same result; different seed, different stream") {
    const std::vector<double> probs = {0.2, 0.4, 0.1};
    const SimulationResult a = simulate_first_success(probs, fast_config(9));
    const SimulationResult b = simulate_first_success(probs, fast_config(9));
    CHECK(a.successes == b.successes);
    CHECK(a.empirical_risk == b.empirical_risk);
    const SimulationResult c = simulate_first_success(probs, fast_config(10));
    CHECK(a.successes != c.successes);
}

TEST_CASE("invalid inputs are rejected") {
    CHECK_THROWS_AS(
        simulate_first_success(std::vector<double>{1.0001}, fast_config(1)),
        DomainError);
    SimulationConfig zero_trials;
    zero_trials.trials = 0;
    CHECK_THROWS_AS(simulate_first_success(std::vector<double>{0.5}, zero_trials),
                    DomainError);
    SimulationConfig wrong_rng;
    wrong_rng.rng = "mt19937";
    CHECK_THROWS_AS(simulate_first_success(std::vector<double>{0.5}, wrong_rng),
                    DomainError);
}

TEST_CASE("standard error agrees with a batch-split estimate") {
    const std::vector<double> probs = {0.1, 0.2};
    const std::uint64_t batch = 20'000;
    std::vector<double> batch_means;
    for (std::uint64_t b = 0; b < 10; ++b) {
        SimulationConfig config = fast_config(100 + b, batch);
        batch_means.push_back(
            simulate_first_success(probs, config).empirical_risk);
    }
    const SimulationResult pooled =
        simulate_first_success(probs, fast_config(100, 10 * batch));
    const double batch_se_scaled =
        oracles::batch_split_se(batch_means);  // SE of the pooled mean
    // The closed-form SE and the empirical one agree to ~35% at this size.
    CHECK(batch_se_scaled == doctest::Approx(pooled.standard_error).epsilon(0.35));
}

TEST_CASE("zero hazard never infects") {
    const std::vector<std::vector<HazardSegment>> contacts = {{{0.0, 100.0}}};
    const SimulationResult result =
        simulate_hazard(contacts, 0.0, 100.0, fast_config(5, 2'000));
    CHECK(result.empirical_risk == 0.0);
}

TEST_CASE("zero-length window catches nothing") {
    const std::vector<std::vector<HazardSegment>> contacts = {{{0.01, 60.0}}};
    const SimulationResult result =
        simulate_hazard(contacts, 30.0, 30.0, fast_config(6, 20'000));
    CHECK(result.empirical_risk == 0.0);
}

TEST_CASE("hazard simulation tracks the closed-form survival difference") {
    const std::vector<std::vector<HazardSegment>> contacts = {{{0.01, 60.0}}};
    const double analytic = 1.0 - std::exp(-0.6);
    const SimulationResult result =
        simulate_hazard(contacts, 0.0, 60.0, fast_config(7));
    const double se = std::sqrt(analytic * (1.0 - analytic) /
                                static_cast<double>(result.trials));
    CHECK(std::abs(result.empirical_risk - analytic) <= 3.0 * se);
    CHECK(std::abs(analytic - 0.4512) < 5e-5);
}

TEST_CASE("hazard simulation honours interior windows") {
    // Infection must land inside [t1, t2]; mass before t1 is excluded.
    const std::vector<std::vector<HazardSegment>> contacts = {
        {{0.02, 30.0}}, {{0.005, 40.0}}};
    const double analytic = hazard_risk(contacts, 30.0, 70.0);
    const SimulationResult result =
        simulate_hazard(contacts, 30.0, 70.0, fast_config(8));
    const double se = std::sqrt(analytic * (1.0 - analytic) /
                                static_cast<double>(result.trials));
    CHECK(std::abs(result.empirical_risk - analytic) <= 3.0 * se);
}

TEST_CASE("bundled validation scenarios pass at the fast tier") {
    const std::vector<ValidationScenario> scenarios =
        bundled_validation_scenarios();
    CHECK(scenarios.size() == 10);
    for (const ValidationScenario& scenario : scenarios) {
        const ScenarioOutcome outcome =
            run_validation_scenario(scenario, 100'000, 20'260'108);
        INFO(scenario.name, " z=", outcome.z);
        CHECK(outcome.passed);
    }
}

TEST_CASE("scenario analytic values are sane") {
    for (const ValidationScenario& scenario : bundled_validation_scenarios()) {
        const double analytic = scenario.analytic();
        CHECK(analytic >= 0.0);
        CHECK(analytic <= 1.0);
    }
}
