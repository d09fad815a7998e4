#pragma once

#include "hcprisk/contacts.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace hcprisk {

// All simulation randomness comes from the Philox4x32-10 counter-based
// generator, addressed per trial, so results are reproducible bit for bit
// for a given seed regardless of how trials are partitioned.
struct SimulationConfig {
    std::uint64_t trials = 1'000'000;
    std::uint64_t seed = 0;
    std::uint32_t stream = 0;
    std::string rng = "philox4x32-10";  // the only supported generator
};

struct SimulationResult {
    double empirical_risk = 0.0;
    double standard_error = 0.0;  // sqrt(r (1 - r) / trials)
    std::uint64_t successes = 0;
    std::uint64_t trials = 0;
};

// Draws each contact Bernoulli(p_m) per trial and counts trials where any
// contact transmits.
SimulationResult simulate_first_success(std::span<const double> probs,
                                        const SimulationConfig& config);

// Samples the infection time by inverse CDF on the cumulative hazard of the
// concatenated contact timeline and counts T in [t1, t2].
SimulationResult simulate_hazard(
    const std::vector<std::vector<HazardSegment>>& contacts, double t1,
    double t2, const SimulationConfig& config);

// Bundled validation scenarios pairing an analytic risk with its simulator.
struct BinomialScenario {
    std::vector<double> probs;
};

struct HazardScenario {
    std::vector<std::vector<HazardSegment>> contacts;
    double t1 = 0.0;
    double t2 = 0.0;
};

struct ValidationScenario {
    std::string name;
    std::variant<BinomialScenario, HazardScenario> setup;

    double analytic() const;
    SimulationResult simulate(const SimulationConfig& config) const;
};

std::vector<ValidationScenario> bundled_validation_scenarios();

// One pass/fail line of the validation table. A scenario whose empirical
// frequency falls outside 3 standard errors is retried once with the next
// seed and passes if the retry lands within 4; both seeds are recorded.
struct ScenarioOutcome {
    std::string name;
    double analytic = 0.0;
    double empirical = 0.0;
    double z = 0.0;
    std::uint64_t first_seed = 0;
    std::uint64_t final_seed = 0;
    bool retried = false;
    bool passed = false;
};

ScenarioOutcome run_validation_scenario(const ValidationScenario& scenario,
                                        std::uint64_t trials,
                                        std::uint64_t seed);

}  // namespace hcprisk
