#include "hcprisk/monte_carlo.hpp"

#include "hcprisk/errors.hpp"
#include "hcprisk/individual_risk.hpp"
#include "hcprisk/kernels/kernels.hpp"
#include "hcprisk/kernels/philox.hpp"

#include <cmath>
#include <limits>

namespace hcprisk {
namespace {

void check_config(const SimulationConfig& config) {
    if (config.trials < 1) throw DomainError("simulation needs at least one trial");
    if (config.rng != "philox4x32-10") {
        throw DomainError("unsupported rng '" + config.rng +
                          "'; only philox4x32-10 is implemented");
    }
}

SimulationResult finish(std::uint64_t successes, std::uint64_t trials) {
    SimulationResult result;
    result.successes = successes;
    result.trials = trials;
    result.empirical_risk =
        static_cast<double>(successes) / static_cast<double>(trials);
    result.standard_error =
        std::sqrt(result.empirical_risk * (1.0 - result.empirical_risk) /
                  static_cast<double>(trials));
    return result;
}

}  // namespace

SimulationResult simulate_first_success(std::span<const double> probs,
                                        const SimulationConfig& config) {
    check_config(config);
    std::vector<std::uint32_t> thresholds;
    std::vector<std::uint8_t> always;
    thresholds.reserve(probs.size());
    always.reserve(probs.size());
    for (double p : probs) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw DomainError("contact probability outside [0,1]");
        }
        // Success iff draw < floor(p * 2^32 + 1/2); p = 1 always hits.
        const std::uint64_t wide =
            static_cast<std::uint64_t>(p * 4294967296.0 + 0.5);
        always.push_back(wide >= (std::uint64_t{1} << 32) ? 1 : 0);
        thresholds.push_back(static_cast<std::uint32_t>(
            wide >= (std::uint64_t{1} << 32) ? 0xFFFFFFFFu : wide));
    }
    const std::uint64_t successes =
        kernels::active_kernels().first_success_trials(
            thresholds.data(), always.data(), probs.size(), 0, config.trials,
            config.seed, config.stream);
    return finish(successes, config.trials);
}

SimulationResult simulate_hazard(
    const std::vector<std::vector<HazardSegment>>& contacts, double t1,
    double t2, const SimulationConfig& config) {
    check_config(config);
    if (t1 > t2) throw DomainError("hazard window with t1 > t2");

    std::vector<HazardSegment> timeline;
    for (const auto& contact : contacts) {
        for (const HazardSegment& seg : contact) {
            if (!(seg.rate_per_min >= 0.0)) {
                throw DomainError("negative hazard rate");
            }
            if (!(seg.length_min >= 0.0)) {
                throw DomainError("negative hazard segment length");
            }
            timeline.push_back(seg);
        }
    }

    // Segment start times and cumulative hazard up to each segment.
    std::vector<double> seg_start(timeline.size());
    std::vector<double> hazard_before(timeline.size());
    double clock = 0.0;
    double hazard = 0.0;
    for (std::size_t i = 0; i < timeline.size(); ++i) {
        seg_start[i] = clock;
        hazard_before[i] = hazard;
        clock += timeline[i].length_min;
        hazard += timeline[i].rate_per_min * timeline[i].length_min;
    }
    const double total_hazard = hazard;

    std::uint64_t successes = 0;
    for (std::uint64_t t = 0; t < config.trials; ++t) {
        const double u = kernels::to_unit_open(
            kernels::philox4x32(config.seed, t, config.stream, 0).x[0]);
        const double exponential = -std::log1p(-u);
        if (exponential > total_hazard) continue;  // never infected

        // Invert the piecewise-linear cumulative hazard.
        double infection_time = clock;
        for (std::size_t i = 0; i < timeline.size(); ++i) {
            const double seg_mass =
                timeline[i].rate_per_min * timeline[i].length_min;
            if (exponential <= hazard_before[i] + seg_mass) {
                infection_time =
                    timeline[i].rate_per_min > 0.0
                        ? seg_start[i] + (exponential - hazard_before[i]) /
                                             timeline[i].rate_per_min
                        : seg_start[i];
                break;
            }
        }
        if (infection_time >= t1 && infection_time <= t2) ++successes;
    }
    return finish(successes, config.trials);
}

double ValidationScenario::analytic() const {
    if (const auto* binomial = std::get_if<BinomialScenario>(&setup)) {
        return first_success_risk(binomial->probs);
    }
    const auto& hazard = std::get<HazardScenario>(setup);
    return hazard_risk(hazard.contacts, hazard.t1, hazard.t2);
}

SimulationResult ValidationScenario::simulate(
    const SimulationConfig& config) const {
    if (const auto* binomial = std::get_if<BinomialScenario>(&setup)) {
        return simulate_first_success(binomial->probs, config);
    }
    const auto& hazard = std::get<HazardScenario>(setup);
    return simulate_hazard(hazard.contacts, hazard.t1, hazard.t2, config);
}

std::vector<ValidationScenario> bundled_validation_scenarios() {
    std::vector<ValidationScenario> scenarios;
    auto binomial = [&](std::string name, std::vector<double> probs) {
        scenarios.push_back(
            {std::move(name), BinomialScenario{std::move(probs)}});
    };
    binomial("binomial_low_med_med", {0.01, 0.05, 0.05});
    binomial("binomial_single", {0.3});
    binomial("binomial_five_at_0.05", std::vector<double>(5, 0.05));
    binomial("binomial_ten_at_0.1", std::vector<double>(10, 0.1));
    binomial("binomial_mixed", {0.9, 0.01, 0.5});
    binomial("binomial_twenty_small", std::vector<double>(20, 0.001));

    auto hazard = [&](std::string name,
                      std::vector<std::vector<HazardSegment>> contacts,
                      double t1, double t2) {
        scenarios.push_back(
            {std::move(name), HazardScenario{std::move(contacts), t1, t2}});
    };
    hazard("hazard_single_hour", {{{0.01, 60.0}}}, 0.0, 60.0);
    hazard("hazard_two_contacts", {{{0.004, 30.0}}, {{0.02, 15.0}}}, 0.0, 45.0);
    hazard("hazard_clipped_window", {{{0.01, 60.0}}, {{0.03, 20.0}}}, 30.0, 70.0);
    hazard("hazard_with_gap",
           {{{0.008, 45.0}}, {{0.0, 30.0}}, {{0.015, 25.0}}}, 0.0, 100.0);
    return scenarios;
}

ScenarioOutcome run_validation_scenario(const ValidationScenario& scenario,
                                        std::uint64_t trials,
                                        std::uint64_t seed) {
    ScenarioOutcome outcome;
    outcome.name = scenario.name;
    outcome.analytic = scenario.analytic();
    outcome.first_seed = seed;

    auto z_score = [&](const SimulationResult& sim) {
        const double p = outcome.analytic;
        if (p <= 0.0 || p >= 1.0) {
            // Degenerate scenarios must match exactly.
            return sim.empirical_risk == p ? 0.0
                                           : std::numeric_limits<double>::infinity();
        }
        const double se =
            std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
        return (sim.empirical_risk - p) / se;
    };

    SimulationConfig config;
    config.trials = trials;
    config.seed = seed;
    SimulationResult sim = scenario.simulate(config);
    outcome.empirical = sim.empirical_risk;
    outcome.z = z_score(sim);
    outcome.final_seed = seed;
    if (std::abs(outcome.z) <= 3.0) {
        outcome.passed = true;
        return outcome;
    }

    // One retry with the next seed at a widened 4-sigma budget.
    config.seed = seed + 1;
    sim = scenario.simulate(config);
    outcome.retried = true;
    outcome.final_seed = config.seed;
    outcome.empirical = sim.empirical_risk;
    outcome.z = z_score(sim);
    outcome.passed = std::abs(outcome.z) <= 4.0;
    return outcome;
}

}  // namespace hcprisk
