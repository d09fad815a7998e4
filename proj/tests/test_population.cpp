#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hcprisk/population.hpp"

#include "hcprisk/errors.hpp"
#include "hcprisk/io.hpp"
#include "support/test_rng.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

using namespace hcprisk;

TEST_CASE("logistic aggregate") {
    SUBCASE("zero linear form answers one half") {
        AggregationModel model;
        model.alpha = {0.0, 0.0};
        model.w = {0.0};
        model.bias = 0.0;
        const std::vector<double> risks = {0.3, 0.8};
        const std::vector<ControlFactor> factors = {{"ventilation", 0.5}};
        CHECK(logistic_aggregate(risks, factors, model) == 0.5);
    }
    SUBCASE("hand-evaluated linear form") {
        AggregationModel model;
        model.alpha = {1.0};
        model.w = {0.5};
        model.bias = -0.4;
        model.tau = 1.0;
        const std::vector<double> risks = {0.2};
        const std::vector<ControlFactor> factors = {{"ppe_training", 0.4}};
        // f = 0.2 + 0.2 - 0.4 = 0
        CHECK(logistic_aggregate(risks, factors, model) == 0.5);
    }
    SUBCASE("large tau flattens towards one half from above") {
        AggregationModel model;
        model.alpha = {1.0};
        model.w = {};
        model.bias = 0.3;
        const std::vector<double> risks = {0.4};  // f = 0.7 > 0
        double previous = 1.0;
        for (double tau : {1.0, 10.0, 100.0}) {
            model.tau = tau;
            const double value = logistic_aggregate(risks, {}, model);
            CHECK(value > 0.5);
            CHECK(value < previous);
            previous = value;
        }
    }
    SUBCASE("strictly increasing in a positively weighted risk") {
        testrng::Uniform rng(71);
        AggregationModel model;
        model.alpha = {0.9, 0.4};
        model.w = {};
        model.bias = -0.3;
        for (int round = 0; round < 100; ++round) {
            std::vector<double> risks = {rng.next(), rng.next()};
            const double base = logistic_aggregate(risks, {}, model);
            risks[0] = std::min(1.0, risks[0] + 0.1);
            CHECK(logistic_aggregate(risks, {}, model) > base);
        }
    }
    SUBCASE("dimension mismatches are schema errors") {
        AggregationModel model;
        model.alpha = {1.0};
        model.w = {1.0, 1.0};
        const std::vector<double> risks = {0.2};
        const std::vector<ControlFactor> factors = {{"only_one", 1.0}};
        CHECK_THROWS_AS(logistic_aggregate(risks, factors, model), ConfigError);
        model.w = {1.0};
        model.tau = 0.0;
        CHECK_THROWS_AS(logistic_aggregate(risks, factors, model), DomainError);
    }
}

TEST_CASE("mixture expectation") {
    SUBCASE("point mass") {
        FeatureMixture mix;
        mix.variable_name = "X";
        mix.bins = {{"only", 1.0, 0.007}};
        CHECK(mixture_expectation(mix) == 0.007);
    }
    SUBCASE("midpoint of two equal bins") {
        FeatureMixture mix;
        mix.variable_name = "X";
        mix.bins = {{"a", 0.5, 0.0}, {"b", 0.5, 0.01}};
        CHECK(mixture_expectation(mix) == doctest::Approx(0.005).epsilon(1e-15));
    }
    SUBCASE("published onset-to-hospitalisation distribution") {
        FeatureMixture mix;
        mix.variable_name = "SOH_time";
        const double kappa = 5.99e-3 * 0.99 / 3.05;
        mix.bins = {{"<0", 0.34, kappa * 1}, {"0-3", 0.21, kappa * 2},
                    {"4-5", 0.05, kappa * 3}, {"6-7", 0.02, kappa * 4},
                    {"8-9", 0.16, kappa * 5}, {">9", 0.21, kappa * 6}};
        // Probabilities total 0.99 as printed; renormalized expectation hits
        // the published value.
        CHECK(mixture_expectation(mix, true) ==
              doctest::Approx(5.99e-3).epsilon(1e-9));
    }
    SUBCASE("expectation lies between the extreme conditional risks") {
        testrng::Uniform rng(72);
        for (int round = 0; round < 100; ++round) {
            FeatureMixture mix;
            mix.variable_name = "X";
            const std::size_t bins = 1 + rng.index(6);
            std::vector<double> raw = rng.probabilities(bins, 0.05, 1.0);
            double total = 0.0;
            for (double r : raw) total += r;
            double lo = 1.0, hi = 0.0;
            for (std::size_t i = 0; i < bins; ++i) {
                const double risk = rng.next();
                mix.bins.push_back({"b" + std::to_string(i), raw[i] / total, risk});
                lo = std::min(lo, risk);
                hi = std::max(hi, risk);
            }
            const double e = mixture_expectation(mix, true);
            CHECK(e >= lo - 1e-12);
            CHECK(e <= hi + 1e-12);
        }
    }
    SUBCASE("linear in the conditional risks and order-invariant") {
        FeatureMixture mix;
        mix.variable_name = "X";
        mix.bins = {{"a", 0.25, 0.1}, {"b", 0.5, 0.4}, {"c", 0.25, 0.9}};
        const double base = mixture_expectation(mix);
        std::reverse(mix.bins.begin(), mix.bins.end());
        CHECK(mixture_expectation(mix) == doctest::Approx(base).epsilon(1e-15));

        for (MixtureBin& bin : mix.bins) bin.conditional_risk *= 0.5;
        CHECK(mixture_expectation(mix) ==
              doctest::Approx(base * 0.5).epsilon(1e-12));
    }
    SUBCASE("sum violations are rejected in both modes") {
        FeatureMixture mix;
        mix.variable_name = "CS";
        mix.bins = {{"severe", 0.01, 0.03},
                    {"ards", 0.01, 0.04},
                    {"asymptomatic", 0.08, 0.001}};
        CHECK_THROWS_WITH_AS(mixture_expectation(mix), doctest::Contains("CS"),
                             DomainError);
        CHECK_THROWS_AS(mixture_expectation(mix, true), DomainError);
    }
    SUBCASE("slightly short distributions pass within tolerance") {
        FeatureMixture mix;
        mix.variable_name = "X";
        mix.bins = {{"a", 0.49, 0.2}, {"b", 0.50, 0.2}};
        CHECK(mixture_expectation(mix, true) ==
              doctest::Approx(0.2).epsilon(1e-12));
        CHECK(mixture_expectation(mix, false) ==
              doctest::Approx(0.2 * 0.99).epsilon(1e-12));
    }
}

TEST_CASE("ppe-adjusted expectation") {
    SUBCASE("identity at equal sufficiency") {
        CHECK(ppe_adjusted_expectation(0.0065, 0.9355, 0.9355) ==
              doctest::Approx(0.0065).epsilon(1e-12));
    }
    SUBCASE("published two-state scaling") {
        CHECK(std::abs(ppe_adjusted_expectation(0.0065, 0.9355, 0.744) -
                       0.02580) < 2e-4);
    }
    SUBCASE("full sufficiency wipes out the PPE term") {
        CHECK(ppe_adjusted_expectation(0.01, 0.5, 1.0) == 0.0);
        CHECK(ppe_adjusted_expectation(0.3, 0.9, 1.0) == 0.0);
    }
    SUBCASE("reference sufficiency of one is undefined") {
        CHECK_THROWS_AS(ppe_adjusted_expectation(0.01, 1.0, 0.5), DomainError);
    }
}

TEST_CASE("equal-weight population risk") {
    SUBCASE("published state estimates") {
        const std::vector<double> texas = {5.99e-3, 3.89e-3, 0.0065, 0.0173};
        CHECK(std::abs(equal_weight_population_risk(texas) - 0.0084) < 2e-4);

        const std::vector<double> california = {5.99e-3, 3.89e-3, 0.02580,
                                                0.0173};
        CHECK(std::abs(equal_weight_population_risk(california) - 0.0132) <
              2e-4);
    }
    SUBCASE("zeros stay zero") {
        const std::vector<double> zeros(4, 0.0);
        CHECK(equal_weight_population_risk(zeros) == 0.0);
    }
    SUBCASE("arity is enforced") {
        const std::vector<double> three(3, 0.1);
        CHECK_THROWS_AS(equal_weight_population_risk(three), DomainError);
        const std::vector<double> five(5, 0.1);
        CHECK_THROWS_AS(equal_weight_population_risk(five), DomainError);
    }
    SUBCASE("symmetric and bounded by the extremes") {
        testrng::Uniform rng(73);
        for (int round = 0; round < 100; ++round) {
            std::vector<double> e = rng.probabilities(4);
            const double base = equal_weight_population_risk(e);
            for (int shuffle = 0; shuffle < 5; ++shuffle) {
                std::swap(e[rng.index(4)], e[rng.index(4)]);
                CHECK(equal_weight_population_risk(e) ==
                      doctest::Approx(base).epsilon(1e-15));
            }
            CHECK(base >= *std::min_element(e.begin(), e.end()) - 1e-15);
            CHECK(base <= *std::max_element(e.begin(), e.end()) + 1e-15);
        }
    }
}

TEST_CASE("facility case study end to end") {
    const std::vector<FacilityCaseStudy> facilities = io::load_case_study(
        std::string(HCPRISK_DATA_DIR) + "/case_study_tx_ca.json");
    REQUIRE(facilities.size() == 2);
    REQUIRE(facilities[0].name == "Texas");
    REQUIRE(facilities[1].name == "California");

    CHECK(std::abs(facility_population_risk(facilities[0]) - 0.0084) < 2e-4);
    CHECK(std::abs(facility_population_risk(facilities[1]) - 0.0132) < 2e-4);
}

TEST_CASE("facility with a missing variable is refused by name") {
    FacilityCaseStudy facility;
    facility.name = "Partial";
    CaseStudyVariable v;
    v.expectation = 0.01;
    facility.variables["SOH_time"] = v;
    facility.variables["CS"] = v;
    facility.variables["PPE_SL"] = v;
    CHECK_THROWS_WITH_AS(facility_population_risk(facility),
                         doctest::Contains("ORS"), ConfigError);
}
