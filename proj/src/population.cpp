#include "hcprisk/population.hpp"

#include "hcprisk/errors.hpp"

#include <cmath>
#include <string>

namespace hcprisk {

double logistic_aggregate(std::span<const double> individual_risks,
                          std::span<const ControlFactor> factors,
                          const AggregationModel& model) {
    if (model.alpha.size() != individual_risks.size()) {
        throw ConfigError("alpha weight count does not match the risk vector");
    }
    if (model.w.size() != factors.size()) {
        throw ConfigError("factor weight count does not match the factors");
    }
    if (!(model.tau > 0.0)) throw DomainError("tau must be positive");

    double f = model.bias;
    for (std::size_t i = 0; i < individual_risks.size(); ++i) {
        f += model.alpha[i] * individual_risks[i];
    }
    for (std::size_t i = 0; i < factors.size(); ++i) {
        if (!std::isfinite(factors[i].value)) {
            throw DomainError("control factor '" + factors[i].name +
                              "' is not finite");
        }
        f += model.w[i] * factors[i].value;
    }
    const double scaled = f / model.tau;
    if (scaled >= 0.0) return 1.0 / (1.0 + std::exp(-scaled));
    const double e = std::exp(scaled);
    return e / (1.0 + e);
}

double mixture_expectation(const FeatureMixture& mixture, bool renormalize) {
    if (mixture.bins.empty()) {
        throw DomainError("mixture '" + mixture.variable_name + "' has no bins");
    }
    double total_p = 0.0;
    double weighted = 0.0;
    for (const MixtureBin& bin : mixture.bins) {
        if (!(bin.p >= 0.0)) {
            throw DomainError("mixture '" + mixture.variable_name +
                              "' has a negative probability in bin '" +
                              bin.label + "'");
        }
        if (!(bin.conditional_risk >= 0.0 && bin.conditional_risk <= 1.0)) {
            throw DomainError("mixture '" + mixture.variable_name +
                              "' has a conditional risk outside [0,1] in bin '" +
                              bin.label + "'");
        }
        total_p += bin.p;
        weighted += bin.p * bin.conditional_risk;
    }
    if (std::abs(total_p - 1.0) > kMixtureSumTolerance) {
        throw DomainError("mixture '" + mixture.variable_name +
                          "' probabilities sum to " + std::to_string(total_p) +
                          ", outside 1 +/- " +
                          std::to_string(kMixtureSumTolerance));
    }
    return renormalize ? weighted / total_p : weighted;
}

double ppe_adjusted_expectation(double reference_expectation,
                                double reference_sufficiency,
                                double target_sufficiency) {
    if (!(reference_expectation >= 0.0)) {
        throw DomainError("reference expectation must be nonnegative");
    }
    if (!(reference_sufficiency >= 0.0 && reference_sufficiency <= 1.0) ||
        !(target_sufficiency >= 0.0 && target_sufficiency <= 1.0)) {
        throw DomainError("PPE sufficiency levels must lie in [0,1]");
    }
    if (reference_sufficiency == 1.0) {
        throw DomainError("reference sufficiency of 1 leaves no PPE-attributed"
                          " risk to scale");
    }
    return reference_expectation * (1.0 - target_sufficiency) /
           (1.0 - reference_sufficiency);
}

double equal_weight_population_risk(std::span<const double> expectations) {
    if (expectations.size() != 4) {
        throw DomainError("the equal-weight estimator takes exactly four"
                          " variable expectations");
    }
    double sum = 0.0;
    for (double e : expectations) {
        if (!(e >= 0.0 && e <= 1.0)) {
            throw DomainError("variable expectation outside [0,1]");
        }
        sum += e;
    }
    return sum / 4.0;
}

const std::vector<std::string>& case_study_variable_names() {
    static const std::vector<std::string> names = {"SOH_time", "CS", "PPE_SL",
                                                   "ORS"};
    return names;
}

double facility_population_risk(const FacilityCaseStudy& facility,
                                bool renormalize_mixtures) {
    std::vector<double> expectations;
    expectations.reserve(4);
    for (const std::string& name : case_study_variable_names()) {
        const auto it = facility.variables.find(name);
        if (it == facility.variables.end()) {
            throw ConfigError("facility '" + facility.name +
                              "' is missing variable '" + name + "'");
        }
        const CaseStudyVariable& v = it->second;
        if (v.expectation.has_value()) {
            expectations.push_back(*v.expectation);
        } else if (v.mixture.has_value()) {
            expectations.push_back(
                mixture_expectation(*v.mixture, renormalize_mixtures));
        } else if (v.ppe_adjusted.has_value()) {
            expectations.push_back(ppe_adjusted_expectation(
                v.ppe_adjusted->reference_expectation,
                v.ppe_adjusted->reference_sufficiency,
                v.ppe_adjusted->target_sufficiency));
        } else {
            throw ConfigError("variable '" + name + "' of facility '" +
                              facility.name + "' has no value source");
        }
    }
    return equal_weight_population_risk(expectations);
}

}  // namespace hcprisk
