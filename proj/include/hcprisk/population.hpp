#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hcprisk {

// Named engineering / administrative control factors.
struct ControlFactor {
    std::string name;
    double value = 0.0;
};

// Logistic combiner over individual risks and control factors:
//   risk = logistic((alpha . pir + w . factors + bias) / tau)
struct AggregationModel {
    std::vector<double> alpha;
    std::vector<double> w;
    double bias = 0.0;
    double tau = 1.0;  // > 0
};

double logistic_aggregate(std::span<const double> individual_risks,
                          std::span<const ControlFactor> factors,
                          const AggregationModel& model);

struct MixtureBin {
    std::string label;
    double p = 0.0;                // P(X = x)
    double conditional_risk = 0.0; // E[PIR | X = x]
};

// Discrete feature distribution paired with conditional risks. Bin
// probabilities must total 1 within kMixtureSumTolerance; partial published
// distributions are accepted up to that slack.
struct FeatureMixture {
    std::string variable_name;
    std::vector<MixtureBin> bins;
};

inline constexpr double kMixtureSumTolerance = 0.02;

// E_X[PIR] = sum_x P(X=x) E[PIR | X=x]. With renormalize the weights are
// divided by their total (exact expectation under the normalised
// distribution); without it the raw weighted sum is returned. Either way the
// bin probabilities must total 1 within tolerance.
double mixture_expectation(const FeatureMixture& mixture, bool renormalize = false);

// Scales a reference PPE risk expectation by relative PPE insufficiency:
//   reference * (1 - target_sufficiency) / (1 - reference_sufficiency).
// Reverse-engineered calibration rule for facilities that report only their
// sufficiency level; override with a direct expectation when one is known.
double ppe_adjusted_expectation(double reference_expectation,
                                double reference_sufficiency,
                                double target_sufficiency);

// Equal-weight combination of exactly four variable expectations
// (SOH_time, CS, PPE_SL, ORS).
double equal_weight_population_risk(std::span<const double> expectations);

// One case-study variable: a direct expectation, a mixture to reduce, or the
// PPE sufficiency scaling rule.
struct CaseStudyVariable {
    std::optional<double> expectation;
    std::optional<FeatureMixture> mixture;
    struct PpeAdjusted {
        double reference_expectation = 0.0;
        double reference_sufficiency = 0.0;
        double target_sufficiency = 0.0;
    };
    std::optional<PpeAdjusted> ppe_adjusted;
};

struct FacilityCaseStudy {
    std::string name;
    std::map<std::string, CaseStudyVariable> variables;
};

// The four variables every facility must provide.
extern const std::vector<std::string>& case_study_variable_names();

// Resolves each of the four variables and combines them with equal weights.
// Mixtures are renormalized by default here (case-study convention).
double facility_population_risk(const FacilityCaseStudy& facility,
                                bool renormalize_mixtures = true);

}  // namespace hcprisk
