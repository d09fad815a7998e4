#pragma once

#include "hcprisk/errors.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace hcprisk {

// Ordered, unique covariate names shared between a model and its data.
struct CovariateSchema {
    std::vector<std::string> names;

    bool operator==(const CovariateSchema&) const = default;
};

// Logistic model of per-contact transmission probability:
//   p = logistic(intercept + z . coefficients)
struct LogisticModel {
    double intercept = 0.0;
    std::vector<double> coefficients;
    CovariateSchema schema;
};

// Binary-outcome training data, row-major with one column per schema entry.
struct LabeledDataset {
    CovariateSchema schema;
    std::vector<double> x;
    std::vector<std::uint8_t> y;

    std::size_t rows() const { return y.size(); }
    std::span<const double> row(std::size_t i) const {
        const std::size_t w = schema.names.size();
        return {x.data() + i * w, w};
    }
};

struct FitConfig {
    unsigned max_iter = 100;
    double tol = 1e-8;        // on the max-norm of the score
    double ridge = 0.0;       // separation rescue; never applied silently
};

struct FitDiagnostics {
    double log_likelihood = 0.0;
    unsigned iterations = 0;
    std::vector<double> std_errors;  // intercept first, then schema order
    bool converged = false;
};

struct FitResult {
    LogisticModel model;
    FitDiagnostics diagnostics;
};

// Raised when Newton iteration exhausts max_iter; carries the last iterate.
class ConvergenceError : public ModelError {
public:
    ConvergenceError(std::string message, FitResult last)
        : ModelError(std::move(message)), last_(std::move(last)) {}
    const FitResult& last_iterate() const { return last_; }

private:
    FitResult last_;
};

// logistic(intercept + z.beta), stable for |linear predictor| well past 700;
// the result is clamped into the open interval (0, 1).
double predict_probability(const LogisticModel& model, std::span<const double> z);

// Maximum-likelihood fit via Newton iteration (iteratively reweighted least
// squares) with step halving. Throws SeparationError when coefficients
// diverge and ConvergenceError when max_iter is exhausted.
FitResult fit_logistic(const LabeledDataset& data, const FitConfig& config = {});

double log_likelihood(const LogisticModel& model, const LabeledDataset& data);

// 2k - 2 log L with k counting the intercept.
double aic(const LogisticModel& model, const LabeledDataset& data);

// Mean over folds of the fraction classified correctly at `threshold`.
// Folds are a seeded random partition into k near-equal parts; a fold whose
// test part is single-class is refused.
double k_fold_cv(const LabeledDataset& data, unsigned k, double threshold,
                 std::uint64_t seed, const FitConfig& config = {});

}  // namespace hcprisk
