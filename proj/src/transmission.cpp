#include "hcprisk/transmission.hpp"

#include "hcprisk/kernels/philox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

namespace hcprisk {
namespace {

// Coefficients past this magnitude are taken as divergence towards a
// separated fit; real-valued MLEs of bounded logistic problems stay far
// below it.
constexpr double kSeparationBound = 50.0;

double stable_logistic(double lp) {
    double p;
    if (lp >= 0.0) {
        p = 1.0 / (1.0 + std::exp(-lp));
    } else {
        const double e = std::exp(lp);
        p = e / (1.0 + e);
    }
    const double hi = std::nextafter(1.0, 0.0);
    const double lo = std::numeric_limits<double>::min();
    return std::clamp(p, lo, hi);
}

// log(1 + exp(x)) without overflow.
double log1p_exp(double x) {
    if (x > 0.0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

// Dense symmetric positive-definite solve, sized for covariate counts.
class Spd {
public:
    explicit Spd(std::size_t n) : n_(n), a_(n * n, 0.0) {}

    double& at(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    double at(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

    // In-place Cholesky; false when the matrix is not positive definite.
    bool factor() {
        for (std::size_t j = 0; j < n_; ++j) {
            double d = at(j, j);
            for (std::size_t k = 0; k < j; ++k) d -= at(j, k) * at(j, k);
            if (!(d > 0.0) || !std::isfinite(d)) return false;
            const double root = std::sqrt(d);
            at(j, j) = root;
            for (std::size_t i = j + 1; i < n_; ++i) {
                double s = at(i, j);
                for (std::size_t k = 0; k < j; ++k) s -= at(i, k) * at(j, k);
                at(i, j) = s / root;
            }
        }
        return true;
    }

    // Solve L L^T x = b given a factored matrix.
    std::vector<double> solve(std::vector<double> b) const {
        for (std::size_t i = 0; i < n_; ++i) {
            double s = b[i];
            for (std::size_t k = 0; k < i; ++k) s -= at(i, k) * b[k];
            b[i] = s / at(i, i);
        }
        for (std::size_t ii = n_; ii-- > 0;) {
            double s = b[ii];
            for (std::size_t k = ii + 1; k < n_; ++k) s -= at(k, ii) * b[k];
            b[ii] = s / at(ii, ii);
        }
        return b;
    }

    // Diagonal of the inverse via n unit solves.
    std::vector<double> inverse_diagonal() const {
        std::vector<double> diag(n_);
        for (std::size_t j = 0; j < n_; ++j) {
            std::vector<double> e(n_, 0.0);
            e[j] = 1.0;
            diag[j] = solve(std::move(e))[j];
        }
        return diag;
    }

private:
    std::size_t n_;
    std::vector<double> a_;
};

void check_dataset(const LabeledDataset& data) {
    std::set<std::string> seen;
    for (const std::string& name : data.schema.names) {
        if (!seen.insert(name).second) {
            throw ConfigError("duplicate covariate name '" + name + "'");
        }
    }
    const std::size_t w = data.schema.names.size();
    if (data.x.size() != w * data.y.size()) {
        throw ConfigError("dataset row width does not match its schema");
    }
    for (std::uint8_t y : data.y) {
        if (y > 1) throw DomainError("outcomes must be 0 or 1");
    }
}

void check_schema_match(const LogisticModel& model, const LabeledDataset& data) {
    if (model.schema != data.schema) {
        throw ConfigError("model and dataset covariate schemas differ");
    }
    if (model.coefficients.size() != model.schema.names.size()) {
        throw ConfigError("model coefficient count does not match its schema");
    }
}

// Linear predictor of row i with parameters (beta[0] = intercept).
double linear_predictor(const LabeledDataset& data, std::size_t i,
                        const std::vector<double>& beta) {
    const std::size_t w = data.schema.names.size();
    double lp = beta[0];
    const double* row = data.x.data() + i * w;
    for (std::size_t j = 0; j < w; ++j) lp += beta[j + 1] * row[j];
    return lp;
}

double penalized_log_likelihood(const LabeledDataset& data,
                                const std::vector<double>& beta, double ridge) {
    double ll = 0.0;
    for (std::size_t i = 0; i < data.y.size(); ++i) {
        const double lp = linear_predictor(data, i, beta);
        ll += data.y[i] != 0 ? lp - log1p_exp(lp) : -log1p_exp(lp);
    }
    if (ridge > 0.0) {
        for (std::size_t j = 1; j < beta.size(); ++j) {
            ll -= 0.5 * ridge * beta[j] * beta[j];
        }
    }
    return ll;
}

LogisticModel make_model(const CovariateSchema& schema,
                         const std::vector<double>& beta) {
    LogisticModel m;
    m.schema = schema;
    m.intercept = beta[0];
    m.coefficients.assign(beta.begin() + 1, beta.end());
    return m;
}

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    // Fisher-Yates driven by per-index Philox words; modulo bias is
    // irrelevant at these sizes and keeps the partition platform-stable.
    for (std::size_t i = n; i > 1; --i) {
        const auto words = kernels::philox4x32(seed, i, 0x0f01d5u, 0);
        const std::size_t j = static_cast<std::size_t>(words.x[0]) % i;
        std::swap(order[i - 1], order[j]);
    }
    return order;
}

}  // namespace

double predict_probability(const LogisticModel& model, std::span<const double> z) {
    if (z.size() != model.schema.names.size() ||
        model.coefficients.size() != model.schema.names.size()) {
        throw ConfigError("covariate vector does not match the model schema");
    }
    double lp = model.intercept;
    for (std::size_t j = 0; j < z.size(); ++j) {
        if (!std::isfinite(z[j])) throw DomainError("non-finite covariate value");
        lp += model.coefficients[j] * z[j];
    }
    return stable_logistic(lp);
}

double log_likelihood(const LogisticModel& model, const LabeledDataset& data) {
    check_schema_match(model, data);
    check_dataset(data);
    std::vector<double> beta(1 + model.coefficients.size());
    beta[0] = model.intercept;
    std::copy(model.coefficients.begin(), model.coefficients.end(),
              beta.begin() + 1);
    return penalized_log_likelihood(data, beta, 0.0);
}

double aic(const LogisticModel& model, const LabeledDataset& data) {
    const double k = 1.0 + static_cast<double>(model.coefficients.size());
    return 2.0 * k - 2.0 * log_likelihood(model, data);
}

FitResult fit_logistic(const LabeledDataset& data, const FitConfig& config) {
    check_dataset(data);
    const std::size_t n = data.y.size();
    const std::size_t w = data.schema.names.size();
    const std::size_t p = w + 1;

    std::size_t positives = 0;
    for (std::uint8_t y : data.y) positives += y;
    if (positives == 0 || positives == n) {
        throw DomainError("fitting needs at least one row of each outcome class");
    }
    for (std::size_t j = 0; j < w; ++j) {
        const double first = data.x[j];
        bool constant = true;
        for (std::size_t i = 1; i < n && constant; ++i) {
            constant = data.x[i * w + j] == first;
        }
        if (constant) {
            throw DomainError("covariate '" + data.schema.names[j] +
                              "' is constant and duplicates the intercept");
        }
    }

    std::vector<double> beta(p, 0.0);
    std::vector<double> score(p);
    std::vector<double> mu(n);
    double ll = penalized_log_likelihood(data, beta, config.ridge);

    auto fill_score = [&]() {
        std::fill(score.begin(), score.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            mu[i] = stable_logistic(linear_predictor(data, i, beta));
            const double resid = static_cast<double>(data.y[i]) - mu[i];
            score[0] += resid;
            const double* row = data.x.data() + i * w;
            for (std::size_t j = 0; j < w; ++j) score[j + 1] += resid * row[j];
        }
        if (config.ridge > 0.0) {
            for (std::size_t j = 1; j < p; ++j) score[j] -= config.ridge * beta[j];
        }
    };

    auto last_result = [&](bool converged, unsigned iterations) {
        FitResult result;
        result.model = make_model(data.schema, beta);
        result.diagnostics.log_likelihood =
            penalized_log_likelihood(data, beta, 0.0);
        result.diagnostics.iterations = iterations;
        result.diagnostics.converged = converged;
        return result;
    };

    for (unsigned iter = 0; iter <= config.max_iter; ++iter) {
        fill_score();
        double max_score = 0.0;
        for (double s : score) max_score = std::max(max_score, std::abs(s));
        if (max_score < config.tol) {
            // A finite MLE never classifies every row with a strictly
            // positive margin; when it does, the likelihood still climbs
            // along this direction and the data are completely separated.
            if (config.ridge == 0.0) {
                bool all_margins_positive = true;
                for (std::size_t i = 0; i < n && all_margins_positive; ++i) {
                    const double lp = linear_predictor(data, i, beta);
                    const double margin = data.y[i] != 0 ? lp : -lp;
                    all_margins_positive = margin > 0.0;
                }
                if (all_margins_positive) {
                    throw SeparationError(
                        "the classes are completely separated; the MLE does"
                        " not exist (a positive ridge may stabilise the fit)");
                }
            }
            FitResult result = last_result(true, iter);
            // Observed information at the optimum, for standard errors.
            Spd info(p);
            for (std::size_t i = 0; i < n; ++i) {
                const double wgt = mu[i] * (1.0 - mu[i]);
                const double* row = data.x.data() + i * w;
                info.at(0, 0) += wgt;
                for (std::size_t j = 0; j < w; ++j) {
                    info.at(j + 1, 0) += wgt * row[j];
                    for (std::size_t k = 0; k <= j; ++k) {
                        info.at(j + 1, k + 1) += wgt * row[j] * row[k];
                    }
                }
            }
            if (config.ridge > 0.0) {
                for (std::size_t j = 1; j < p; ++j) {
                    info.at(j, j) += config.ridge;
                }
            }
            if (info.factor()) {
                result.diagnostics.std_errors = info.inverse_diagonal();
                for (double& se : result.diagnostics.std_errors) {
                    se = std::sqrt(std::max(se, 0.0));
                }
            }
            return result;
        }
        if (iter == config.max_iter) break;

        Spd hessian(p);
        for (std::size_t i = 0; i < n; ++i) {
            const double wgt = mu[i] * (1.0 - mu[i]);
            const double* row = data.x.data() + i * w;
            hessian.at(0, 0) += wgt;
            for (std::size_t j = 0; j < w; ++j) {
                hessian.at(j + 1, 0) += wgt * row[j];
                for (std::size_t k = 0; k <= j; ++k) {
                    hessian.at(j + 1, k + 1) += wgt * row[j] * row[k];
                }
            }
        }
        if (config.ridge > 0.0) {
            for (std::size_t j = 1; j < p; ++j) hessian.at(j, j) += config.ridge;
        }
        if (!hessian.factor()) {
            throw SeparationError(
                "observed information is singular; the classes appear separated"
                " (a positive ridge may stabilise the fit)");
        }
        const std::vector<double> delta = hessian.solve(score);

        // Step halving against genuine overshoot; the slack scales with |ll|
        // so rounding noise of a few ulps never rejects a full Newton step.
        const double slack = 1e-12 * (1.0 + std::abs(ll));
        double step = 1.0;
        std::vector<double> candidate(p);
        double candidate_ll = -std::numeric_limits<double>::infinity();
        for (int halving = 0; halving < 40; ++halving) {
            for (std::size_t j = 0; j < p; ++j) {
                candidate[j] = beta[j] + step * delta[j];
            }
            candidate_ll = penalized_log_likelihood(data, candidate, config.ridge);
            if (candidate_ll >= ll - slack) break;
            step *= 0.5;
        }
        beta = candidate;
        ll = candidate_ll;

        for (double b : beta) {
            if (!std::isfinite(b) || std::abs(b) > kSeparationBound) {
                throw SeparationError(
                    "coefficients diverged during fitting; the classes appear"
                    " separated (a positive ridge may stabilise the fit)");
            }
        }
    }

    std::ostringstream msg;
    msg << "fit did not converge within " << config.max_iter << " iterations";
    throw ConvergenceError(msg.str(), last_result(false, config.max_iter));
}

double k_fold_cv(const LabeledDataset& data, unsigned k, double threshold,
                 std::uint64_t seed, const FitConfig& config) {
    check_dataset(data);
    const std::size_t n = data.y.size();
    if (k < 2) throw DomainError("cross-validation needs k >= 2");
    if (static_cast<std::size_t>(k) > n) {
        throw DomainError("cross-validation needs k <= number of rows");
    }
    if (!(threshold >= 0.0 && threshold <= 1.0)) {
        throw DomainError("classification threshold outside [0,1]");
    }

    const std::vector<std::size_t> order = seeded_permutation(n, seed);

    // Near-equal contiguous chunks of the permuted order.
    std::vector<std::vector<std::size_t>> folds(k);
    {
        const std::size_t base = n / k;
        std::size_t extra = n % k;
        std::size_t cursor = 0;
        for (unsigned f = 0; f < k; ++f) {
            std::size_t size = base + (extra > 0 ? 1 : 0);
            if (extra > 0) --extra;
            for (std::size_t i = 0; i < size; ++i) {
                folds[f].push_back(order[cursor++]);
            }
        }
    }

    for (unsigned f = 0; f < k; ++f) {
        std::size_t ones = 0;
        for (std::size_t i : folds[f]) ones += data.y[i];
        if (ones == 0 || ones == folds[f].size()) {
            throw DomainError("fold " + std::to_string(f) +
                              " contains a single outcome class");
        }
    }

    double accuracy_sum = 0.0;
    for (unsigned f = 0; f < k; ++f) {
        LabeledDataset train;
        train.schema = data.schema;
        for (unsigned g = 0; g < k; ++g) {
            if (g == f) continue;
            for (std::size_t i : folds[g]) {
                const auto row = data.row(i);
                train.x.insert(train.x.end(), row.begin(), row.end());
                train.y.push_back(data.y[i]);
            }
        }
        const FitResult fit = fit_logistic(train, config);

        std::size_t correct = 0;
        for (std::size_t i : folds[f]) {
            std::vector<double> z(data.row(i).begin(), data.row(i).end());
            const double prob = predict_probability(fit.model, z);
            const std::uint8_t predicted = prob >= threshold ? 1 : 0;
            correct += predicted == data.y[i] ? 1 : 0;
        }
        accuracy_sum +=
            static_cast<double>(correct) / static_cast<double>(folds[f].size());
    }
    return accuracy_sum / static_cast<double>(k);
}

}  // namespace hcprisk
