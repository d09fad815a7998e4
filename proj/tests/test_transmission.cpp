#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hcprisk/transmission.hpp"

#include "support/oracles.hpp"
#include "support/synthetic.hpp"
#include "support/test_rng.hpp"

#include <cmath>
#include <vector>

using namespace hcprisk;

namespace {

// Coefficient estimates of the bundled UK healthcare-worker model.
LogisticModel uk_model() {
    LogisticModel model;
    model.schema.names = {"Age",        "Cancer",      "Resp",
                          "Obes",       "Smoker",      "Doctor",
                          "Allied_prof", "Dental_staff", "Pub_trans",
                          "C_contact",  "AGP",         "PPE_train",
                          "Lacked_PPE", "cont_wo_PPE", "Imp_PPE"};
    model.intercept = -0.5953;
    model.coefficients = {-0.0120, 0.5296, 0.2020, 0.3055, -0.2490,
                          0.1514, -0.2282, -0.7018, 0.2728, 0.2949,
                          -0.2201, -0.1708, 0.3237, 0.3261, -0.2070};
    return model;
}

}  // namespace

TEST_CASE("prediction at the published intercept") {
    const LogisticModel model = uk_model();
    const std::vector<double> baseline(15, 0.0);
    CHECK(std::abs(predict_probability(model, baseline) - 0.3554) < 1e-4);

    std::vector<double> unprotected(15, 0.0);
    unprotected[12] = 1.0;  // Lacked_PPE
    unprotected[13] = 1.0;  // cont_wo_PPE
    CHECK(std::abs(predict_probability(model, unprotected) - 0.5136) < 1e-4);
}

TEST_CASE("the all-zero model answers one half") {
    LogisticModel model;
    model.schema.names = {"a", "b"};
    model.coefficients = {0.0, 0.0};
    testrng::Uniform rng(41);
    for (int round = 0; round < 20; ++round) {
        const std::vector<double> z = {rng.range(-5, 5), rng.range(-5, 5)};
        CHECK(predict_probability(model, z) == 0.5);
    }
}

TEST_CASE("prediction is numerically stable far into the tails") {
    LogisticModel model;
    model.schema.names = {"z"};
    model.coefficients = {1.0};
    for (double lp : {700.0, 750.0, 800.0}) {
        const std::vector<double> z = {lp};
        const double hi = predict_probability(model, z);
        CHECK(hi > 0.0);
        CHECK(hi < 1.0);
        const std::vector<double> zneg = {-lp};
        const double lo = predict_probability(model, zneg);
        CHECK(lo > 0.0);
        CHECK(lo < 1.0);
    }
}

TEST_CASE("prediction rejects schema mismatches") {
    const LogisticModel model = uk_model();
    CHECK_THROWS_AS(predict_probability(model, std::vector<double>{1.0, 2.0}),
                    ConfigError);
    CHECK_THROWS_AS(
        predict_probability(model, std::vector<double>(15, std::nan(""))),
        DomainError);
}

TEST_CASE("monotone in each covariate according to its coefficient sign") {
    const LogisticModel model = uk_model();
    testrng::Uniform rng(42);
    for (int round = 0; round < 200; ++round) {
        std::vector<double> z = rng.probabilities(15);
        const std::size_t j = rng.index(15);
        std::vector<double> higher = z;
        higher[j] += 0.5;
        const double base = predict_probability(model, z);
        const double moved = predict_probability(model, higher);
        if (model.coefficients[j] > 0.0) {
            CHECK(moved > base);
        } else {
            CHECK(moved < base);
        }
    }
}

TEST_CASE("intercept-only fit recovers the closed-form log-odds") {
    LabeledDataset data;
    for (int i = 0; i < 100; ++i) data.y.push_back(i < 30 ? 1 : 0);
    const FitResult fit = fit_logistic(data);
    CHECK(fit.diagnostics.converged);
    CHECK(std::abs(fit.model.intercept - std::log(30.0 / 70.0)) < 1e-9);
}

TEST_CASE("generate-and-refit recovers the generator within three SEs") {
    synthetic::Generator gen;
    gen.intercept = -0.4;
    gen.coefficients = {0.8, -0.5, 0.3, -0.25, 0.6};
    gen.binary = {true, false, true, false, true};

    const LabeledDataset data = synthetic::sample(gen, 20'000, 4242);
    const FitResult fit = fit_logistic(data);
    REQUIRE(fit.diagnostics.converged);
    REQUIRE(fit.diagnostics.std_errors.size() == 6);

    CHECK(std::abs(fit.model.intercept - gen.intercept) <
          3.0 * fit.diagnostics.std_errors[0]);
    for (std::size_t j = 0; j < gen.coefficients.size(); ++j) {
        CHECK(std::abs(fit.model.coefficients[j] - gen.coefficients[j]) <
              3.0 * fit.diagnostics.std_errors[j + 1]);
    }
}

TEST_CASE("score equations hold at the fitted optimum") {
    synthetic::Generator gen;
    gen.intercept = 0.2;
    gen.coefficients = {0.5, -0.7};
    gen.binary = {false, true};
    const LabeledDataset data = synthetic::sample(gen, 5'000, 99);
    const FitResult fit = fit_logistic(data);

    // Residuals are orthogonal to every column, including the intercept.
    const std::size_t w = data.schema.names.size();
    std::vector<double> score(w + 1, 0.0);
    for (std::size_t i = 0; i < data.rows(); ++i) {
        std::vector<double> z(data.row(i).begin(), data.row(i).end());
        const double resid =
            static_cast<double>(data.y[i]) - predict_probability(fit.model, z);
        score[0] += resid;
        for (std::size_t j = 0; j < w; ++j) score[j + 1] += resid * z[j];
    }
    for (double s : score) CHECK(std::abs(s) < 1e-6);
}

TEST_CASE("analytic gradient matches central finite differences") {
    synthetic::Generator gen;
    gen.intercept = -0.1;
    gen.coefficients = {0.4, 0.9};
    gen.binary = {false, false};
    const LabeledDataset data = synthetic::sample(gen, 400, 7);

    testrng::Uniform rng(43);
    for (int round = 0; round < 20; ++round) {
        std::vector<double> beta = {rng.range(-1, 1), rng.range(-1, 1),
                                    rng.range(-1, 1)};
        // Analytic score at beta.
        std::vector<double> score(3, 0.0);
        for (std::size_t i = 0; i < data.rows(); ++i) {
            double lp = beta[0];
            for (std::size_t j = 0; j < 2; ++j) {
                lp += beta[j + 1] * data.x[i * 2 + j];
            }
            const double p = 1.0 / (1.0 + std::exp(-lp));
            const double resid = static_cast<double>(data.y[i]) - p;
            score[0] += resid;
            for (std::size_t j = 0; j < 2; ++j) {
                score[j + 1] += resid * data.x[i * 2 + j];
            }
        }
        for (std::size_t c = 0; c < 3; ++c) {
            const double numeric =
                oracles::finite_difference_gradient(data, beta, c, 1e-5);
            CHECK(std::abs(score[c] - numeric) /
                      std::max(1.0, std::abs(numeric)) <
                  1e-5);
        }
    }
}

TEST_CASE("perfect separation is detected and reported") {
    LabeledDataset data;
    data.schema.names = {"x"};
    for (int i = 0; i < 20; ++i) {
        const double x = i < 10 ? -1.0 - i * 0.1 : 1.0 + i * 0.1;
        data.x.push_back(x);
        data.y.push_back(i < 10 ? 0 : 1);
    }
    CHECK_THROWS_AS(fit_logistic(data), SeparationError);

    // A positive ridge rescues the same data.
    FitConfig ridged;
    ridged.ridge = 1.0;
    const FitResult fit = fit_logistic(data, ridged);
    CHECK(fit.diagnostics.converged);
    CHECK(fit.model.coefficients[0] > 0.0);
}

TEST_CASE("exhausting the iteration budget reports the last iterate") {
    synthetic::Generator gen;
    gen.intercept = -0.4;
    gen.coefficients = {0.8, -0.5};
    gen.binary = {true, false};
    const LabeledDataset data = synthetic::sample(gen, 2'000, 55);
    FitConfig strangled;
    strangled.max_iter = 1;  // Newton needs several steps from zero
    try {
        fit_logistic(data, strangled);
        FAIL("expected a convergence error");
    } catch (const ConvergenceError& e) {
        CHECK_FALSE(e.last_iterate().diagnostics.converged);
        CHECK(e.last_iterate().diagnostics.iterations == 1);
        CHECK(e.last_iterate().model.coefficients.size() == 2);
        // One Newton step from zero already points the right way.
        CHECK(e.last_iterate().model.coefficients[0] > 0.0);
    }
}

TEST_CASE("degenerate datasets are rejected up front") {
    LabeledDataset single_class;
    single_class.schema.names = {"x"};
    for (int i = 0; i < 5; ++i) {
        single_class.x.push_back(i);
        single_class.y.push_back(1);
    }
    CHECK_THROWS_AS(fit_logistic(single_class), DomainError);

    LabeledDataset constant_column;
    constant_column.schema.names = {"x"};
    for (int i = 0; i < 6; ++i) {
        constant_column.x.push_back(2.5);
        constant_column.y.push_back(i % 2);
    }
    CHECK_THROWS_AS(fit_logistic(constant_column), DomainError);
}

TEST_CASE("aic closed forms") {
    SUBCASE("balanced intercept-only data") {
        LabeledDataset data;
        for (int i = 0; i < 100; ++i) data.y.push_back(i < 50 ? 1 : 0);
        LogisticModel model;
        model.intercept = 0.0;
        CHECK(std::abs(aic(model, data) - 140.63) < 0.01);
    }
    SUBCASE("a saturated single-row model approaches 2k") {
        LabeledDataset data;
        data.schema.names = {"x"};
        data.x = {1.0};
        data.y = {1};
        LogisticModel model;
        model.schema.names = {"x"};
        model.intercept = 20.0;
        model.coefficients = {20.0};
        CHECK(aic(model, data) == doctest::Approx(4.0).epsilon(1e-6));
    }
    SUBCASE("aic equals 2k minus twice the direct log-likelihood sum") {
        synthetic::Generator gen;
        gen.intercept = 0.3;
        gen.coefficients = {-0.6, 0.2};
        gen.binary = {true, false};
        const LabeledDataset data = synthetic::sample(gen, 2'000, 17);
        const FitResult fit = fit_logistic(data);

        double ll = 0.0;
        for (std::size_t i = 0; i < data.rows(); ++i) {
            std::vector<double> z(data.row(i).begin(), data.row(i).end());
            const double p = predict_probability(fit.model, z);
            ll += data.y[i] != 0 ? std::log(p) : std::log(1.0 - p);
        }
        CHECK(std::abs(aic(fit.model, data) - (2.0 * 3.0 - 2.0 * ll)) < 1e-8);
    }
}

TEST_CASE("adding a pure-noise column barely moves the fit") {
    synthetic::Generator gen;
    gen.intercept = -0.2;
    gen.coefficients = {0.7};
    gen.binary = {false};
    const LabeledDataset base = synthetic::sample(gen, 4'000, 23);
    const FitResult base_fit = fit_logistic(base);

    LabeledDataset wider;
    wider.schema.names = {"z0", "noise"};
    testrng::Uniform rng(24);
    for (std::size_t i = 0; i < base.rows(); ++i) {
        wider.x.push_back(base.x[i]);
        wider.x.push_back(rng.next());
        wider.y.push_back(base.y[i]);
    }
    const FitResult wide_fit = fit_logistic(wider);

    CHECK(wide_fit.diagnostics.log_likelihood >=
          base_fit.diagnostics.log_likelihood - 1e-9);
    CHECK(aic(wide_fit.model, wider) <= aic(base_fit.model, base) + 2.0 + 0.05);
}

TEST_CASE("refitting published-sign synthetic data keeps every sign") {
    // Covariates shaped like the bundled UK model: an age-like column plus
    // binary indicators, coefficients at the published values.
    const LogisticModel generator = uk_model();
    LabeledDataset data;
    data.schema.names = generator.schema.names;
    testrng::Uniform rng(4404);
    const std::size_t rows = 20'000;
    for (std::size_t i = 0; i < rows; ++i) {
        double lp = generator.intercept;
        for (std::size_t j = 0; j < generator.coefficients.size(); ++j) {
            double value;
            if (j == 0) {
                value = rng.range(20.0, 70.0);  // Age in years
            } else {
                value = rng.next() < 0.3 ? 1.0 : 0.0;
            }
            data.x.push_back(value);
            lp += generator.coefficients[j] * value;
        }
        const double p = 1.0 / (1.0 + std::exp(-lp));
        data.y.push_back(rng.next() < p ? 1 : 0);
    }
    const FitResult fit = fit_logistic(data);
    REQUIRE(fit.diagnostics.converged);
    for (std::size_t j = 0; j < generator.coefficients.size(); ++j) {
        INFO("covariate ", generator.schema.names[j]);
        CHECK(fit.model.coefficients[j] * generator.coefficients[j] > 0.0);
    }
}

TEST_CASE("cross-validation separates the separable and not the noise") {
    SUBCASE("wide-margin data is classified almost perfectly") {
        LabeledDataset data;
        data.schema.names = {"z0"};
        testrng::Uniform rng(51);
        for (int i = 0; i < 2'000; ++i) {
            const double z = rng.range(-1.0, 1.0);
            if (std::abs(z) < 0.2) continue;  // enforce a wide margin
            data.x.push_back(z);
            data.y.push_back(z > 0.0 ? 1 : 0);
        }
        FitConfig ridged;
        ridged.ridge = 0.1;  // the folds are linearly separable by design
        const double accuracy = k_fold_cv(data, 10, 0.5, 2024, ridged);
        CHECK(accuracy >= 0.99);
    }
    SUBCASE("pure noise hovers at one half") {
        LabeledDataset data;
        data.schema.names = {"z0"};
        testrng::Uniform rng(52);
        for (int i = 0; i < 10'000; ++i) {
            data.x.push_back(rng.next());
            data.y.push_back(i % 2 == 0 ? 1 : 0);
        }
        const double accuracy = k_fold_cv(data, 10, 0.5, 2024);
        CHECK(std::abs(accuracy - 0.5) < 0.05);
    }
    SUBCASE("single-class folds are refused by name") {
        LabeledDataset data;
        data.schema.names = {"z0"};
        for (int i = 0; i < 40; ++i) {
            data.x.push_back(i);
            data.y.push_back(1);  // duplicated outcome; every fold single-class
        }
        CHECK_THROWS_WITH_AS(k_fold_cv(data, 4, 0.5, 1),
                             doctest::Contains("fold"), DomainError);
    }
    SUBCASE("k larger than the dataset is rejected") {
        LabeledDataset data;
        data.schema.names = {"z0"};
        for (int i = 0; i < 5; ++i) {
            data.x.push_back(i);
            data.y.push_back(i % 2);
        }
        CHECK_THROWS_AS(k_fold_cv(data, 10, 0.5, 1), DomainError);
    }
    SUBCASE("the partition is deterministic in the seed") {
        synthetic::Generator gen;
        gen.intercept = 0.0;
        gen.coefficients = {1.2};
        gen.binary = {false};
        const LabeledDataset data = synthetic::sample(gen, 500, 37);
        const double a = k_fold_cv(data, 5, 0.5, 11);
        const double b = k_fold_cv(data, 5, 0.5, 11);
        CHECK(a == b);
    }
}
