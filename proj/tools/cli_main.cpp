// hcprisk — nosocomial infection-risk estimation for healthcare personnel.
//
// Subcommands cover the individual-level pipeline (individual), the
// occupational case study (tableiii), the two-state facility case study
// (tableiv), sequence sensitivity analyses (sensitivity enumerate|surface),
// transmission-model work (fit, predict, cv), Bayesian-network queries (bn)
// and the simulation validation table (mc validate).
//
// Exit codes: 0 success, 2 input parse error, 3 domain/configuration error,
// 4 model runtime error. Machine-readable output goes to stdout, diagnostics
// to stderr.

#include <CLI11.hpp>
#include <json.hpp>

#include "hcprisk/bayes_net.hpp"
#include "hcprisk/errors.hpp"
#include "hcprisk/individual_risk.hpp"
#include "hcprisk/io.hpp"
#include "hcprisk/monte_carlo.hpp"
#include "hcprisk/occupational.hpp"
#include "hcprisk/population.hpp"
#include "hcprisk/sensitivity.hpp"
#include "hcprisk/transmission.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using hcprisk::io::format_g12;
using nlohmann::json;

struct Options {
    std::string format = "csv";
    std::string output;  // empty -> stdout
    std::uint64_t seed = 0;
    bool verbose = false;
};

void add_common(CLI::App* cmd, Options& options) {
    cmd->add_option("--format", options.format, "Output format (csv|json)")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("-o,--output", options.output,
                    "Write output to this file instead of stdout");
    cmd->add_option("--seed", options.seed, "Seed for randomised procedures");
    cmd->add_flag("-v,--verbose", options.verbose, "Chatty diagnostics on stderr");
}

void emit(const Options& options, const std::string& text) {
    if (options.output.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(options.output);
    if (!out) {
        throw hcprisk::ConfigError("cannot write '" + options.output + "'");
    }
    out << text;
}

// For row-streaming commands; keeps large listings out of memory.
class OutputStream {
public:
    explicit OutputStream(const Options& options) {
        if (!options.output.empty()) {
            file_.open(options.output);
            if (!file_) {
                throw hcprisk::ConfigError("cannot write '" + options.output +
                                           "'");
            }
        }
    }
    std::ostream& get() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

std::vector<double> parse_level_list(const std::string& text) {
    std::vector<double> levels;
    std::istringstream in(text);
    std::string field;
    while (std::getline(in, field, ',')) {
        levels.push_back(hcprisk::io::parse_double(field, "--levels"));
    }
    if (levels.empty()) {
        throw hcprisk::DomainError("--levels needs at least one probability");
    }
    return levels;
}

std::int64_t parse_time_flag(const std::string& text, std::int64_t fallback) {
    if (text.empty()) return fallback;
    return hcprisk::io::parse_minutes_iso(text);
}

hcprisk::Evidence parse_evidence(const std::vector<std::string>& pairs) {
    hcprisk::Evidence evidence;
    for (const std::string& pair : pairs) {
        const std::size_t eq = pair.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == pair.size()) {
            throw hcprisk::ConfigError("evidence must be node=state, got '" +
                                       pair + "'");
        }
        evidence[pair.substr(0, eq)] = pair.substr(eq + 1);
    }
    return evidence;
}

// ---------------------------------------------------------------------------
// individual

int cmd_individual(const Options& options, const std::string& contacts_path,
                   const std::string& model_path,
                   const std::string& windows_path, const std::string& from,
                   const std::string& to) {
    const std::int64_t t1 = parse_time_flag(from, hcprisk::kMinTime);
    const std::int64_t t2 = parse_time_flag(to, hcprisk::kMaxTime);

    const auto contacts = hcprisk::io::read_csv_file(contacts_path);
    const std::vector<hcprisk::ContactSequence> sequences =
        hcprisk::io::parse_contacts(contacts, t1, t2);

    std::optional<hcprisk::LogisticModel> model;
    if (!model_path.empty()) model = hcprisk::io::load_model(model_path);

    std::map<std::string, hcprisk::ExposureWindow> windows;
    if (!windows_path.empty()) {
        windows = hcprisk::io::parse_windows(
            hcprisk::io::read_csv_file(windows_path));
    }

    struct Row {
        std::string hcp_id;
        double pir;
    };
    std::vector<Row> rows;
    for (const hcprisk::ContactSequence& seq : sequences) {
        rows.push_back({seq.hcp_id,
                        hcprisk::individual_risk(
                            seq, model.has_value() ? &*model : nullptr, windows)});
    }

    if (options.format == "json") {
        json doc = json::array();
        for (const Row& row : rows) {
            doc.push_back({{"hcp_id", row.hcp_id}, {"pir", row.pir}});
        }
        emit(options, doc.dump(2) + "\n");
    } else {
        std::string text = "hcp_id,pir\n";
        for (const Row& row : rows) {
            text += row.hcp_id + "," + format_g12(row.pir) + "\n";
        }
        emit(options, text);
    }
    return 0;
}

// ---------------------------------------------------------------------------
// tableiii

int cmd_tableiii(const Options& options, const std::string& occupations_path,
                 std::uint64_t n_contacts, double phi) {
    const auto table = hcprisk::io::read_csv_file(occupations_path);
    const std::vector<hcprisk::OccupationProfile> profiles =
        hcprisk::io::parse_occupations(table);
    const std::vector<hcprisk::OccupationRiskRow> rows =
        hcprisk::occupation_case_study(profiles, n_contacts, {phi});

    if (options.format == "json") {
        json doc = json::array();
        for (const auto& row : rows) {
            doc.push_back({{"name", row.name},
                           {"ors", row.ors},
                           {"p_hat", row.p_hat},
                           {"pir", row.pir}});
        }
        emit(options, doc.dump(2) + "\n");
    } else {
        std::string text = "name,ors,p_hat,pir\n";
        for (const auto& row : rows) {
            text += row.name + "," + format_g12(row.ors) + "," +
                    format_g12(row.p_hat) + "," + format_g12(row.pir) + "\n";
        }
        emit(options, text);
    }
    return 0;
}

// ---------------------------------------------------------------------------
// tableiv

int cmd_tableiv(const Options& options, const std::string& config_path) {
    const std::vector<hcprisk::FacilityCaseStudy> facilities =
        hcprisk::io::load_case_study(config_path);
    if (facilities.empty()) {
        throw hcprisk::ConfigError("case-study config lists no facilities");
    }

    if (options.format == "json") {
        json doc = json::object();
        for (const auto& facility : facilities) {
            doc[facility.name] = hcprisk::facility_population_risk(facility);
        }
        emit(options, doc.dump(2) + "\n");
    } else {
        std::string text = "facility,pir\n";
        for (const auto& facility : facilities) {
            text += facility.name + "," +
                    format_g12(hcprisk::facility_population_risk(facility)) +
                    "\n";
        }
        emit(options, text);
    }
    return 0;
}

// ---------------------------------------------------------------------------
// sensitivity

int cmd_sensitivity_enumerate(const Options& options, const std::string& levels,
                              unsigned n) {
    const hcprisk::LevelSet level_set{parse_level_list(levels)};

    if (options.format == "json") {
        json sequences = json::array();
        const hcprisk::EnumerationSummary summary =
            hcprisk::for_each_sequence_risk(
                level_set, n, [&](const hcprisk::SequenceRisk& row) {
                    sequences.push_back({{"code", row.code}, {"risk", row.risk}});
                });
        json doc = {{"levels", level_set.probs},
                    {"n", n},
                    {"sequences", std::move(sequences)},
                    {"mean", summary.mean},
                    {"sample_sd", summary.sample_sd}};
        emit(options, doc.dump(2) + "\n");
    } else {
        OutputStream stream(options);
        std::ostream& out = stream.get();
        out << "code,risk\n";
        const hcprisk::EnumerationSummary summary =
            hcprisk::for_each_sequence_risk(
                level_set, n, [&](const hcprisk::SequenceRisk& row) {
                    out << row.code << ',' << format_g12(row.risk) << '\n';
                });
        out << "# sequences=" << summary.sequences << '\n';
        out << "# mean=" << format_g12(summary.mean) << '\n';
        out << "# sample_sd=" << format_g12(summary.sample_sd) << '\n';
    }
    return 0;
}

int cmd_sensitivity_surface(const Options& options, double plow, int n_single,
                            double plow_min, double plow_max, double plow_step,
                            unsigned n_min, unsigned n_max, double offset) {
    std::vector<double> p_grid;
    std::vector<unsigned> n_grid;
    if (plow >= 0.0) {
        p_grid.push_back(plow);
    } else {
        if (!(plow_step > 0.0)) {
            throw hcprisk::DomainError("--plow-step must be positive");
        }
        for (double p = plow_min; p <= plow_max + 1e-12; p += plow_step) {
            p_grid.push_back(p);
        }
    }
    if (n_single > 0) {
        n_grid.push_back(static_cast<unsigned>(n_single));
    } else {
        if (n_min < 1 || n_max < n_min) {
            throw hcprisk::DomainError("surface needs 1 <= n-min <= n-max");
        }
        for (unsigned n = n_min; n <= n_max; ++n) n_grid.push_back(n);
    }

    const std::vector<hcprisk::SurfacePoint> points =
        hcprisk::response_surface(p_grid, n_grid, offset);
    if (options.format == "json") {
        json doc = json::array();
        for (const auto& pt : points) {
            doc.push_back({{"p_low", pt.p_low},
                           {"n", pt.n_contacts},
                           {"mean", pt.mean},
                           {"variance", pt.variance}});
        }
        emit(options, doc.dump(2) + "\n");
    } else {
        emit(options, hcprisk::surface_export(points));
    }
    return 0;
}

// ---------------------------------------------------------------------------
// fit / predict / cv

int cmd_fit(const Options& options, const std::string& data_path,
            const std::string& model_out, unsigned max_iter, double tol,
            double ridge) {
    const hcprisk::LabeledDataset data =
        hcprisk::io::parse_dataset(hcprisk::io::read_csv_file(data_path));
    hcprisk::FitConfig config;
    config.max_iter = max_iter;
    config.tol = tol;
    config.ridge = ridge;
    const hcprisk::FitResult fit = hcprisk::fit_logistic(data, config);
    hcprisk::io::save_model(fit.model, model_out);
    if (options.verbose) {
        std::cerr << "fit converged in " << fit.diagnostics.iterations
                  << " iterations\n";
    }

    const double model_aic = hcprisk::aic(fit.model, data);
    if (options.format == "json") {
        json doc = {{"model_file", model_out},
                    {"log_likelihood", fit.diagnostics.log_likelihood},
                    {"aic", model_aic},
                    {"iterations", fit.diagnostics.iterations},
                    {"converged", fit.diagnostics.converged},
                    {"std_errors", fit.diagnostics.std_errors}};
        emit(options, doc.dump(2) + "\n");
    } else {
        std::string text = "log_likelihood,aic,iterations,converged\n";
        text += format_g12(fit.diagnostics.log_likelihood) + "," +
                format_g12(model_aic) + "," +
                std::to_string(fit.diagnostics.iterations) + "," +
                (fit.diagnostics.converged ? "1" : "0") + "\n";
        emit(options, text);
    }
    return 0;
}

int cmd_predict(const Options& options, const std::string& model_path,
                const std::string& data_path,
                const std::vector<std::string>& assignments) {
    const hcprisk::LogisticModel model = hcprisk::io::load_model(model_path);

    if (!data_path.empty()) {
        const hcprisk::io::CsvTable table =
            hcprisk::io::read_csv_file(data_path);
        // Accept a plain covariate table or one with an extra outcome column.
        std::vector<std::string> names = table.header;
        std::optional<std::size_t> outcome_col;
        for (std::size_t c = 0; c < names.size(); ++c) {
            if (names[c] == "outcome") outcome_col = c;
        }
        std::vector<std::size_t> col_of;
        for (const std::string& name : model.schema.names) {
            bool found = false;
            for (std::size_t c = 0; c < names.size(); ++c) {
                if (names[c] == name) {
                    col_of.push_back(c);
                    found = true;
                }
            }
            if (!found) {
                throw hcprisk::ConfigError("data file lacks model covariate '" +
                                           name + "'");
            }
        }
        json json_rows = json::array();
        std::string text = "row,probability\n";
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            std::vector<double> z;
            for (std::size_t c : col_of) {
                z.push_back(hcprisk::io::parse_double(
                    table.rows[r][c],
                    table.source + ":" + std::to_string(table.line_numbers[r])));
            }
            const double p = hcprisk::predict_probability(model, z);
            if (options.format == "json") {
                json_rows.push_back({{"row", r}, {"probability", p}});
            } else {
                text += std::to_string(r) + "," + format_g12(p) + "\n";
            }
        }
        (void)outcome_col;
        emit(options, options.format == "json" ? json_rows.dump(2) + "\n" : text);
        return 0;
    }

    // No dataset: single prediction at all-zero covariates with overrides.
    std::vector<double> z(model.schema.names.size(), 0.0);
    for (const std::string& pair : assignments) {
        const std::size_t eq = pair.find('=');
        if (eq == std::string::npos) {
            throw hcprisk::ConfigError("--set expects name=value, got '" + pair +
                                       "'");
        }
        const std::string name = pair.substr(0, eq);
        bool found = false;
        for (std::size_t j = 0; j < model.schema.names.size(); ++j) {
            if (model.schema.names[j] == name) {
                z[j] = hcprisk::io::parse_double(pair.substr(eq + 1),
                                                 "--set " + name);
                found = true;
            }
        }
        if (!found) {
            throw hcprisk::ConfigError("model has no covariate '" + name + "'");
        }
    }
    const double p = hcprisk::predict_probability(model, z);
    if (options.format == "json") {
        emit(options, json{{"probability", p}}.dump(2) + "\n");
    } else {
        emit(options, "probability\n" + format_g12(p) + "\n");
    }
    return 0;
}

int cmd_cv(const Options& options, const std::string& data_path, unsigned k,
           double threshold, double ridge) {
    const hcprisk::LabeledDataset data =
        hcprisk::io::parse_dataset(hcprisk::io::read_csv_file(data_path));
    hcprisk::FitConfig config;
    config.ridge = ridge;
    const double accuracy =
        hcprisk::k_fold_cv(data, k, threshold, options.seed, config);
    if (options.format == "json") {
        emit(options, json{{"accuracy", accuracy},
                           {"k", k},
                           {"threshold", threshold},
                           {"seed", options.seed}}
                              .dump(2) +
                          "\n");
    } else {
        emit(options, "accuracy\n" + format_g12(accuracy) + "\n");
    }
    return 0;
}

// ---------------------------------------------------------------------------
// aggregate

int cmd_aggregate(const Options& options, const std::string& model_path,
                  const std::string& risks_csv,
                  const std::vector<std::string>& factor_pairs) {
    const hcprisk::io::NamedAggregationModel named =
        hcprisk::io::load_aggregation_model(model_path);

    std::vector<double> risks;
    if (!risks_csv.empty()) {
        std::istringstream in(risks_csv);
        std::string field;
        while (std::getline(in, field, ',')) {
            risks.push_back(hcprisk::io::parse_double(field, "--risks"));
        }
    }

    std::map<std::string, double> given;
    for (const std::string& pair : factor_pairs) {
        const std::size_t eq = pair.find('=');
        if (eq == std::string::npos) {
            throw hcprisk::ConfigError("--factor expects name=value, got '" +
                                       pair + "'");
        }
        given[pair.substr(0, eq)] = hcprisk::io::parse_double(
            pair.substr(eq + 1), "--factor " + pair.substr(0, eq));
    }
    std::vector<hcprisk::ControlFactor> factors;
    for (const std::string& name : named.factor_names) {
        const auto it = given.find(name);
        if (it == given.end()) {
            throw hcprisk::ConfigError("missing --factor value for '" + name +
                                       "'");
        }
        factors.push_back({name, it->second});
        given.erase(it);
    }
    if (!given.empty()) {
        throw hcprisk::ConfigError("factor '" + given.begin()->first +
                                   "' is not in the aggregation model");
    }

    const double risk = hcprisk::logistic_aggregate(risks, factors, named.model);
    if (options.format == "json") {
        emit(options, json{{"population_risk", risk}}.dump(2) + "\n");
    } else {
        emit(options, "population_risk\n" + format_g12(risk) + "\n");
    }
    return 0;
}

// ---------------------------------------------------------------------------
// bn

int cmd_bn(const Options& options, const std::string& network_path,
           const std::string& query, const std::vector<std::string>& evidence,
           bool outcome_query) {
    const hcprisk::BayesNetSpec spec = hcprisk::io::load_network(network_path);
    const hcprisk::BayesNet net = hcprisk::BayesNet::compile(spec);
    const hcprisk::Evidence parsed = parse_evidence(evidence);

    std::string node = query;
    if (outcome_query) {
        if (!spec.outcome.has_value()) {
            throw hcprisk::ConfigError("network declares no outcome node");
        }
        node = spec.outcome->node;
    }
    if (node.empty()) {
        throw hcprisk::ConfigError("bn needs --query NODE or --outcome");
    }

    const hcprisk::BayesNet::Posterior posterior =
        net.infer_posterior(node, parsed);
    if (options.format == "json") {
        json dist = json::object();
        for (std::size_t s = 0; s < posterior.states.size(); ++s) {
            dist[posterior.states[s]] = posterior.probabilities[s];
        }
        emit(options, json{{"node", node}, {"posterior", dist}}.dump(2) + "\n");
    } else {
        std::string text = "state,probability\n";
        for (std::size_t s = 0; s < posterior.states.size(); ++s) {
            text += posterior.states[s] + "," +
                    format_g12(posterior.probabilities[s]) + "\n";
        }
        emit(options, text);
    }
    return 0;
}

// ---------------------------------------------------------------------------
// mc validate

int cmd_mc_validate(const Options& options, std::uint64_t trials) {
    const std::vector<hcprisk::ValidationScenario> scenarios =
        hcprisk::bundled_validation_scenarios();
    bool all_passed = true;
    json json_rows = json::array();
    std::string text = "scenario,analytic,empirical,z,seeds,result\n";
    for (const auto& scenario : scenarios) {
        const hcprisk::ScenarioOutcome outcome =
            hcprisk::run_validation_scenario(scenario, trials, options.seed);
        all_passed &= outcome.passed;
        const std::string seeds =
            outcome.retried ? std::to_string(outcome.first_seed) + "+" +
                                  std::to_string(outcome.final_seed)
                            : std::to_string(outcome.first_seed);
        if (options.format == "json") {
            json_rows.push_back({{"scenario", outcome.name},
                                 {"analytic", outcome.analytic},
                                 {"empirical", outcome.empirical},
                                 {"z", outcome.z},
                                 {"first_seed", outcome.first_seed},
                                 {"final_seed", outcome.final_seed},
                                 {"retried", outcome.retried},
                                 {"passed", outcome.passed}});
        } else {
            text += outcome.name + "," + format_g12(outcome.analytic) + "," +
                    format_g12(outcome.empirical) + "," + format_g12(outcome.z) +
                    "," + seeds + "," + (outcome.passed ? "pass" : "FAIL") + "\n";
        }
    }
    emit(options,
         options.format == "json" ? json_rows.dump(2) + "\n" : text);
    if (!all_passed) {
        throw hcprisk::ModelError(
            "one or more simulation scenarios disagreed with the analytic"
            " value");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hcprisk — infection-risk estimation for healthcare personnel"};
    app.require_subcommand(1);
    Options options;

    // individual
    std::string contacts_path, model_path, windows_path, from, to;
    CLI::App* individual = app.add_subcommand(
        "individual", "Per-worker infection risk from a contact log");
    individual->add_option("--contacts", contacts_path, "Contacts CSV")
        ->required();
    individual->add_option("--model", model_path,
                           "Transmission model JSON for covariate rows");
    individual->add_option("--windows", windows_path, "Exposure windows CSV");
    individual->add_option("--from", from, "Window start (YYYY-MM-DDTHH:MM)");
    individual->add_option("--to", to, "Window end (YYYY-MM-DDTHH:MM)");
    add_common(individual, options);

    // tableiii
    std::string occupations_path;
    std::uint64_t n_contacts = 5;
    double phi = 20.0;
    CLI::App* tableiii = app.add_subcommand(
        "tableiii", "Occupational risk table (ORS, p_hat, PIR)");
    tableiii->add_option("--occupations", occupations_path, "Occupations CSV")
        ->required();
    tableiii->add_option("--n", n_contacts, "Number of contacts (default 5)");
    tableiii->add_option("--phi", phi, "Probability scaling (default 20)");
    add_common(tableiii, options);

    // tableiv
    std::string case_config;
    CLI::App* tableiv = app.add_subcommand(
        "tableiv", "Facility-level risk from a case-study config");
    tableiv->add_option("--config", case_config, "Case-study JSON")->required();
    add_common(tableiv, options);

    // sensitivity
    CLI::App* sensitivity =
        app.add_subcommand("sensitivity", "Sequence sensitivity analyses");
    sensitivity->require_subcommand(1);
    std::string levels = "0.01,0.05,0.1";
    unsigned enum_n = 2;
    CLI::App* enumerate = sensitivity->add_subcommand(
        "enumerate", "Exhaustive sequence listing with summary moments");
    enumerate->add_option("--levels", levels,
                          "Comma-separated level probabilities");
    enumerate->add_option("--n", enum_n, "Sequence length")->required();
    add_common(enumerate, options);

    double plow = -1.0;
    int n_single = 0;
    double plow_min = 0.01, plow_max = 0.5, plow_step = 0.01;
    unsigned n_min = 1, n_max = 12;
    double offset = 0.3;
    CLI::App* surface = sensitivity->add_subcommand(
        "surface", "Mean/variance response surface over (p_low, n)");
    surface->add_option("--plow", plow, "Single p_low instead of the grid");
    surface->add_option("--n", n_single, "Single n instead of the grid");
    surface->add_option("--plow-min", plow_min, "Grid start (default 0.01)");
    surface->add_option("--plow-max", plow_max, "Grid end (default 0.5)");
    surface->add_option("--plow-step", plow_step, "Grid step (default 0.01)");
    surface->add_option("--n-min", n_min, "Smallest n (default 1)");
    surface->add_option("--n-max", n_max, "Largest n (default 12)");
    surface->add_option("--offset", offset, "p_high - p_low (default 0.3)");
    add_common(surface, options);

    // fit / predict / cv
    std::string fit_data, fit_out;
    unsigned max_iter = 100;
    double tol = 1e-8, ridge = 0.0;
    CLI::App* fit = app.add_subcommand("fit", "Fit a transmission model");
    fit->add_option("--data", fit_data, "Training CSV with outcome column")
        ->required();
    fit->add_option("--model-out", fit_out, "Where to write the model JSON")
        ->required();
    fit->add_option("--max-iter", max_iter, "Newton iteration cap");
    fit->add_option("--tol", tol, "Score convergence tolerance");
    fit->add_option("--ridge", ridge, "Ridge penalty for separation rescue");
    add_common(fit, options);

    std::string predict_model, predict_data;
    std::vector<std::string> predict_set;
    CLI::App* predict =
        app.add_subcommand("predict", "Transmission probabilities from a model");
    predict->add_option("--model", predict_model, "Model JSON")->required();
    predict->add_option("--data", predict_data, "Covariate CSV (optional)");
    predict->add_option("--set", predict_set,
                        "name=value covariate overrides for a single row");
    add_common(predict, options);

    std::string cv_data;
    unsigned cv_k = 10;
    double cv_threshold = 0.5, cv_ridge = 0.0;
    CLI::App* cv = app.add_subcommand("cv", "k-fold cross-validated accuracy");
    cv->add_option("--data", cv_data, "Training CSV with outcome column")
        ->required();
    cv->add_option("--k", cv_k, "Fold count (default 10)");
    cv->add_option("--threshold", cv_threshold,
                   "Classification threshold (default 0.5)");
    cv->add_option("--ridge", cv_ridge, "Ridge penalty for separation rescue");
    add_common(cv, options);

    // aggregate
    std::string agg_model, agg_risks;
    std::vector<std::string> agg_factors;
    CLI::App* aggregate = app.add_subcommand(
        "aggregate", "Logistic facility-risk combiner over individual risks"
                     " and control factors");
    aggregate->add_option("--model", agg_model, "Aggregation-model JSON")
        ->required();
    aggregate->add_option("--risks", agg_risks,
                          "Comma-separated individual risks");
    aggregate->add_option("--factor", agg_factors, "name=value control factor");
    add_common(aggregate, options);

    // bn
    std::string network_path, query;
    std::vector<std::string> evidence;
    bool outcome_query = false;
    CLI::App* bn = app.add_subcommand("bn", "Bayesian-network posterior query");
    bn->add_option("--network", network_path, "Network JSON")->required();
    bn->add_option("--query", query, "Node to query");
    bn->add_option("--evidence", evidence, "node=state observations");
    bn->add_flag("--outcome", outcome_query,
                 "Query the declared outcome node");
    add_common(bn, options);

    // mc validate
    CLI::App* mc = app.add_subcommand("mc", "Monte Carlo utilities");
    mc->require_subcommand(1);
    std::uint64_t trials = 1'000'000;
    CLI::App* validate = mc->add_subcommand(
        "validate", "Compare simulations against analytic risks");
    validate->add_option("--trials", trials, "Trials per scenario");
    add_common(validate, options);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (individual->parsed()) {
            return cmd_individual(options, contacts_path, model_path,
                                  windows_path, from, to);
        }
        if (tableiii->parsed()) {
            return cmd_tableiii(options, occupations_path, n_contacts, phi);
        }
        if (tableiv->parsed()) return cmd_tableiv(options, case_config);
        if (sensitivity->parsed()) {
            if (enumerate->parsed()) {
                return cmd_sensitivity_enumerate(options, levels, enum_n);
            }
            return cmd_sensitivity_surface(options, plow, n_single, plow_min,
                                           plow_max, plow_step, n_min, n_max,
                                           offset);
        }
        if (fit->parsed()) {
            return cmd_fit(options, fit_data, fit_out, max_iter, tol, ridge);
        }
        if (predict->parsed()) {
            return cmd_predict(options, predict_model, predict_data, predict_set);
        }
        if (cv->parsed()) {
            return cmd_cv(options, cv_data, cv_k, cv_threshold, cv_ridge);
        }
        if (aggregate->parsed()) {
            return cmd_aggregate(options, agg_model, agg_risks, agg_factors);
        }
        if (bn->parsed()) {
            return cmd_bn(options, network_path, query, evidence, outcome_query);
        }
        if (mc->parsed() && validate->parsed()) {
            return cmd_mc_validate(options, trials);
        }
        std::cerr << "no subcommand selected\n";
        return 2;
    } catch (const hcprisk::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(e.category());
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}
