#include "hcprisk/io.hpp"

#include "hcprisk/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace hcprisk::io {

using nlohmann::json;

std::string format_g12(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.12g", value);
    return buffer;
}

double parse_double(const std::string& text, const std::string& context) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument("trailing text");
        return v;
    } catch (const std::exception&) {
        throw ParseError(context + ": '" + text + "' is not a number");
    }
}

std::uint64_t parse_unsigned(const std::string& text, const std::string& context) {
    try {
        std::size_t pos = 0;
        if (!text.empty() && text[0] == '-') throw std::invalid_argument("sign");
        const unsigned long long v = std::stoull(text, &pos);
        if (pos != text.size()) throw std::invalid_argument("trailing text");
        return v;
    } catch (const std::exception&) {
        throw ParseError(context + ": '" + text +
                         "' is not a nonnegative integer");
    }
}

namespace {

// Civil-date conversion (Howard Hinnant's algorithm), days since 1970-01-01.
std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y = static_cast<int>(yy + (m <= 2));
}

bool leap(int y) { return y % 4 == 0 && (y % 100 != 0 || y % 400 == 0); }

unsigned days_in_month(int y, unsigned m) {
    static constexpr unsigned lengths[12] = {31, 28, 31, 30, 31, 30,
                                             31, 31, 30, 31, 30, 31};
    if (m == 2 && leap(y)) return 29;
    return lengths[m - 1];
}

std::string trim(const std::string& s) {
    std::size_t begin = 0;
    std::size_t end = s.size();
    while (begin < end && (s[begin] == ' ' || s[begin] == '\t')) ++begin;
    while (end > begin && (s[end - 1] == ' ' || s[end - 1] == '\t' ||
                           s[end - 1] == '\r')) {
        --end;
    }
    return s.substr(begin, end - begin);
}

}  // namespace

std::int64_t parse_minutes_iso(const std::string& text) {
    int y = 0;
    unsigned mo = 0, d = 0, h = 0, mi = 0, s = 0;
    int consumed = 0;
    const int got = std::sscanf(text.c_str(), "%d-%2u-%2uT%2u:%2u%n", &y, &mo,
                                &d, &h, &mi, &consumed);
    if (got != 5) {
        throw ParseError("'" + text +
                         "' is not an ISO-8601 minute timestamp"
                         " (expected YYYY-MM-DDTHH:MM)");
    }
    std::string rest = text.substr(static_cast<std::size_t>(consumed));
    if (!rest.empty()) {
        int tail = 0;
        if (std::sscanf(rest.c_str(), ":%2u%n", &s, &tail) != 1 ||
            rest.substr(static_cast<std::size_t>(tail)) != "" || s != 0) {
            throw ParseError("'" + text +
                             "' has sub-minute detail; timestamps are"
                             " minute-resolution");
        }
    }
    if (mo < 1 || mo > 12 || d < 1 || d > days_in_month(y, mo) || h > 23 ||
        mi > 59) {
        throw ParseError("'" + text + "' is not a valid calendar timestamp");
    }
    return days_from_civil(y, mo, d) * 1440 + static_cast<std::int64_t>(h) * 60 +
           static_cast<std::int64_t>(mi);
}

std::string format_minutes_iso(std::int64_t minutes) {
    std::int64_t days = minutes / 1440;
    std::int64_t rem = minutes % 1440;
    if (rem < 0) {
        rem += 1440;
        --days;
    }
    int y = 0;
    unsigned mo = 0, d = 0;
    civil_from_days(days, y, mo, d);
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%04d-%02u-%02uT%02lld:%02lld", y, mo,
                  d, static_cast<long long>(rem / 60),
                  static_cast<long long>(rem % 60));
    return buffer;
}

CsvTable read_csv(std::istream& in, const std::string& source_name) {
    CsvTable table;
    table.source = source_name;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        std::vector<std::string> fields;
        std::istringstream fs(line);
        std::string field;
        while (std::getline(fs, field, ',')) fields.push_back(trim(field));
        if (!line.empty() && line.back() == ',') fields.emplace_back();
        if (!have_header) {
            table.header = std::move(fields);
            have_header = true;
        } else {
            table.rows.push_back(std::move(fields));
            table.line_numbers.push_back(line_no);
        }
    }
    if (!have_header) {
        throw ParseError(source_name + ": missing header row");
    }
    return table;
}

CsvTable read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    return read_csv(in, path);
}

namespace {

std::string row_context(const CsvTable& table, std::size_t row) {
    return table.source + ":" + std::to_string(table.line_numbers[row]);
}

void require_columns(const CsvTable& table,
                     const std::vector<std::string>& expected) {
    for (std::size_t i = 0; i < expected.size(); ++i) {
        if (i >= table.header.size() || table.header[i] != expected[i]) {
            std::string want;
            for (const std::string& name : expected) {
                if (!want.empty()) want += ',';
                want += name;
            }
            throw ParseError(table.source + ": header must begin '" + want +
                             "'");
        }
    }
}

void require_width(const CsvTable& table, std::size_t row) {
    if (table.rows[row].size() != table.header.size()) {
        throw ParseError(row_context(table, row) + ": expected " +
                         std::to_string(table.header.size()) + " fields, got " +
                         std::to_string(table.rows[row].size()));
    }
}

}  // namespace

std::vector<ContactSequence> parse_contacts(const CsvTable& table,
                                            std::int64_t t1, std::int64_t t2) {
    require_columns(table, {"hcp_id", "contact_id", "compartment", "start_time",
                            "duration_min", "prob"});
    const std::vector<std::string> covariate_names(table.header.begin() + 6,
                                                   table.header.end());

    std::vector<ContactSequence> sequences;
    std::map<std::string, std::size_t> by_id;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        require_width(table, r);
        const std::vector<std::string>& row = table.rows[r];
        const std::string context = row_context(table, r);

        if (row[0].empty()) throw ParseError(context + ": empty hcp_id");
        ContactEvent event;
        event.contact_id = row[1];
        const auto compartment = compartment_from_string(row[2]);
        if (!compartment.has_value()) {
            throw ParseError(context + ": unknown compartment '" + row[2] +
                             "' (expected E, IC, IS or HW)");
        }
        event.compartment = *compartment;
        try {
            event.start_min = parse_minutes_iso(row[3]);
        } catch (const ParseError& e) {
            throw ParseError(context + ": " + e.what());
        }
        event.duration_min = static_cast<std::int64_t>(
            parse_unsigned(row[4], context + ": duration_min"));

        bool have_source = false;
        if (!row[5].empty()) {
            event.transmission_prob =
                parse_double(row[5], context + ": prob");
            have_source = true;
        }
        bool any_covariate = false;
        bool all_covariates = !covariate_names.empty();
        for (std::size_t c = 0; c < covariate_names.size(); ++c) {
            const std::string& cell = row[6 + c];
            if (cell.empty()) {
                all_covariates = false;
                continue;
            }
            any_covariate = true;
            event.covariates[covariate_names[c]] =
                parse_double(cell, context + ": " + covariate_names[c]);
        }
        if (any_covariate && !all_covariates) {
            throw ParseError(context +
                             ": covariate columns must be all filled or all"
                             " empty");
        }
        if (!have_source && !any_covariate) {
            throw ParseError(context +
                             ": row needs a prob or covariate values");
        }

        const std::string& hcp = row[0];
        auto it = by_id.find(hcp);
        if (it == by_id.end()) {
            it = by_id.emplace(hcp, sequences.size()).first;
            ContactSequence seq;
            seq.hcp_id = hcp;
            seq.t1 = t1;
            seq.t2 = t2;
            sequences.push_back(std::move(seq));
        }
        sequences[it->second].events.push_back(std::move(event));
    }
    for (ContactSequence& seq : sequences) {
        std::stable_sort(seq.events.begin(), seq.events.end(),
                         [](const ContactEvent& a, const ContactEvent& b) {
                             return a.start_min < b.start_min;
                         });
    }
    return sequences;
}

std::map<std::string, ExposureWindow> parse_windows(const CsvTable& table) {
    require_columns(table, {"person_id", "admit_time", "recovery_time"});
    std::map<std::string, ExposureWindow> windows;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        require_width(table, r);
        const std::vector<std::string>& row = table.rows[r];
        const std::string context = row_context(table, r);
        ExposureWindow window;
        try {
            window.admit_min = parse_minutes_iso(row[1]);
            window.recovery_min = parse_minutes_iso(row[2]);
        } catch (const ParseError& e) {
            throw ParseError(context + ": " + e.what());
        }
        if (window.admit_min > window.recovery_min) {
            throw ParseError(context + ": admit_time is after recovery_time");
        }
        if (!windows.emplace(row[0], window).second) {
            throw ParseError(context + ": duplicate window for '" + row[0] +
                             "'");
        }
    }
    return windows;
}

std::vector<OccupationProfile> parse_occupations(const CsvTable& table) {
    require_columns(table, {"name", "co", "pp", "ei", "hours_per_week"});
    std::vector<OccupationProfile> profiles;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        require_width(table, r);
        const std::vector<std::string>& row = table.rows[r];
        const std::string context = row_context(table, r);
        OccupationProfile p;
        p.name = row[0];
        p.co = parse_double(row[1], context + ": co");
        p.pp = parse_double(row[2], context + ": pp");
        p.ei = parse_double(row[3], context + ": ei");
        p.hours_per_week = parse_double(row[4], context + ": hours_per_week");
        profiles.push_back(std::move(p));
    }
    return profiles;
}

LabeledDataset parse_dataset(const CsvTable& table) {
    const auto outcome_it =
        std::find(table.header.begin(), table.header.end(), "outcome");
    if (outcome_it == table.header.end()) {
        throw ParseError(table.source + ": dataset needs an 'outcome' column");
    }
    const std::size_t outcome_col =
        static_cast<std::size_t>(outcome_it - table.header.begin());

    LabeledDataset data;
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        if (c != outcome_col) data.schema.names.push_back(table.header[c]);
    }
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        require_width(table, r);
        const std::vector<std::string>& row = table.rows[r];
        const std::string context = row_context(table, r);
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c == outcome_col) continue;
            data.x.push_back(
                parse_double(row[c], context + ": " + table.header[c]));
        }
        const std::string& outcome = row[outcome_col];
        if (outcome != "0" && outcome != "1") {
            throw ParseError(context + ": outcome must be 0 or 1");
        }
        data.y.push_back(outcome == "1" ? 1 : 0);
    }
    return data;
}

namespace {

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    const std::string text{std::istreambuf_iterator<char>(in),
                           std::istreambuf_iterator<char>()};
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        // Convert the byte offset to a line number for the message.
        std::size_t line = 1;
        for (std::size_t i = 0; i < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') ++line;
        }
        throw ParseError(path + ":" + std::to_string(line) + ": " + e.what());
    }
}

double json_number(const json& j, const std::string& context) {
    if (!j.is_number()) throw ParseError(context + " must be a number");
    return j.get<double>();
}

std::string json_string(const json& j, const std::string& context) {
    if (!j.is_string()) throw ParseError(context + " must be a string");
    return j.get<std::string>();
}

}  // namespace

LogisticModel load_model(const std::string& path) {
    const json doc = load_json_file(path);
    if (!doc.is_object()) throw ParseError(path + ": model must be an object");
    if (!doc.contains("format_version") ||
        !doc["format_version"].is_number_integer() ||
        doc["format_version"].get<int>() != 1) {
        throw ParseError(path + ": unsupported or missing format_version"
                         " (expected 1)");
    }
    if (!doc.contains("schema") || !doc["schema"].is_array()) {
        throw ParseError(path + ": missing 'schema' array");
    }
    if (!doc.contains("coefficients") || !doc["coefficients"].is_array()) {
        throw ParseError(path + ": missing 'coefficients' array");
    }
    LogisticModel model;
    model.intercept = json_number(doc.value("intercept", json()), path + ": intercept");
    std::set<std::string> seen;
    for (const json& name : doc["schema"]) {
        model.schema.names.push_back(json_string(name, path + ": schema entry"));
        if (!seen.insert(model.schema.names.back()).second) {
            throw ParseError(path + ": duplicate schema name '" +
                             model.schema.names.back() + "'");
        }
    }
    for (const json& c : doc["coefficients"]) {
        model.coefficients.push_back(json_number(c, path + ": coefficient"));
    }
    if (model.coefficients.size() != model.schema.names.size()) {
        throw ParseError(path + ": schema and coefficients differ in length");
    }
    return model;
}

void save_model(const LogisticModel& model, const std::string& path) {
    json doc;
    doc["format_version"] = 1;
    doc["schema"] = model.schema.names;
    doc["intercept"] = model.intercept;
    doc["coefficients"] = model.coefficients;
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write '" + path + "'");
    out << doc.dump(2) << '\n';
}

std::vector<FacilityCaseStudy> load_case_study(const std::string& path) {
    const json doc = load_json_file(path);
    if (!doc.is_object() || !doc.contains("facilities") ||
        !doc["facilities"].is_array()) {
        throw ParseError(path + ": expected an object with a 'facilities'"
                         " array");
    }
    std::vector<FacilityCaseStudy> facilities;
    for (const json& jf : doc["facilities"]) {
        FacilityCaseStudy facility;
        facility.name = json_string(jf.value("name", json()), path + ": facility name");
        if (!jf.contains("variables") || !jf["variables"].is_object()) {
            throw ParseError(path + ": facility '" + facility.name +
                             "' needs a 'variables' object");
        }
        for (const auto& [var_name, jv] : jf["variables"].items()) {
            const std::string context =
                path + ": " + facility.name + "/" + var_name;
            CaseStudyVariable variable;
            if (jv.contains("expectation")) {
                variable.expectation = json_number(jv["expectation"], context);
            } else if (jv.contains("mixture")) {
                const json& jm = jv["mixture"];
                if (!jm.is_array()) {
                    throw ParseError(context + ": 'mixture' must be an array");
                }
                FeatureMixture mixture;
                mixture.variable_name = var_name;
                for (const json& jb : jm) {
                    MixtureBin bin;
                    bin.label = json_string(jb.value("label", json()),
                                            context + ": bin label");
                    bin.p = json_number(jb.value("p", json()), context + ": p");
                    bin.conditional_risk =
                        json_number(jb.value("conditional_pir", json()),
                                    context + ": conditional_pir");
                    mixture.bins.push_back(std::move(bin));
                }
                variable.mixture = std::move(mixture);
            } else if (jv.contains("ppe_adjusted")) {
                const json& jp = jv["ppe_adjusted"];
                CaseStudyVariable::PpeAdjusted adjusted;
                adjusted.reference_expectation = json_number(
                    jp.value("reference_expectation", json()),
                    context + ": reference_expectation");
                adjusted.reference_sufficiency = json_number(
                    jp.value("reference_sufficiency", json()),
                    context + ": reference_sufficiency");
                adjusted.target_sufficiency =
                    json_number(jp.value("target_sufficiency", json()),
                                context + ": target_sufficiency");
                variable.ppe_adjusted = adjusted;
            } else {
                throw ParseError(context +
                                 ": variable needs 'expectation', 'mixture' or"
                                 " 'ppe_adjusted'");
            }
            facility.variables.emplace(var_name, std::move(variable));
        }
        facilities.push_back(std::move(facility));
    }
    return facilities;
}

NamedAggregationModel load_aggregation_model(const std::string& path) {
    const json doc = load_json_file(path);
    if (!doc.is_object()) {
        throw ParseError(path + ": aggregation model must be an object");
    }
    NamedAggregationModel named;
    if (!doc.contains("alpha") || !doc["alpha"].is_array()) {
        throw ParseError(path + ": missing 'alpha' array");
    }
    for (const json& a : doc["alpha"]) {
        named.model.alpha.push_back(json_number(a, path + ": alpha entry"));
    }
    if (doc.contains("factors")) {
        if (!doc["factors"].is_array()) {
            throw ParseError(path + ": 'factors' must be an array of names");
        }
        for (const json& f : doc["factors"]) {
            named.factor_names.push_back(json_string(f, path + ": factor name"));
        }
    }
    if (doc.contains("w")) {
        if (!doc["w"].is_array()) {
            throw ParseError(path + ": 'w' must be an array");
        }
        for (const json& w : doc["w"]) {
            named.model.w.push_back(json_number(w, path + ": w entry"));
        }
    }
    if (named.model.w.size() != named.factor_names.size()) {
        throw ParseError(path + ": 'w' and 'factors' differ in length");
    }
    named.model.bias = json_number(doc.value("bias", json(0.0)), path + ": bias");
    named.model.tau = json_number(doc.value("tau", json(1.0)), path + ": tau");
    if (!(named.model.tau > 0.0)) {
        throw ParseError(path + ": tau must be positive");
    }
    return named;
}

BayesNetSpec load_network(const std::string& path) {
    const json doc = load_json_file(path);
    if (!doc.is_object()) {
        throw ParseError(path + ": network must be an object");
    }
    if (!doc.contains("nodes") || !doc["nodes"].is_array()) {
        throw ParseError(path + ": missing 'nodes' array");
    }
    if (!doc.contains("cpts") || !doc["cpts"].is_array()) {
        throw ParseError(path + ": missing 'cpts' array");
    }
    BayesNetSpec spec;
    for (const json& jn : doc["nodes"]) {
        NetworkNode node;
        node.name = json_string(jn.value("name", json()), path + ": node name");
        if (!jn.contains("states") || !jn["states"].is_array()) {
            throw ParseError(path + ": node '" + node.name +
                             "' needs a 'states' array");
        }
        for (const json& js : jn["states"]) {
            node.states.push_back(
                json_string(js, path + ": state of '" + node.name + "'"));
        }
        if (jn.contains("parents")) {
            if (!jn["parents"].is_array()) {
                throw ParseError(path + ": parents of '" + node.name +
                                 "' must be an array");
            }
            for (const json& jp : jn["parents"]) {
                node.parents.push_back(
                    json_string(jp, path + ": parent of '" + node.name + "'"));
            }
        }
        spec.nodes.push_back(std::move(node));
    }
    for (const json& jc : doc["cpts"]) {
        Cpt cpt;
        cpt.node = json_string(jc.value("node", json()), path + ": cpt node");
        if (!jc.contains("rows") || !jc["rows"].is_array()) {
            throw ParseError(path + ": CPT for '" + cpt.node +
                             "' needs a 'rows' array");
        }
        for (const json& jr : jc["rows"]) {
            if (!jr.is_array()) {
                throw ParseError(path + ": CPT rows for '" + cpt.node +
                                 "' must be arrays");
            }
            std::vector<double> row;
            for (const json& jv : jr) {
                row.push_back(
                    json_number(jv, path + ": CPT entry of '" + cpt.node + "'"));
            }
            cpt.rows.push_back(std::move(row));
        }
        spec.cpts.push_back(std::move(cpt));
    }
    if (doc.contains("outcome")) {
        if (!doc["outcome"].is_object()) {
            throw ParseError(path + ": 'outcome' must be an object");
        }
        OutcomeSpec outcome;
        outcome.node = json_string(doc["outcome"].value("node", json()),
                                   path + ": outcome node");
        outcome.state = json_string(doc["outcome"].value("state", json()),
                                    path + ": outcome state");
        spec.outcome = std::move(outcome);
    }
    return spec;
}

}  // namespace hcprisk::io
