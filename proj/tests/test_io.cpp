#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hcprisk/io.hpp"

#include "hcprisk/errors.hpp"
#include "hcprisk/individual_risk.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace hcprisk;

namespace {

const std::string kDataDir = HCPRISK_DATA_DIR;

struct TempFile {
    std::filesystem::path path;
    explicit TempFile(const std::string& name, const std::string& contents) {
        path = std::filesystem::temp_directory_path() /
               ("hcprisk_test_" + name);
        std::ofstream out(path);
        out << contents;
    }
    ~TempFile() { std::filesystem::remove(path); }
};

}  // namespace

TEST_CASE("12-significant-digit formatting is stable under reparsing") {
    for (double v : {0.1065, 1.0 / 3.0, 5.99e-3, 0.0, 1.0, 123456.789}) {
        const std::string text = io::format_g12(v);
        const double back = io::parse_double(text, "test");
        CHECK(io::format_g12(back) == text);
    }
}

TEST_CASE("strict number parsing") {
    CHECK(io::parse_double("0.25", "f") == 0.25);
    CHECK_THROWS_AS(io::parse_double("0.25x", "f"), ParseError);
    CHECK_THROWS_AS(io::parse_double("", "f"), ParseError);
    CHECK(io::parse_unsigned("12", "f") == 12);
    CHECK_THROWS_AS(io::parse_unsigned("-3", "f"), ParseError);
    CHECK_THROWS_AS(io::parse_unsigned("3.5", "f"), ParseError);
}

TEST_CASE("iso minute timestamps round-trip") {
    const std::int64_t minutes = io::parse_minutes_iso("2020-04-01T08:30");
    CHECK(io::format_minutes_iso(minutes) == "2020-04-01T08:30");
    CHECK(io::parse_minutes_iso("1970-01-01T00:00") == 0);
    CHECK(io::parse_minutes_iso("1970-01-02T00:00") == 1440);
    CHECK(io::parse_minutes_iso("1969-12-31T23:59") == -1);
    CHECK(io::parse_minutes_iso("2020-02-29T00:00") ==
          io::parse_minutes_iso("2020-02-28T00:00") + 1440);
    CHECK(io::format_minutes_iso(-1) == "1969-12-31T23:59");
    CHECK(io::format_minutes_iso(1440) == "1970-01-02T00:00");
    // Seconds are accepted only when zero.
    CHECK(io::parse_minutes_iso("2020-04-01T08:30:00") == minutes);
    CHECK_THROWS_AS(io::parse_minutes_iso("2020-04-01T08:30:30"), ParseError);
    CHECK_THROWS_AS(io::parse_minutes_iso("2020-13-01T08:30"), ParseError);
    CHECK_THROWS_AS(io::parse_minutes_iso("2021-02-29T00:00"), ParseError);
    CHECK_THROWS_AS(io::parse_minutes_iso("not-a-time"), ParseError);
}

TEST_CASE("csv reading skips comments and tracks line numbers") {
    std::istringstream in("# leading note\na,b\n1,2\n\n# gap\n3,4\n");
    const io::CsvTable table = io::read_csv(in, "mem");
    CHECK(table.header == std::vector<std::string>{"a", "b"});
    REQUIRE(table.rows.size() == 2);
    CHECK(table.line_numbers[0] == 3);
    CHECK(table.line_numbers[1] == 6);
}

TEST_CASE("bundled contact demo parses and scores") {
    const io::CsvTable table =
        io::read_csv_file(kDataDir + "/three_contact_demo.csv");
    const std::vector<ContactSequence> sequences =
        io::parse_contacts(table, kMinTime, kMaxTime);
    REQUIRE(sequences.size() == 1);
    CHECK(sequences[0].hcp_id == "hcp-001");
    REQUIRE(sequences[0].events.size() == 3);
    CHECK(sequences[0].events[0].compartment == Compartment::exposed);
    CHECK(std::abs(individual_risk(sequences[0], nullptr, {}) - 0.1065) < 5e-5);
}

TEST_CASE("contact rows are grouped per worker and sorted by time") {
    TempFile file("contacts.csv",
                  "hcp_id,contact_id,compartment,start_time,duration_min,prob\n"
                  "w1,p1,IC,2020-04-01T12:00,10,0.1\n"
                  "w2,p2,HW,2020-04-01T09:00,10,0.2\n"
                  "w1,p3,IS,2020-04-01T08:00,10,0.3\n");
    const std::vector<ContactSequence> sequences =
        io::parse_contacts(io::read_csv_file(file.path.string()), kMinTime,
                           kMaxTime);
    REQUIRE(sequences.size() == 2);
    CHECK(sequences[0].hcp_id == "w1");  // first appearance order
    CHECK(sequences[0].events[0].contact_id == "p3");  // sorted by start
    CHECK(sequences[1].hcp_id == "w2");
}

TEST_CASE("contact parse errors carry the line number") {
    SUBCASE("unknown compartment") {
        TempFile file("bad_compartment.csv",
                      "hcp_id,contact_id,compartment,start_time,duration_min,prob\n"
                      "w1,p1,IC,2020-04-01T12:00,10,0.1\n"
                      "w1,p2,Q,2020-04-01T13:00,10,0.1\n");
        CHECK_THROWS_WITH_AS(
            io::parse_contacts(io::read_csv_file(file.path.string()), kMinTime,
                               kMaxTime),
            doctest::Contains(":3"), ParseError);
    }
    SUBCASE("row without any probability source") {
        TempFile file("no_source.csv",
                      "hcp_id,contact_id,compartment,start_time,duration_min,prob\n"
                      "w1,p1,IC,2020-04-01T12:00,10,\n");
        CHECK_THROWS_AS(io::parse_contacts(io::read_csv_file(file.path.string()),
                                           kMinTime, kMaxTime),
                        ParseError);
    }
    SUBCASE("partial covariate rows are rejected") {
        TempFile file("partial_cov.csv",
                      "hcp_id,contact_id,compartment,start_time,duration_min,prob,a,b\n"
                      "w1,p1,IC,2020-04-01T12:00,10,,0.5,\n");
        CHECK_THROWS_WITH_AS(
            io::parse_contacts(io::read_csv_file(file.path.string()), kMinTime,
                               kMaxTime),
            doctest::Contains("covariate"), ParseError);
    }
    SUBCASE("wrong field count") {
        TempFile file("short_row.csv",
                      "hcp_id,contact_id,compartment,start_time,duration_min,prob\n"
                      "w1,p1,IC\n");
        CHECK_THROWS_WITH_AS(
            io::parse_contacts(io::read_csv_file(file.path.string()), kMinTime,
                               kMaxTime),
            doctest::Contains("expected 6 fields"), ParseError);
    }
}

TEST_CASE("covariate contacts resolve through a model") {
    const io::CsvTable table =
        io::read_csv_file(kDataDir + "/contacts_covariates_demo.csv");
    const std::vector<ContactSequence> sequences =
        io::parse_contacts(table, kMinTime, kMaxTime);
    REQUIRE(sequences.size() == 2);
    const LogisticModel model =
        io::load_model(kDataDir + "/transmission_model_uk.json");
    const double risk = individual_risk(sequences[0], &model, {});
    CHECK(risk > 0.0);
    CHECK(risk < 1.0);
    // Without a model the covariate-only rows cannot be resolved.
    CHECK_THROWS_AS(individual_risk(sequences[0], nullptr, {}), ConfigError);
}

TEST_CASE("window files parse and reject inverted intervals") {
    const io::CsvTable table = io::read_csv_file(kDataDir + "/windows_demo.csv");
    const std::map<std::string, ExposureWindow> windows =
        io::parse_windows(table);
    CHECK(windows.size() == 3);
    CHECK(windows.count("patient-09") == 1);

    TempFile bad("bad_window.csv",
                 "person_id,admit_time,recovery_time\n"
                 "p1,2020-04-02T00:00,2020-04-01T00:00\n");
    CHECK_THROWS_AS(io::parse_windows(io::read_csv_file(bad.path.string())),
                    ParseError);
}

TEST_CASE("model files round-trip") {
    const LogisticModel model =
        io::load_model(kDataDir + "/transmission_model_uk.json");
    CHECK(model.schema.names.size() == 15);
    CHECK(model.intercept == -0.5953);
    CHECK(model.coefficients.size() == 15);

    const auto tmp =
        std::filesystem::temp_directory_path() / "hcprisk_model_roundtrip.json";
    io::save_model(model, tmp.string());
    const LogisticModel again = io::load_model(tmp.string());
    std::filesystem::remove(tmp);
    CHECK(again.schema.names == model.schema.names);
    CHECK(again.intercept == model.intercept);
    CHECK(again.coefficients == model.coefficients);
}

TEST_CASE("model files reject structural problems") {
    TempFile bad_version("bad_version.json",
                         R"({"format_version": 9, "schema": [], "intercept": 0,
                             "coefficients": []})");
    CHECK_THROWS_AS(io::load_model(bad_version.path.string()), ParseError);

    TempFile mismatched("mismatched.json",
                        R"({"format_version": 1, "schema": ["a"],
                            "intercept": 0, "coefficients": [1.0, 2.0]})");
    CHECK_THROWS_AS(io::load_model(mismatched.path.string()), ParseError);

    TempFile syntax("syntax.json", "{\n\"format_version\": 1,\n");
    CHECK_THROWS_WITH_AS(io::load_model(syntax.path.string()),
                         doctest::Contains(":3"), ParseError);
}

TEST_CASE("dataset parsing") {
    TempFile file("dataset.csv",
                  "z0,outcome,z1\n"
                  "0.5,1,2.0\n"
                  "0.25,0,1.0\n");
    const LabeledDataset data =
        io::parse_dataset(io::read_csv_file(file.path.string()));
    CHECK(data.schema.names == std::vector<std::string>{"z0", "z1"});
    REQUIRE(data.rows() == 2);
    CHECK(data.x == std::vector<double>{0.5, 2.0, 0.25, 1.0});
    CHECK(data.y[0] == 1);
    CHECK(data.y[1] == 0);

    TempFile bad("dataset_bad.csv", "z0,outcome\n0.5,2\n");
    CHECK_THROWS_AS(io::parse_dataset(io::read_csv_file(bad.path.string())),
                    ParseError);
    TempFile missing("dataset_missing.csv", "z0,z1\n0.5,1\n");
    CHECK_THROWS_AS(io::parse_dataset(io::read_csv_file(missing.path.string())),
                    ParseError);
}

TEST_CASE("case-study config surfaces variable-level errors") {
    TempFile bad("case_bad.json",
                 R"({"facilities": [{"name": "X", "variables": {
                      "SOH_time": {"expectation": 0.001},
                      "CS": {},
                      "PPE_SL": {"expectation": 0.001},
                      "ORS": {"expectation": 0.001}}}]})");
    CHECK_THROWS_WITH_AS(io::load_case_study(bad.path.string()),
                         doctest::Contains("CS"), ParseError);
}

TEST_CASE("aggregation-model files load and are validated") {
    const io::NamedAggregationModel named =
        io::load_aggregation_model(kDataDir + "/aggregation_model_demo.json");
    CHECK(named.model.alpha.size() == 3);
    CHECK(named.factor_names ==
          std::vector<std::string>{"ventilation", "ppe_training"});
    CHECK(named.model.tau == 1.0);

    TempFile bad("agg_bad.json", R"({"alpha": [1.0], "factors": ["a"],
                                     "w": [], "tau": 1.0})");
    CHECK_THROWS_AS(io::load_aggregation_model(bad.path.string()), ParseError);
    TempFile bad_tau("agg_tau.json", R"({"alpha": [1.0], "tau": 0.0})");
    CHECK_THROWS_AS(io::load_aggregation_model(bad_tau.path.string()),
                    ParseError);
}

TEST_CASE("network loader reports json syntax with a line number") {
    CHECK_THROWS_WITH_AS(
        io::load_network(kDataDir + "/malformed_nets/20_truncated_syntax.json"),
        doctest::Contains("20_truncated_syntax.json"), ParseError);
}
