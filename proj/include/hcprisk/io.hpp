#pragma once

#include "hcprisk/bayes_net.hpp"
#include "hcprisk/contacts.hpp"
#include "hcprisk/occupational.hpp"
#include "hcprisk/population.hpp"
#include "hcprisk/transmission.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace hcprisk::io {

// Locale-independent serialisation at 12 significant digits.
std::string format_g12(double value);

// Strict numeric parsing: the whole field must be consumed.
double parse_double(const std::string& text, const std::string& context);
std::uint64_t parse_unsigned(const std::string& text, const std::string& context);

// Minutes since the Unix epoch <-> ISO-8601 at minute resolution
// (YYYY-MM-DDTHH:MM, optional :00 seconds).
std::int64_t parse_minutes_iso(const std::string& text);
std::string format_minutes_iso(std::int64_t minutes);

// Comma-separated tables; no quoting, fields are trimmed of spaces.
struct CsvTable {
    std::string source;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;  // 1-based, aligned with rows
};

CsvTable read_csv(std::istream& in, const std::string& source_name);
CsvTable read_csv_file(const std::string& path);

// contacts CSV: hcp_id,contact_id,compartment,start_time,duration_min,prob
// followed by optional covariate columns. Each row must fill `prob` or every
// covariate column. Sequences come back in first-appearance order with
// events stably sorted by start time.
std::vector<ContactSequence> parse_contacts(const CsvTable& table,
                                            std::int64_t t1, std::int64_t t2);

// windows CSV: person_id,admit_time,recovery_time
std::map<std::string, ExposureWindow> parse_windows(const CsvTable& table);

// occupations CSV: name,co,pp,ei,hours_per_week
std::vector<OccupationProfile> parse_occupations(const CsvTable& table);

// dataset CSV: covariate columns plus a 0/1 `outcome` column.
LabeledDataset parse_dataset(const CsvTable& table);

// Model file: {"format_version":1,"schema":[...],"intercept":x,
//              "coefficients":[...]}
LogisticModel load_model(const std::string& path);
void save_model(const LogisticModel& model, const std::string& path);

// Two-facility case-study configuration; see data/case_study_tx_ca.json.
std::vector<FacilityCaseStudy> load_case_study(const std::string& path);

// Aggregation-model file: {"alpha":[...], "factors":[names...],
//                          "w":[...], "bias":b, "tau":t}
struct NamedAggregationModel {
    AggregationModel model;
    std::vector<std::string> factor_names;  // aligned with model.w
};
NamedAggregationModel load_aggregation_model(const std::string& path);

// Network file: {"nodes":[{name,states,parents}],
//                "cpts":[{node,rows:[[...]]}],"outcome":{node,state}}
BayesNetSpec load_network(const std::string& path);

}  // namespace hcprisk::io
