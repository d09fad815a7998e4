#include "hcprisk/occupational.hpp"

#include "hcprisk/errors.hpp"
#include "hcprisk/individual_risk.hpp"

#include <algorithm>
#include <string>

namespace hcprisk {
namespace {

void check_profile(const OccupationProfile& p) {
    auto in_range = [](double v) { return v >= 0.0 && v <= 100.0; };
    if (!in_range(p.co) || !in_range(p.pp) || !in_range(p.ei)) {
        throw DomainError("occupation '" + p.name +
                          "' has a score outside [0,100]");
    }
    if (!(p.hours_per_week > 0.0)) {
        throw DomainError("occupation '" + p.name +
                          "' must report positive weekly hours");
    }
}

}  // namespace

std::vector<OrsScore> ors_scores(const std::vector<OccupationProfile>& profiles) {
    if (profiles.empty()) throw DomainError("no occupation profiles given");
    double max_hours = 0.0;
    for (const OccupationProfile& p : profiles) {
        check_profile(p);
        max_hours = std::max(max_hours, p.hours_per_week);
    }
    std::vector<OrsScore> scores;
    scores.reserve(profiles.size());
    for (const OccupationProfile& p : profiles) {
        const double mean_score = (p.co + p.pp + p.ei) / 3.0;
        scores.push_back({p.name, mean_score * p.hours_per_week / max_hours});
    }
    return scores;
}

std::vector<OrsProbability> transmission_prob_from_ors(
    const std::vector<OrsScore>& scores, const OrsConfig& config) {
    if (scores.empty()) throw DomainError("no ORS scores given");
    if (!(config.phi >= 1.0)) {
        throw DomainError("phi must be at least 1 so the top occupation maps"
                          " to a probability");
    }
    double max_score = 0.0;
    for (const OrsScore& s : scores) {
        if (!(s.score > 0.0)) {
            throw DomainError("ORS score for '" + s.name +
                              "' must be positive");
        }
        max_score = std::max(max_score, s.score);
    }
    std::vector<OrsProbability> probs;
    probs.reserve(scores.size());
    for (const OrsScore& s : scores) {
        probs.push_back({s.name, s.score / (config.phi * max_score)});
    }
    return probs;
}

std::vector<OccupationRiskRow> occupation_case_study_from_scores(
    const std::vector<OrsScore>& scores, std::uint64_t n_contacts,
    const OrsConfig& config) {
    const std::vector<OrsProbability> probs =
        transmission_prob_from_ors(scores, config);
    std::vector<OccupationRiskRow> rows;
    rows.reserve(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        OccupationRiskRow row;
        row.name = scores[i].name;
        row.ors = scores[i].score;
        row.p_hat = probs[i].p_hat;
        row.pir = geometric_risk(row.p_hat, n_contacts);
        rows.push_back(row);
    }
    return rows;
}

std::vector<OccupationRiskRow> occupation_case_study(
    const std::vector<OccupationProfile>& profiles, std::uint64_t n_contacts,
    const OrsConfig& config) {
    return occupation_case_study_from_scores(ors_scores(profiles), n_contacts,
                                             config);
}

}  // namespace hcprisk
