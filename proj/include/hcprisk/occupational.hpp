#pragma once

#include <string>
#include <vector>

namespace hcprisk {

// O*Net-style occupation descriptors: contact-with-others, physical
// proximity and exposure-to-infection scores on [0,100], plus weekly hours.
struct OccupationProfile {
    std::string name;
    double co = 0.0;
    double pp = 0.0;
    double ei = 0.0;
    double hours_per_week = 0.0;
};

struct OrsConfig {
    double phi = 20.0;  // probability scaling; must be >= 1 so p_hat <= 1
};

struct OrsScore {
    std::string name;
    double score = 0.0;
};

struct OrsProbability {
    std::string name;
    double p_hat = 0.0;
};

struct OccupationRiskRow {
    std::string name;
    double ors = 0.0;
    double p_hat = 0.0;
    double pir = 0.0;
};

// ORS = mean(co, pp, ei) * hours / max(hours); input order is preserved.
std::vector<OrsScore> ors_scores(const std::vector<OccupationProfile>& profiles);

// p_hat = ORS / (phi * max ORS); the top-scoring occupation gets 1/phi.
// Invariant under rescaling all scores by a positive constant.
std::vector<OrsProbability> transmission_prob_from_ors(
    const std::vector<OrsScore>& scores, const OrsConfig& config);

// Full case-study table: ORS, p_hat, and the n-contact geometric risk.
std::vector<OccupationRiskRow> occupation_case_study(
    const std::vector<OccupationProfile>& profiles, std::uint64_t n_contacts,
    const OrsConfig& config);

std::vector<OccupationRiskRow> occupation_case_study_from_scores(
    const std::vector<OrsScore>& scores, std::uint64_t n_contacts,
    const OrsConfig& config);

}  // namespace hcprisk
