#include "hcprisk/individual_risk.hpp"

#include "hcprisk/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hcprisk {

const char* to_string(Compartment c) {
    switch (c) {
        case Compartment::exposed: return "E";
        case Compartment::infection_confirmed: return "IC";
        case Compartment::infection_suspected: return "IS";
        case Compartment::coworker: return "HW";
    }
    return "?";
}

std::optional<Compartment> compartment_from_string(const std::string& text) {
    if (text == "E") return Compartment::exposed;
    if (text == "IC") return Compartment::infection_confirmed;
    if (text == "IS") return Compartment::infection_suspected;
    if (text == "HW") return Compartment::coworker;
    return std::nullopt;
}

CompartmentCounts count_compartments(const ContactSequence& seq) {
    CompartmentCounts c;
    for (const ContactEvent& e : seq.events) {
        switch (e.compartment) {
            case Compartment::exposed: ++c.exposed; break;
            case Compartment::infection_confirmed: ++c.infection_confirmed; break;
            case Compartment::infection_suspected: ++c.infection_suspected; break;
            case Compartment::coworker: ++c.coworker; break;
        }
    }
    return c;
}

namespace {

void require_probability(double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw DomainError(std::string(what) + " outside [0,1]: " +
                          std::to_string(p));
    }
}

}  // namespace

double first_success_risk(std::span<const double> probs) {
    for (double p : probs) require_probability(p, "contact probability");
    double risk = 0.0;
    double survival = 1.0;
    for (double p : probs) {
        risk += survival * p;
        survival *= 1.0 - p;
    }
    return std::clamp(risk, 0.0, 1.0);
}

double geometric_risk(double p, std::uint64_t n_contacts) {
    require_probability(p, "contact probability");
    if (n_contacts == 0) return 0.0;
    if (n_contacts == 1) return p;  // 1 - (1 - p) would round
    return std::clamp(
        1.0 - std::pow(1.0 - p, static_cast<double>(n_contacts)), 0.0, 1.0);
}

std::optional<ContactEvent> clip_to_exposure_window(const ContactEvent& event,
                                                    const ExposureWindow& window,
                                                    std::int64_t t1,
                                                    std::int64_t t2) {
    if (window.admit_min > window.recovery_min) {
        throw DomainError("exposure window with admit after recovery");
    }
    if (t1 > t2) throw DomainError("evaluation window with t1 > t2");

    const std::int64_t lo = std::max(t1, window.admit_min);
    const std::int64_t hi = std::min(t2, window.recovery_min);
    const std::int64_t start = std::max(event.start_min, lo);
    const std::int64_t end = std::min(event.end_min(), hi);
    if (start > end) return std::nullopt;

    ContactEvent clipped = event;
    clipped.start_min = start;
    clipped.duration_min = end - start;
    return clipped;
}

double cumulative_hazard(std::span<const HazardSegment> timeline, double t) {
    if (t <= 0.0) return 0.0;
    double total = 0.0;
    double clock = 0.0;
    for (const HazardSegment& seg : timeline) {
        if (clock >= t) break;
        const double take = std::min(seg.length_min, t - clock);
        total += seg.rate_per_min * take;
        clock += seg.length_min;
    }
    return total;
}

double hazard_risk(std::span<const HazardSegment> timeline, double t1, double t2) {
    for (const HazardSegment& seg : timeline) {
        if (!(seg.rate_per_min >= 0.0)) {
            throw DomainError("negative hazard rate");
        }
        if (!(seg.length_min >= 0.0)) {
            throw DomainError("negative hazard segment length");
        }
    }
    if (t1 > t2) throw DomainError("hazard window with t1 > t2");

    const double survival_t1 = std::exp(-cumulative_hazard(timeline, t1));
    const double survival_t2 = std::exp(-cumulative_hazard(timeline, t2));
    return std::clamp(survival_t1 - survival_t2, 0.0, 1.0);
}

double hazard_risk(const std::vector<std::vector<HazardSegment>>& contacts,
                   double t1, double t2) {
    std::vector<HazardSegment> timeline;
    for (const auto& contact : contacts) {
        timeline.insert(timeline.end(), contact.begin(), contact.end());
    }
    return hazard_risk(std::span<const HazardSegment>(timeline), t1, t2);
}

double resolve_event_probability(const ContactEvent& event,
                                 const LogisticModel* model) {
    if (event.transmission_prob.has_value()) {
        require_probability(*event.transmission_prob, "transmission probability");
        return *event.transmission_prob;
    }
    if (!event.covariates.empty()) {
        if (model == nullptr) {
            throw ConfigError("event for contact '" + event.contact_id +
                              "' carries covariates but no model was provided");
        }
        std::vector<double> z;
        z.reserve(model->schema.names.size());
        for (const std::string& name : model->schema.names) {
            const auto it = event.covariates.find(name);
            if (it == event.covariates.end()) {
                throw ConfigError("event for contact '" + event.contact_id +
                                  "' is missing covariate '" + name + "'");
            }
            z.push_back(it->second);
        }
        return predict_probability(*model, z);
    }
    throw ConfigError("event for contact '" + event.contact_id +
                      "' has neither a transmission probability nor covariates");
}

double individual_risk(const ContactSequence& seq, const LogisticModel* model,
                       const std::map<std::string, ExposureWindow>& windows) {
    if (seq.t1 > seq.t2) throw DomainError("sequence window with t1 > t2");

    static const ExposureWindow kUnbounded{};
    std::vector<double> probs;
    probs.reserve(seq.events.size());
    for (const ContactEvent& event : seq.events) {
        const auto it = windows.find(event.contact_id);
        const ExposureWindow& window = it == windows.end() ? kUnbounded : it->second;
        const auto clipped = clip_to_exposure_window(event, window, seq.t1, seq.t2);
        if (!clipped.has_value()) continue;
        probs.push_back(resolve_event_probability(*clipped, model));
    }
    return first_success_risk(probs);
}

}  // namespace hcprisk
