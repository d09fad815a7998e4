#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hcprisk {

// Compartment of a contact person. Susceptible and recovered individuals are
// not modeled; they cannot transmit during a hospital stay.
enum class Compartment {
    exposed,              // E
    infection_confirmed,  // IC
    infection_suspected,  // IS
    coworker,             // HW
};

const char* to_string(Compartment c);
std::optional<Compartment> compartment_from_string(const std::string& text);

// Timestamps are minutes since the Unix epoch; these sentinels mark an
// unbounded evaluation window (only ever used in min/max comparisons).
inline constexpr std::int64_t kMinTime = std::numeric_limits<std::int64_t>::min();
inline constexpr std::int64_t kMaxTime = std::numeric_limits<std::int64_t>::max();

// One close contact. The transmission probability is either given directly
// or resolved from the covariates through a logistic model; at least one of
// the two must be present.
struct ContactEvent {
    std::string contact_id;
    Compartment compartment = Compartment::infection_confirmed;
    std::int64_t start_min = 0;
    std::int64_t duration_min = 0;
    std::optional<double> transmission_prob;
    std::map<std::string, double> covariates;

    std::int64_t end_min() const { return start_min + duration_min; }
};

// Admission-to-recovery interval of a contact person; outside it the person
// cannot transmit.
struct ExposureWindow {
    std::int64_t admit_min = kMinTime;
    std::int64_t recovery_min = kMaxTime;
};

// Time-ordered contact record of one healthcare worker over [t1, t2].
struct ContactSequence {
    std::string hcp_id;
    std::vector<ContactEvent> events;  // nondecreasing start_min
    std::int64_t t1 = kMinTime;
    std::int64_t t2 = kMaxTime;
};

// Per-compartment event tallies, indexed by Compartment.
struct CompartmentCounts {
    std::size_t exposed = 0;
    std::size_t infection_confirmed = 0;
    std::size_t infection_suspected = 0;
    std::size_t coworker = 0;
};

CompartmentCounts count_compartments(const ContactSequence& seq);

// Piecewise-constant hazard: `rate` per minute over `length` minutes. A
// contact is a list of segments; time with no contact carries zero hazard.
struct HazardSegment {
    double rate_per_min = 0.0;
    double length_min = 0.0;
};

}  // namespace hcprisk
