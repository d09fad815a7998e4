#pragma once

#include "hcprisk/contacts.hpp"
#include "hcprisk/transmission.hpp"

#include <map>
#include <optional>
#include <span>
#include <vector>

namespace hcprisk {

// Probability that at least one of a time-ordered sequence of independent
// Bernoulli contacts succeeds:
//   sum_m [prod_{r<m} (1 - p_r)] p_m  ==  1 - prod_m (1 - p_m)
// Permutation-invariant; the empty sequence carries no risk.
double first_success_risk(std::span<const double> probs);

// Constant-probability reduction: 1 - (1 - p)^n.
double geometric_risk(double p, std::uint64_t n_contacts);

// Intersects the event's interval with [max(t1, admit), min(t2, recovery)].
// Returns nothing when the intersection is empty; the transmission
// probability is per contact and is left untouched by clipping.
std::optional<ContactEvent> clip_to_exposure_window(const ContactEvent& event,
                                                    const ExposureWindow& window,
                                                    std::int64_t t1,
                                                    std::int64_t t2);

// P(t1 <= T <= t2) = S(t1) - S(t2) with S(t) = exp(-H(t)) and H the
// cumulative hazard of the piecewise-constant timeline laid end to end from
// time zero. Gaps between contacts are zero-rate segments.
double hazard_risk(std::span<const HazardSegment> timeline, double t1, double t2);

// Convenience overload: contacts are concatenated in order.
double hazard_risk(const std::vector<std::vector<HazardSegment>>& contacts,
                   double t1, double t2);

// Cumulative hazard of a timeline at time t (clamped below at zero; flat
// past the final segment).
double cumulative_hazard(std::span<const HazardSegment> timeline, double t);

// Full pipeline: clip every event to its contact person's exposure window
// and the sequence window, resolve each surviving event to a probability
// (explicit value, else covariates through `model`), then take the
// first-success risk. A person without a window entry is never clipped.
double individual_risk(const ContactSequence& seq, const LogisticModel* model,
                       const std::map<std::string, ExposureWindow>& windows);

// Probability resolution for one event; ConfigError when the event has
// neither an explicit probability nor covariates usable with `model`.
double resolve_event_probability(const ContactEvent& event,
                                 const LogisticModel* model);

}  // namespace hcprisk
