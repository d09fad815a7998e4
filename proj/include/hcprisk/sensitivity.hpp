#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace hcprisk {

// Discrete transmission-probability levels; label i is the digit i in
// sequence codes, so at most ten levels are representable.
struct LevelSet {
    std::vector<double> probs;
};

struct SequenceRisk {
    std::string code;  // one digit per contact, first contact leftmost
    double risk = 0.0;
};

struct EnumerationSummary {
    std::uint64_t sequences = 0;
    double mean = 0.0;
    double sample_sd = 0.0;  // n-1 denominator; 0 for a single sequence
};

struct EnumerationResult {
    std::vector<SequenceRisk> sequences;  // lexicographic code order
    EnumerationSummary summary;
};

struct SurfacePoint {
    double p_low = 0.0;
    unsigned n_contacts = 0;
    double mean = 0.0;
    double variance = 0.0;  // population variance over the full enumeration
};

// Abort threshold for exhaustive enumeration.
inline constexpr std::uint64_t kEnumerationBudget = 10'000'000;

// All |levels|^n contact sequences with their first-success risks, plus the
// mean and sample standard deviation over the enumeration.
EnumerationResult enumerate_sequence_risks(const LevelSet& levels, unsigned n);

// Streaming variant: sink is called once per sequence in code order; the
// summary is returned. Used by the CLI to avoid materialising large listings.
EnumerationSummary for_each_sequence_risk(
    const LevelSet& levels, unsigned n,
    const std::function<void(const SequenceRisk&)>& sink);

// Two-level response surface: for every (p_low, n) grid point, enumerate the
// 2^n sequences over {p_low, p_low + offset} and record the mean and
// population variance of the risks.
std::vector<SurfacePoint> response_surface(std::span<const double> p_low_grid,
                                           std::span<const unsigned> n_grid,
                                           double offset = 0.3);

// Grid used by the bundled surface figures: p_low 0.01..0.50 step 0.01,
// n 1..12.
std::vector<double> default_p_low_grid();
std::vector<unsigned> default_n_grid();

// CSV rows `p_low,n,mean,variance` sorted by (p_low, n), 12 significant
// digits, and its inverse.
std::string surface_export(std::span<const SurfacePoint> points);
std::vector<SurfacePoint> surface_import(const std::string& csv_text);

}  // namespace hcprisk
