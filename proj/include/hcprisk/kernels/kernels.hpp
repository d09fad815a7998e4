#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace hcprisk::kernels {

// Moments of one block of risk values, accumulated with a fixed four-lane
// scheme: lane[t % 4] += r_t in index order, then (l0 + l1) + (l2 + l3).
// Every backend implements exactly this arithmetic, which makes block
// results bitwise identical across the scalar and SIMD paths.
struct BlockMoments {
    double sum = 0.0;
    double sum_sq = 0.0;
};

struct KernelOps {
    const char* name;

    // risks_out[i] = 1 - prefix * low_products[i] for i < count (risks_out may
    // be null), plus the block moments of those risks.
    BlockMoments (*risk_block)(double prefix, const double* low_products,
                               std::size_t count, double* risks_out);

    // Number of trials in [trial_begin, trial_end) where at least one contact
    // draw hits. Draw j of trial t is philox4x32(seed, t, stream, j/4).x[j%4];
    // contact j hits iff always_hit[j] or draw < thresholds32[j].
    std::uint64_t (*first_success_trials)(
        const std::uint32_t* thresholds32, const std::uint8_t* always_hit,
        std::size_t n_contacts, std::uint64_t trial_begin,
        std::uint64_t trial_end, std::uint64_t seed, std::uint32_t stream);
};

const KernelOps& scalar_kernels();

// Null when the build lacks the AVX2 translation unit or the CPU lacks AVX2.
const KernelOps* avx2_kernels();

// Runtime selection: AVX2 when available, else scalar. The HCPRISK_KERNEL
// environment variable (scalar|avx2) overrides; requesting an unavailable
// backend throws.
const KernelOps& active_kernels();

// Deterministic pairwise reduction. The combine tree depends only on the
// number of values pushed, never on how the work was partitioned, so totals
// are reproducible bit for bit.
class PairwiseSum {
public:
    void push(double v);
    double value() const;

private:
    std::vector<double> partial_;  // partial_[k] holds a sum of 2^k pushes
    std::uint64_t count_ = 0;
};

}  // namespace hcprisk::kernels
