#include "hcprisk/kernels/kernels.hpp"
#include "hcprisk/kernels/philox.hpp"

// Reference kernels. The SIMD backends are required to reproduce these
// results bit for bit; keep the accumulation scheme in sync with avx2.cpp.

namespace hcprisk::kernels {
namespace {

BlockMoments risk_block_scalar(double prefix, const double* low_products,
                               std::size_t count, double* risks_out) {
    double sum_lane[4] = {0.0, 0.0, 0.0, 0.0};
    double sq_lane[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t t = 0; t < count; ++t) {
        const double r = 1.0 - prefix * low_products[t];
        if (risks_out != nullptr) risks_out[t] = r;
        sum_lane[t & 3] += r;
        sq_lane[t & 3] += r * r;
    }
    BlockMoments m;
    m.sum = (sum_lane[0] + sum_lane[1]) + (sum_lane[2] + sum_lane[3]);
    m.sum_sq = (sq_lane[0] + sq_lane[1]) + (sq_lane[2] + sq_lane[3]);
    return m;
}

std::uint64_t first_success_scalar(const std::uint32_t* thresholds32,
                                   const std::uint8_t* always_hit,
                                   std::size_t n_contacts,
                                   std::uint64_t trial_begin,
                                   std::uint64_t trial_end, std::uint64_t seed,
                                   std::uint32_t stream) {
    std::uint64_t hits = 0;
    for (std::uint64_t t = trial_begin; t < trial_end; ++t) {
        bool any = false;
        for (std::size_t base = 0; base < n_contacts && !any; base += 4) {
            const Philox4x32Block draws =
                philox4x32(seed, t, stream, static_cast<std::uint32_t>(base / 4));
            const std::size_t limit =
                base + 4 <= n_contacts ? base + 4 : n_contacts;
            for (std::size_t j = base; j < limit; ++j) {
                if (always_hit[j] != 0 || draws.x[j - base] < thresholds32[j]) {
                    any = true;
                    break;
                }
            }
        }
        hits += any ? 1 : 0;
    }
    return hits;
}

constexpr KernelOps kScalarOps{"scalar", &risk_block_scalar,
                               &first_success_scalar};

}  // namespace

const KernelOps& scalar_kernels() { return kScalarOps; }

}  // namespace hcprisk::kernels
