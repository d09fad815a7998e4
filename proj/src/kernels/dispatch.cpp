#include "hcprisk/kernels/kernels.hpp"

#include "hcprisk/errors.hpp"

#include <cstdlib>
#include <string_view>

namespace hcprisk::kernels {

#if defined(HCPRISK_HAVE_AVX2_TU)
const KernelOps* avx2_kernels_impl();
#endif

const KernelOps* avx2_kernels() {
#if defined(HCPRISK_HAVE_AVX2_TU) && (defined(__x86_64__) || defined(_M_X64))
    if (__builtin_cpu_supports("avx2")) return avx2_kernels_impl();
#endif
    return nullptr;
}

const KernelOps& active_kernels() {
    static const KernelOps& picked = []() -> const KernelOps& {
        if (const char* env = std::getenv("HCPRISK_KERNEL")) {
            const std::string_view want(env);
            if (want == "scalar") return scalar_kernels();
            if (want == "avx2") {
                if (const KernelOps* ops = avx2_kernels()) return *ops;
                throw ConfigError(
                    "HCPRISK_KERNEL=avx2 requested but AVX2 is unavailable");
            }
            throw ConfigError("unknown HCPRISK_KERNEL value: " +
                              std::string(want));
        }
        if (const KernelOps* ops = avx2_kernels()) return *ops;
        return scalar_kernels();
    }();
    return picked;
}

void PairwiseSum::push(double v) {
    // Binary-counter merge: partial_[k] is a finished sum of 2^k pushes.
    ++count_;
    std::size_t level = 0;
    for (std::uint64_t c = count_; (c & 1) == 0; c >>= 1) {
        v += partial_[level];
        ++level;
    }
    if (level == partial_.size()) {
        partial_.push_back(v);
    } else {
        partial_[level] = v;
    }
}

double PairwiseSum::value() const {
    double total = 0.0;
    std::uint64_t c = count_;
    for (std::size_t level = 0; level < partial_.size(); ++level, c >>= 1) {
        if ((c & 1) != 0) total += partial_[level];
    }
    return total;
}

}  // namespace hcprisk::kernels
