#include "hcprisk/kernels/kernels.hpp"
#include "hcprisk/kernels/philox.hpp"

#include <immintrin.h>

// AVX2 variants of the reference kernels in scalar.cpp. Equivalence is
// bitwise: the float kernels keep the same per-lane accumulation order and
// use no fused operations, the integer kernels are exact by construction.

namespace hcprisk::kernels {
namespace {

BlockMoments risk_block_avx2(double prefix, const double* low_products,
                             std::size_t count, double* risks_out) {
    const __m256d vprefix = _mm256_set1_pd(prefix);
    const __m256d vone = _mm256_set1_pd(1.0);
    __m256d vsum = _mm256_setzero_pd();
    __m256d vsq = _mm256_setzero_pd();

    const std::size_t main = count & ~static_cast<std::size_t>(3);
    for (std::size_t t = 0; t < main; t += 4) {
        const __m256d low = _mm256_loadu_pd(low_products + t);
        const __m256d r = _mm256_sub_pd(vone, _mm256_mul_pd(vprefix, low));
        if (risks_out != nullptr) _mm256_storeu_pd(risks_out + t, r);
        vsum = _mm256_add_pd(vsum, r);
        vsq = _mm256_add_pd(vsq, _mm256_mul_pd(r, r));
    }

    alignas(32) double sum_lane[4];
    alignas(32) double sq_lane[4];
    _mm256_store_pd(sum_lane, vsum);
    _mm256_store_pd(sq_lane, vsq);
    for (std::size_t t = main; t < count; ++t) {
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

inline __m256i mulhi_epu32(__m256i a, __m256i b) {
    const __m256i even = _mm256_srli_epi64(_mm256_mul_epu32(a, b), 32);
    const __m256i odd =
        _mm256_mul_epu32(_mm256_srli_epi64(a, 32), _mm256_srli_epi64(b, 32));
    const __m256i hi_mask = _mm256_set1_epi64x(static_cast<long long>(0xFFFFFFFF00000000ull));
    return _mm256_or_si256(even, _mm256_and_si256(odd, hi_mask));
}

struct PhiloxState8 {
    __m256i x0, x1, x2, x3;  // lane i = word of trial (base + i)
};

// Eight independent Philox4x32-10 streams, one per 32-bit lane.
inline PhiloxState8 philox8(std::uint64_t seed, std::uint64_t trial_base,
                            std::uint32_t stream, std::uint32_t block) {
    alignas(32) std::uint32_t lo[8];
    alignas(32) std::uint32_t hi[8];
    for (int i = 0; i < 8; ++i) {
        const std::uint64_t t = trial_base + static_cast<std::uint64_t>(i);
        lo[i] = static_cast<std::uint32_t>(t);
        hi[i] = static_cast<std::uint32_t>(t >> 32);
    }
    PhiloxState8 s;
    s.x0 = _mm256_load_si256(reinterpret_cast<const __m256i*>(lo));
    s.x1 = _mm256_load_si256(reinterpret_cast<const __m256i*>(hi));
    s.x2 = _mm256_set1_epi32(static_cast<int>(stream));
    s.x3 = _mm256_set1_epi32(static_cast<int>(block));

    const __m256i mul0 = _mm256_set1_epi32(static_cast<int>(0xD2511F53u));
    const __m256i mul1 = _mm256_set1_epi32(static_cast<int>(0xCD9E8D57u));
    __m256i k0 = _mm256_set1_epi32(static_cast<int>(static_cast<std::uint32_t>(seed)));
    __m256i k1 = _mm256_set1_epi32(static_cast<int>(static_cast<std::uint32_t>(seed >> 32)));
    const __m256i weyl0 = _mm256_set1_epi32(static_cast<int>(0x9E3779B9u));
    const __m256i weyl1 = _mm256_set1_epi32(static_cast<int>(0xBB67AE85u));

    for (int round = 0; round < 10; ++round) {
        const __m256i lo0 = _mm256_mullo_epi32(s.x0, mul0);
        const __m256i hi0 = mulhi_epu32(s.x0, mul0);
        const __m256i lo1 = _mm256_mullo_epi32(s.x2, mul1);
        const __m256i hi1 = mulhi_epu32(s.x2, mul1);
        const __m256i y0 = _mm256_xor_si256(_mm256_xor_si256(hi1, s.x1), k0);
        const __m256i y2 = _mm256_xor_si256(_mm256_xor_si256(hi0, s.x3), k1);
        s.x0 = y0;
        s.x1 = lo1;
        s.x2 = y2;
        s.x3 = lo0;
        k0 = _mm256_add_epi32(k0, weyl0);
        k1 = _mm256_add_epi32(k1, weyl1);
    }
    return s;
}

// Unsigned 32-bit x < thr via the sign-flip trick.
inline __m256i cmplt_epu32(__m256i x, __m256i thr) {
    const __m256i bias = _mm256_set1_epi32(static_cast<int>(0x80000000u));
    return _mm256_cmpgt_epi32(_mm256_xor_si256(thr, bias),
                              _mm256_xor_si256(x, bias));
}

std::uint64_t first_success_avx2(const std::uint32_t* thresholds32,
                                 const std::uint8_t* always_hit,
                                 std::size_t n_contacts,
                                 std::uint64_t trial_begin,
                                 std::uint64_t trial_end, std::uint64_t seed,
                                 std::uint32_t stream) {
    std::uint64_t hits = 0;
    std::uint64_t t = trial_begin;
    const __m256i ones = _mm256_set1_epi32(-1);

    for (; t + 8 <= trial_end; t += 8) {
        __m256i any = _mm256_setzero_si256();
        for (std::size_t base = 0; base < n_contacts; base += 4) {
            const PhiloxState8 draws =
                philox8(seed, t, stream, static_cast<std::uint32_t>(base / 4));
            const __m256i words[4] = {draws.x0, draws.x1, draws.x2, draws.x3};
            const std::size_t limit =
                base + 4 <= n_contacts ? base + 4 : n_contacts;
            for (std::size_t j = base; j < limit; ++j) {
                if (always_hit[j] != 0) {
                    any = ones;
                } else {
                    const __m256i thr =
                        _mm256_set1_epi32(static_cast<int>(thresholds32[j]));
                    any = _mm256_or_si256(any, cmplt_epu32(words[j - base], thr));
                }
            }
        }
        const int mask = _mm256_movemask_ps(_mm256_castsi256_ps(any));
        hits += static_cast<std::uint64_t>(__builtin_popcount(mask & 0xFF));
    }

    if (t < trial_end) {
        hits += scalar_kernels().first_success_trials(
            thresholds32, always_hit, n_contacts, t, trial_end, seed, stream);
    }
    return hits;
}

constexpr KernelOps kAvx2Ops{"avx2", &risk_block_avx2, &first_success_avx2};

}  // namespace

const KernelOps* avx2_kernels_impl() { return &kAvx2Ops; }

}  // namespace hcprisk::kernels
