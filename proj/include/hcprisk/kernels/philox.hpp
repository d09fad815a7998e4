#pragma once

#include <cstdint>

namespace hcprisk::kernels {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
// Every draw is addressed by (seed, counter, stream, block), so any draw can
// be regenerated in isolation and partitioning trials across workers cannot
// change the stream.
struct Philox4x32Block {
    std::uint32_t x[4];
};

inline Philox4x32Block philox4x32(std::uint64_t seed, std::uint64_t counter,
                                  std::uint32_t stream, std::uint32_t block) {
    constexpr std::uint32_t kMul0 = 0xD2511F53u;
    constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    std::uint32_t c0 = static_cast<std::uint32_t>(counter);
    std::uint32_t c1 = static_cast<std::uint32_t>(counter >> 32);
    std::uint32_t c2 = stream;
    std::uint32_t c3 = block;
    std::uint32_t k0 = static_cast<std::uint32_t>(seed);
    std::uint32_t k1 = static_cast<std::uint32_t>(seed >> 32);

    for (int round = 0; round < 10; ++round) {
        const std::uint64_t m0 = static_cast<std::uint64_t>(kMul0) * c0;
        const std::uint64_t m1 = static_cast<std::uint64_t>(kMul1) * c2;
        const std::uint32_t y0 = static_cast<std::uint32_t>(m1 >> 32) ^ c1 ^ k0;
        const std::uint32_t y1 = static_cast<std::uint32_t>(m1);
        const std::uint32_t y2 = static_cast<std::uint32_t>(m0 >> 32) ^ c3 ^ k1;
        const std::uint32_t y3 = static_cast<std::uint32_t>(m0);
        c0 = y0;
        c1 = y1;
        c2 = y2;
        c3 = y3;
        k0 += kWeyl0;
        k1 += kWeyl1;
    }
    return Philox4x32Block{{c0, c1, c2, c3}};
}

// Uniform in (0,1); never hits an endpoint, so log(1-u) is always finite.
inline double to_unit_open(std::uint32_t x) {
    return (static_cast<double>(x) + 0.5) * 0x1p-32;
}

}  // namespace hcprisk::kernels
