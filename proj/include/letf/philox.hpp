#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace letf {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter apply(Counter ctr, Key key) {
        constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
        constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += W0;
                key[1] += W1;
            }
            const std::uint64_t p0 = std::uint64_t(M0) * ctr[0];
            const std::uint64_t p1 = std::uint64_t(M1) * ctr[2];
            const auto hi0 = std::uint32_t(p0 >> 32), lo0 = std::uint32_t(p0);
            const auto hi1 = std::uint32_t(p1 >> 32), lo1 = std::uint32_t(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }
};

/// Uniform on (0, 1) with 52 random bits from two 32-bit words. Midpoints of a 2^-52 grid
/// are exact in double, so neither end is reached.
inline double philox_uniform(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t u = (std::uint64_t(hi) << 32) | lo;
    return (double(u >> 12) + 0.5) * 0x1.0p-52;
}

/// Two independent standard normals for (stream, index) under a 64-bit seed.
inline std::array<double, 2> philox_normal_pair(std::uint64_t seed, std::uint64_t stream,
                                                std::uint32_t index) {
    const Philox4x32::Counter ctr{index, std::uint32_t(stream), std::uint32_t(stream >> 32), 0u};
    const Philox4x32::Key key{std::uint32_t(seed), std::uint32_t(seed >> 32)};
    const auto r = Philox4x32::apply(ctr, key);
    const double u1 = philox_uniform(r[0], r[1]);
    const double u2 = philox_uniform(r[2], r[3]);
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * std::numbers::pi * u2;
    return {rad * std::cos(ang), rad * std::sin(ang)};
}

}  // namespace letf
