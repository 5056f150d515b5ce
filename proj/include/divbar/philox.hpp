#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace divbar {

/**
 * @brief Philox4x32-10 counter-based generator.
 *
 * Stateless: each call maps a 128-bit counter and 64-bit key to four 32-bit
 * words, so any (path, step) pair can be generated independently of execution
 * order. This is what makes parallel Monte Carlo bit-reproducible regardless
 * of the thread count.
 */
struct Philox4x32 {
    static constexpr std::uint32_t kMult0 = 0xD2511F53u;
    static constexpr std::uint32_t kMult1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static std::array<std::uint32_t, 4> generate(std::array<std::uint32_t, 4> ctr,
                                                 std::array<std::uint32_t, 2> key) {
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = static_cast<std::uint64_t>(kMult0) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(kMult1) * ctr[2];
            const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
            const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        return ctr;
    }
};

/// Maps a 32-bit word to the open interval (0,1); never returns 0 or 1.
inline double uniform_open01(std::uint32_t w) {
    return (static_cast<double>(w) + 0.5) * 0x1p-32;
}

/**
 * @brief The per-step random inputs of one simulated path: a standard normal
 *        increment and an independent uniform (used for the within-step
 *        supremum sample at the reflecting barrier).
 *
 * One Philox block per (seed, path, step): words 0,1 feed a Box-Muller normal,
 * word 2 the uniform; word 3 is unused.
 */
struct StepDraw {
    double z;  // N(0,1)
    double u;  // Uniform(0,1)
};

inline StepDraw step_draw(std::uint64_t seed, std::uint64_t path, std::uint64_t step) {
    const std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32),
        static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(path >> 32)};
    const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed),
                                              static_cast<std::uint32_t>(seed >> 32)};
    const auto w = Philox4x32::generate(ctr, key);
    const double u1 = uniform_open01(w[0]);
    const double u2 = uniform_open01(w[1]);
    const double r = std::sqrt(-2.0 * std::log(u1));
    return {r * std::cos(6.283185307179586476925286766559 * u2), uniform_open01(w[2])};
}

}  // namespace divbar
