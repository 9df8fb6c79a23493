#ifndef AGGPOL_RNG_HPP
#define AGGPOL_RNG_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <utility>

namespace aggpol::rng {

// ============================================================================
//  Counter-based random numbers
//
//  Philox-4x32-10: a keyed bijection on 128-bit counters.  Streams are
//  addressed, not iterated — the draw for (seed, trajectory, step) is a pure
//  function of those indices, so ensembles are reproducible under any
//  parallel schedule and any chunking of the trajectory loop.
// ============================================================================

struct Philox4x32 {
    using ctr_t = std::array<std::uint32_t, 4>;
    using key_t = std::array<std::uint32_t, 2>;

    static constexpr std::uint32_t M0 = 0xD2511F53u;
    static constexpr std::uint32_t M1 = 0xCD9E8D57u;
    static constexpr std::uint32_t W0 = 0x9E3779B9u;
    static constexpr std::uint32_t W1 = 0xBB67AE85u;

    static ctr_t block(ctr_t x, key_t key)
    {
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = static_cast<std::uint64_t>(M0) * x[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(M1) * x[2];
            const ctr_t next = {
                static_cast<std::uint32_t>(p1 >> 32) ^ x[1] ^ key[0],
                static_cast<std::uint32_t>(p1),
                static_cast<std::uint32_t>(p0 >> 32) ^ x[3] ^ key[1],
                static_cast<std::uint32_t>(p0),
            };
            x = next;
            key[0] += W0;
            key[1] += W1;
        }
        return x;
    }
};

namespace detail {
inline double to_unit(std::uint32_t w)
{
    // (w + 1/2) / 2^32 — strictly inside (0, 1), safe for the log below.
    return (static_cast<double>(w) + 0.5) * 0x1p-32;
}
} // namespace detail

/// Two standard normal draws for (seed, trajectory, step), Box–Muller on one
/// Philox block.  The Langevin step consumes .first; .second is spare.
inline std::pair<double, double> normal_pair(std::uint64_t seed,
                                             std::uint32_t trajectory,
                                             std::uint32_t step)
{
    const Philox4x32::key_t key = {
        static_cast<std::uint32_t>(seed),
        static_cast<std::uint32_t>(seed >> 32),
    };
    const Philox4x32::ctr_t ctr = {step, trajectory, 0u, 0u};
    const auto w = Philox4x32::block(ctr, key);

    const double u1 = detail::to_unit(w[0]);
    const double u2 = detail::to_unit(w[1]);
    const double u3 = detail::to_unit(w[2]);
    const double u4 = detail::to_unit(w[3]);

    const double two_pi = 6.28318530717958647692;
    const double z0 = std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    const double z1 = std::sqrt(-2.0 * std::log(u3)) * std::cos(two_pi * u4);
    return {z0, z1};
}

} // namespace aggpol::rng

#endif // AGGPOL_RNG_HPP
