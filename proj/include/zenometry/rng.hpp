// rng.hpp — Counter-based splittable random streams for reproducible parallel sampling

#pragma once

#include <cstdint>

namespace zenometry::rng {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// SplitMix64 finalizer (Stafford mix 13); bijective on u64.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Stateless draw: the `index`-th output of substream (master, stream_a, stream_b).
// Any evaluation order over (stream_a, stream_b, index) yields the same values,
// which is what makes ensemble runs schedule-independent.
constexpr std::uint64_t draw_u64(std::uint64_t master,
                                 std::uint64_t stream_a,
                                 std::uint64_t stream_b,
                                 std::uint64_t index) noexcept {
    std::uint64_t h = mix64(master + kGolden);
    h = mix64(h ^ (stream_a + kGolden));
    h = mix64(h ^ (stream_b + kGolden));
    h = mix64(h ^ (index + kGolden));
    return h;
}

// Uniform double in [0, 1) from the top 53 bits.
constexpr double to_unit(std::uint64_t x) noexcept {
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

constexpr double draw_unit(std::uint64_t master,
                           std::uint64_t stream_a,
                           std::uint64_t stream_b,
                           std::uint64_t index) noexcept {
    return to_unit(draw_u64(master, stream_a, stream_b, index));
}

// Stream tags keep unrelated draw purposes on disjoint substreams.
inline constexpr std::uint64_t kShotNoiseStream = 0x4000000000000000ULL;

} // namespace zenometry::rng
