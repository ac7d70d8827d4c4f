#pragma once

#include <cstdint>
#include <random>

namespace dcs {

/// Seedable generator with output that is identical on every platform.
///
/// Wraps std::mt19937_64 (whose raw output sequence is fixed by the standard)
/// and performs its own conversions to uniform reals and bounded integers,
/// since the standard distributions are implementation-defined.
///
/// Stream splitting: stream `s` of seed `seed` is an mt19937_64 seeded with
/// splitmix64(seed * 0x9E3779B97F4A7C15 + s). Different streams of the same
/// seed are statistically independent for all practical purposes.
class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform();

    /// Uniform integer in [0, bound), bound > 0. Unbiased (rejection).
    std::uint64_t below(std::uint64_t bound);

    /// Standard normal via Box-Muller (no cached second value).
    double normal();

private:
    std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Named stream ids. Annealer: coordinate choice, value choice, acceptance.
enum class Stream : std::uint64_t {
    Coordinate = 1,
    Value = 2,
    Acceptance = 3,
    Split = 4,
    Synth = 5,
};

inline Rng make_rng(std::uint64_t seed, Stream stream) {
    return Rng(seed, static_cast<std::uint64_t>(stream));
}

} // namespace dcs
