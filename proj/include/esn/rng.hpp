#pragma once

#include <cstdint>
#include <random>

namespace esn {

/// Named substreams derived from one experiment seed. Each consumer draws from
/// its own stream so adding draws to one never shifts another.
enum class Stream : std::uint64_t {
    InputWeights = 1,
    InputBias = 2,
    ReservoirPositions = 3,
    ReservoirValues = 4,
    ReservoirBias = 5,
    PowerIteration = 6,
    Permutation = 7,
    Synthetic = 8,
    MlpInit = 9,
    MlpShuffle = 10,
};

/// SplitMix64 finalizer; used only to derive well-mixed substream seeds.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Portable random source: std::mt19937_64 (bit-exact by the standard) with
/// hand-rolled conversions, since std:: distributions differ between
/// standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    Rng(std::uint64_t seed, Stream stream);

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1) with 53 bits of resolution.
    double uniform01();

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform integer in [0, bound), unbiased (rejection sampling).
    std::uint64_t below(std::uint64_t bound);

    /// Standard normal via Box-Muller (no cached second value).
    double normal();

private:
    std::mt19937_64 engine_;
};

}  // namespace esn
