// Seedable, portable random number utilities shared by workload generation,
// cost assignment and strategy coin flips.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace cachenet {

// splitmix64, used to derive independent substream seeds from one root seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Substream purposes. Each (seed, purpose) pair yields an independent stream,
// so e.g. arrival times do not perturb content sampling.
enum class Substream : std::uint64_t {
    Arrivals = 1,
    Contents = 2,
    Requesters = 3,
    StrategyCoins = 4,
    LinkCosts = 5,
    Sources = 6,
};

inline std::uint64_t substream_seed(std::uint64_t root, Substream purpose) {
    std::uint64_t s = root ^ (0xd1b54a32d192ed03ULL * static_cast<std::uint64_t>(purpose));
    return splitmix64(s);
}

// mt19937_64 output is pinned by the standard, so streams are identical
// across platforms. Doubles are derived from the raw bits directly because
// std::*_distribution results are implementation-defined.
class Rng {
public:
    Rng() : gen_(0) {}
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // uniform in [0, 1), 53-bit resolution
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    // uniform integer in [0, n)
    std::size_t uniform_index(std::size_t n) {
        return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
    }

    // exponential with the given rate (mean 1/rate)
    double exponential(double rate) {
        return -std::log1p(-uniform()) / rate;
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace cachenet
