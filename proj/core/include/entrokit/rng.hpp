#pragma once

#include <cstdint>
#include <random>

namespace entrokit {

/// splitmix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Seed for replicate `index` under `base`. This is the only place seeds are
/// derived; replicate k is reproducible on its own from (base, k).
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept {
    return mix64(base + 0x9E3779B97F4A7C15ULL * (index + 1));
}

/// mt19937_64 with platform-independent conversions. The standard
/// distributions are implementation-defined, so they are not used.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on {0, ..., bound - 1}; bound > 0. Lemire's rejection method.
    std::uint64_t below(std::uint64_t bound) {
        __extension__ using u128 = unsigned __int128;
        u128 product = static_cast<u128>(engine_()) * bound;
        auto low = static_cast<std::uint64_t>(product);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                product = static_cast<u128>(engine_()) * bound;
                low = static_cast<std::uint64_t>(product);
            }
        }
        return static_cast<std::uint64_t>(product >> 64);
    }

    bool bernoulli_half() { return (engine_() >> 63) != 0; }

private:
    std::mt19937_64 engine_;
};

}  // namespace entrokit
