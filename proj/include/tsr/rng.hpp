#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace tsr {

/// Explicit-state random generator: mt19937_64 plus a hand-rolled Box-Muller
/// normal sampler so that identical seeds yield identical streams on every
/// platform (std::normal_distribution is implementation-defined).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform draw on the open interval (0, 1).
    double uniform() {
        return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal draw; consumes exactly two uniforms.
    double normal() {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Bounded draw in [0, n). Modulo bias is negligible for the permutation
    /// sizes used here (n << 2^32).
    std::uint64_t below(std::uint64_t n) { return gen_() % n; }

  private:
    std::mt19937_64 gen_;
};

/// Derives a stream-specific seed (splitmix64 finalizer), so that replicate k
/// of a seeded experiment gets an independent, reproducible generator.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

}  // namespace tsr
