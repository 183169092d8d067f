#pragma once

#include <cmath>
#include <cstdint>

namespace agrisim {

/// Named substreams of the simulation's random source. Each consumer kind
/// owns one stream, so draws never shift between phases when code paths
/// are enabled or disabled by a scenario.
enum class Stream : std::uint64_t {
    production_noise = 1, // xi, Gaussian, one per farmer-year
    init_land = 2,        // uniform position within a size class
    init_pesticide = 3,   // zeta, Gaussian, redrawn until positive factor
    init_yield = 4,       // psi, Gaussian, redrawn until admissible
    adoption = 5,         // Bernoulli uniform, one per farmer-year
    efficiency_gain = 6,  // uniform gain scale, one per farmer-year
};

/// Counter-based random source: every draw is a pure hash of
/// (seed, stream, unit, step), so trajectories are bit-identical for a given
/// seed no matter how farmers are scheduled across threads, and consuming
/// one stream never advances another.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    /// Uniform in [0, 1).
    double uniform(Stream s, std::uint64_t unit, std::uint64_t step) const {
        return to_unit(word(s, unit, step));
    }

    /// Gaussian via Box-Muller; consumes two fixed sub-draws of `step`.
    double gaussian(Stream s, std::uint64_t unit, std::uint64_t step,
                    double mean, double sd) const {
        double u1 = 1.0 - to_unit(word(s, unit, 2 * step));     // (0, 1]
        double u2 = to_unit(word(s, unit, 2 * step + 1));       // [0, 1)
        double z = std::sqrt(-2.0 * std::log(u1)) *
                   std::cos(2.0 * 3.14159265358979323846 * u2);
        return mean + sd * z;
    }

    /// Replica seeds are decorrelated derivations of a base seed.
    static std::uint64_t derive_replica_seed(std::uint64_t base,
                                             std::uint64_t replica) {
        return mix(base + mix(0x243F6A8885A308D3ull + replica));
    }

private:
    std::uint64_t seed_;

    // splitmix64 finalizer; bijective with strong avalanche.
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t word(Stream s, std::uint64_t unit, std::uint64_t step) const {
        std::uint64_t h = mix(seed_ ^ (0x9E3779B97F4A7C15ull *
                                       (static_cast<std::uint64_t>(s) + 1)));
        h = mix(h ^ (unit * 0xBF58476D1CE4E5B9ull + 0x2545F4914F6CDD1Dull));
        h = mix(h ^ (step * 0x94D049BB133111EBull + 0xDA942042E4DD58B5ull));
        return h;
    }

    static double to_unit(std::uint64_t w) {
        return static_cast<double>(w >> 11) * 0x1.0p-53;
    }
};

} // namespace agrisim
