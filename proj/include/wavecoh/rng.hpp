#pragma once

#include <cmath>
#include <cstdint>

namespace wavecoh {

/// Counter-based pseudo-random generator (SplitMix64, Steele et al. 2014).
/// Output k is a pure function of (seed, k), so streams can be split across
/// threads with `substream` and replayed bit-for-bit from any point. All
/// stochastic machinery in the library draws from this generator only.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    /// Generator for an independent substream; used to give each Monte Carlo
    /// run its own stream so results do not depend on execution order.
    [[nodiscard]] static Rng substream(std::uint64_t seed, std::uint64_t index) {
        return Rng(mix(seed + kGamma * (index + 1)));
    }

    [[nodiscard]] std::uint64_t next_u64() {
        state_ += kGamma;
        return mix(state_);
    }

    /// Uniform draw in [0, 1) with 53 random bits.
    [[nodiscard]] double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Standard normal draw via the Marsaglia polar method (no trig calls, so
    /// the stream depends only on sqrt/log rounding of the local libm).
    [[nodiscard]] double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u = 0.0, v = 0.0, q = 0.0;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            q = u * u + v * v;
        } while (q >= 1.0 || q == 0.0);
        const double f = std::sqrt(-2.0 * std::log(q) / q);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    [[nodiscard]] double normal(double mean, double stddev) {
        return mean + stddev * normal();
    }

private:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

    [[nodiscard]] static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace wavecoh
