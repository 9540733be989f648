#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace census {

// SplitMix64: tiny, fast, passes BigCrush, and trivially seedable.
class SplitMix64 {
  public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform on [0,1) with 53 random bits.
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    std::uint64_t operator()() { return next(); }
    static constexpr std::uint64_t min() { return 0; }
    static constexpr std::uint64_t max() { return ~0ULL; }

  private:
    std::uint64_t state_;
};

// Per-worker streams: scramble the seed once, then offset by a constant
// unrelated to the SplitMix64 increment so worker strides never collide
// with the generator's own counter sequence.
inline SplitMix64 derive_stream(std::uint64_t seed, unsigned worker) {
    SplitMix64 scrambler(seed);
    return SplitMix64(scrambler.next() + static_cast<std::uint64_t>(worker) * 0xC2B2AE3D27D4EB4FULL);
}

// Poisson sampling: sequential inversion for small means, Hormann's PTRS
// transformed rejection for large ones.
inline long long poisson_sample(double lambda, SplitMix64& rng) {
    if (!(lambda > 0))
        throw std::domain_error("poisson_sample: lambda must be positive");
    if (lambda < 10.0) {
        const double limit = std::exp(-lambda);
        long long n = 0;
        double prod = rng.next_double();
        while (prod > limit) {
            ++n;
            prod *= rng.next_double();
        }
        return n;
    }
    const double b = 0.931 + 2.53 * std::sqrt(lambda);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    const double log_lambda = std::log(lambda);
    while (true) {
        double u = rng.next_double() - 0.5;
        double v = rng.next_double();
        const double us = 0.5 - std::abs(u);
        const double kf = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
        if (us >= 0.07 && v <= v_r) return static_cast<long long>(kf);
        if (kf < 0 || (us < 0.013 && v > us)) continue;
        const double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
        const double rhs = kf * log_lambda - lambda - std::lgamma(kf + 1.0);
        if (lhs <= rhs) return static_cast<long long>(kf);
    }
}

}
