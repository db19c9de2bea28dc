#pragma once

#include <cmath>
#include <cstdint>

namespace ocp {

/// Counter-based generator: output i of stream t under seed s is a fixed
/// mix of (s, t, i). Streams are independent, draws are reproducible across
/// platforms, and a generator can be split without touching the parent.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : seed_(seed), stream_(stream), counter_(0) {}

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream() const noexcept { return stream_; }

    /// Independent child stream; deterministic function of (seed, stream).
    CounterRng split(std::uint64_t substream) const {
        return CounterRng(seed_, mix(stream_ + 0x9e3779b97f4a7c15ULL * (substream + 1)));
    }

    std::uint64_t next_u64() { return mix(key() + (++counter_)*0x9e3779b97f4a7c15ULL); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    /// Standard normal via Box-Muller (pairs cached for determinism).
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

    /// Gamma(shape, 1) for shape >= 1 (Marsaglia-Tsang squeeze).
    double gamma(double shape) {
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double z, v;
            do {
                z = normal();
                v = 1.0 + c * z;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform();
            if (u < 1.0 - 0.0331 * z * z * z * z) return d * v;
            if (u > 0.0 && std::log(u) < 0.5 * z * z + d * (1.0 - v + std::log(v)))
                return d * v;
        }
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    std::uint64_t key() const { return mix(seed_ ^ mix(stream_)); }

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

} // namespace ocp
