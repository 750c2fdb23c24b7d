#pragma once

// Reproducible random streams. Variates are produced from raw 64-bit engine
// output with explicit transforms, so a given seed yields the same numbers on
// every standard library.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace expopt {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    /// Substream for one path: seeded from seed xor index.
    static RandomStream for_path(std::uint64_t seed, std::uint64_t index) {
        return RandomStream(seed ^ index);
    }

    /// Uniform on the open interval (0, 1).
    double uniform() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        const double theta = 2.0 * std::numbers::pi * uniform();
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    /// Symmetric two-sided exponential with unit variance (scale 1/sqrt 2).
    double laplace() {
        const double u = uniform() - 0.5;
        const double mag = -std::log(1.0 - 2.0 * std::abs(u)) / std::numbers::sqrt2;
        return u < 0.0 ? -mag : mag;
    }

    double exponential() { return -std::log(uniform()); }

    /// Gamma(shape, 1) variate by Marsaglia-Tsang, boosted for shape < 1.
    double gamma(double shape) {
        if (shape < 1.0) return gamma(shape + 1.0) * std::pow(uniform(), 1.0 / shape);
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double z;
            double v;
            do {
                z = normal();
                v = 1.0 + c * z;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform();
            if (std::log(u) < 0.5 * z * z + d - d * v + d * std::log(v)) return d * v;
        }
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace expopt
