#ifndef CIRCDECONV_RNG_HPP
#define CIRCDECONV_RNG_HPP

#include <cmath>
#include <cstdint>

namespace circdeconv {

/// SplitMix64: a counter-based 64-bit generator (Steele, Lea & Flood 2014).
/// Output i is a pure function of seed and counter, so replication
/// substreams derived as seed ^ replication_index never share state.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform draw in [0, 1), 53 bits of precision.
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform draw in (0, 1); safe as a log/inverse-CDF argument.
    double next_open_unit() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Centered normal via the trigonometric Box-Muller transform.
    double next_normal(double sigma) {
        const double u1 = next_open_unit();
        const double u2 = next_unit();
        return sigma * std::sqrt(-2.0 * std::log(u1)) *
               std::cos(6.283185307179586476925286766559 * u2);
    }

    /// Centered Laplace with scale sigma by inverse CDF.
    double next_laplace(double sigma) {
        const double v = next_open_unit() - 0.5;
        const double mag = -std::log(1.0 - 2.0 * std::abs(v));
        return v < 0.0 ? -sigma * mag : sigma * mag;
    }

private:
    std::uint64_t state_;
};

} // namespace circdeconv

#endif // CIRCDECONV_RNG_HPP
