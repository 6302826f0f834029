#pragma once

// Deterministic random streams.  Every replication owns a stream derived
// from (base_seed, stream_id) through a splitmix64 mix, so results are
// byte-identical no matter how work is scheduled across threads.
//
// Draws deliberately avoid std::uniform_real_distribution and friends
// (their output is implementation-defined): uniforms take the top 53 bits
// of the engine, normals come from the Box-Muller transform with the spare
// variate cached, and bounded integers use rejection sampling.

#include <cstdint>
#include <cmath>
#include <limits>
#include <random>

namespace kliepkit {

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) : gen_(seed) {}

    static RngStream derive(std::uint64_t base_seed, std::uint64_t stream_id) {
        return RngStream(splitmix64(splitmix64(base_seed) ^ splitmix64(stream_id)));
    }

    // Raw 64-bit engine output (used to seed derived generators).
    std::uint64_t raw() { return gen_(); }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller; generates pairs, caches the second.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform01();  // (0, 1], keeps the log finite
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    // Uniform integer in [0, bound), bound >= 1, by rejection.
    std::uint64_t uniform_int(std::uint64_t bound) {
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % bound;
        std::uint64_t v;
        do {
            v = gen_();
        } while (v >= limit);
        return v % bound;
    }

  private:
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace kliepkit
