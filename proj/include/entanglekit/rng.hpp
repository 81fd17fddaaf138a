#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace entanglekit {

/// Deterministic random stream: mt19937_64 engine with explicit
/// floating-point transforms. The standard distributions are
/// implementation-defined, so uniform/gaussian/exponential are spelled out
/// here to keep generated datasets byte-identical across toolchains.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller; the spare value is cached.
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * M_PI * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    /// Exponential with rate 1.
    double exponential() {
        double u = uniform();
        while (u >= 1.0) u = uniform();
        return -std::log1p(-u);
    }

    /// Bernoulli draw with success probability p.
    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
}  // namespace detail

/// Counter-based substream seed: folds each path component through
/// splitmix64 so per-sample streams are independent of generation order.
inline std::uint64_t substream_seed(std::uint64_t master,
                                    std::initializer_list<std::uint64_t> path) {
    std::uint64_t state = master;
    std::uint64_t h = detail::splitmix64(state);
    for (std::uint64_t part : path) {
        state ^= part + 0x9e3779b97f4a7c15ULL + (state << 6) + (state >> 2);
        h ^= detail::splitmix64(state);
    }
    return h;
}

}  // namespace entanglekit
