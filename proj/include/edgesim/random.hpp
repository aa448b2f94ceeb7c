#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace edgesim {

// splitmix64, used to derive independent sub-stream seeds from a base seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic random source. std::mt19937_64 is bit-exact across platforms;
// the standard distributions are not, so the draw functions are implemented
// here. Every stochastic draw in the simulator flows through one of these.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // uniform in [0, 1)
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // uniform in [lo, hi)
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform();
    }

    // uniform integer in [0, n)
    std::uint64_t uniform_int(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("uniform_int: n must be positive");
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    bool bernoulli(double p) { return uniform() < p; }

    // Knuth's product method, chunked so exp(-mean) never underflows.
    int poisson(double mean) {
        if (mean < 0.0) throw std::invalid_argument("poisson: mean must be nonnegative");
        int count = 0;
        while (mean > 500.0) {
            count += poisson_small(500.0);
            mean -= 500.0;
        }
        return count + poisson_small(mean);
    }

private:
    int poisson_small(double mean) {
        const double threshold = std::exp(-mean);
        int k = 0;
        double p = 1.0;
        for (;;) {
            p *= uniform();
            if (p <= threshold) return k;
            ++k;
        }
    }

    std::mt19937_64 engine_;
};

} // namespace edgesim
