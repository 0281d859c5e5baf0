#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace dimincr {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Counter-based seed derivation: independent streams for (master, tag, indices...)
// so sub-tasks get reproducible randomness regardless of execution order.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> parts) {
    std::uint64_t h = splitmix64(master ^ 0x6a09e667f3bcc908ULL);
    for (std::uint64_t p : parts)
        h = splitmix64(h ^ p);
    return h;
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(splitmix64(seed)) {}

    std::uint64_t next() { return gen_(); }

    // uniform in [0,1), 53-bit mantissa; avoids distribution objects so the
    // stream is identical across standard library implementations
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer in [0, n)
    std::uint64_t below(std::uint64_t n) {
        // rejection sampling keeps the result unbiased
        const std::uint64_t limit = n * ((~0ULL) / n);
        std::uint64_t x;
        do {
            x = gen_();
        } while (x >= limit);
        return x % n;
    }

    std::mt19937_64& engine() { return gen_; }

  private:
    std::mt19937_64 gen_;
};

} // namespace dimincr
