#pragma once

#include <cstdint>
#include <random>

namespace topofeat {

// splitmix64 step; used to derive child seeds so parallel streams stay
// reproducible across platforms.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Seeded 64-bit generator (mt19937_64) with portable uniform doubles.
// std::uniform_real_distribution is implementation-defined, so floats are
// built from raw bits instead; same seed gives bitwise-identical streams
// everywhere.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : seed_(seed), gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // uniform in [0, 1), 53 random bits
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer in [0, n), unbiased via rejection
    std::uint64_t uniform_int(std::uint64_t n) {
        if (n == 0) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

    // independent child stream; deterministic in (seed, stream)
    SeededRng split(std::uint64_t stream) const {
        std::uint64_t s = seed_ ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
        std::uint64_t child = splitmix64(s);
        return SeededRng(child);
    }

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 gen_;
};

} // namespace topofeat
