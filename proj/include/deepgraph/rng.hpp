#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace deepgraph {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t hash_string(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Per-stage seed derivation: the root seed is split by stage name so that
// stages draw from independent streams and can be re-run in isolation.
inline std::uint64_t derive_seed(std::uint64_t root, std::string_view stage) {
    return splitmix64(root ^ hash_string(stage));
}

inline std::uint64_t derive_seed(std::uint64_t root, std::string_view stage, std::uint64_t counter) {
    return splitmix64(splitmix64(root ^ hash_string(stage)) + counter);
}

// mt19937_64 output is pinned by the standard; the distribution helpers below
// are hand-rolled because std::uniform_*/normal_distribution are not
// bit-portable across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform integer in [0, n), n >= 1. Rejection keeps it unbiased.
    std::uint64_t uniform_below(std::uint64_t n) {
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return v % n;
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform01() < p; }

    // Standard normal via Box-Muller; one value per call, no caching, so the
    // stream position is a pure function of call count.
    double normal() {
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(uniform_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

// Order-independent Bernoulli draw keyed on (seed, id): used where the outcome
// for an item must not depend on how many items were processed before it.
inline bool keyed_bernoulli(std::uint64_t seed, std::uint64_t id, double p) {
    const std::uint64_t h = splitmix64(splitmix64(seed) ^ splitmix64(id + 0x9e3779b97f4a7c15ULL));
    return (static_cast<double>(h >> 11) * 0x1.0p-53) < p;
}

inline double keyed_uniform01(std::uint64_t seed, std::uint64_t id) {
    const std::uint64_t h = splitmix64(splitmix64(seed) ^ splitmix64(id + 0x9e3779b97f4a7c15ULL));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace deepgraph
