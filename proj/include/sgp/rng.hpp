#pragma once
// Deterministic randomness. Every sampling site derives its own stream from
// (seed, stream indices), so execution order and thread count never change
// results. std::uniform_*_distribution is implementation-defined and must not
// be used anywhere in the library; the bounded/real helpers here are portable.

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace sgp {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Mixes an arbitrary tuple of integers into one stream seed.
inline uint64_t derive_seed(std::initializer_list<uint64_t> parts) {
    uint64_t h = 0x8e8f3b2aa7340981ULL;
    for (uint64_t p : parts) h = splitmix64(h ^ splitmix64(p));
    return h;
}

class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(splitmix64(seed ^ 0xda3e39cb94b95bdbULL)) {}

    uint64_t next_u64() { return gen_(); }

    // Uniform in [0, n). Fixed-point multiply keeps the mapping portable.
    size_t bounded(size_t n) {
        if (n <= 1) return 0;
        return static_cast<size_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    // Uniform in [0, 1) with 53-bit resolution.
    double real() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return real() < p; }

    template <typename T>
    const T& pick(const std::vector<T>& v) {
        return v[bounded(v.size())];
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[bounded(i)]);
    }

    // Index into positive weights, proportional to weight.
    size_t pick_weighted(const std::vector<double>& weights) {
        double total = 0;
        for (double w : weights) total += w;
        double x = real() * total;
        for (size_t i = 0; i + 1 < weights.size(); ++i) {
            if (x < weights[i]) return i;
            x -= weights[i];
        }
        return weights.empty() ? 0 : weights.size() - 1;
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace sgp
