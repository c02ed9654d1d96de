#pragma once

// (seed, stream, index)-addressable randomness. Every consumer derives its
// own stream id, so parallel evaluation order cannot change the draws.

#include <cstdint>
#include <random>
#include <vector>

namespace fastrates {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t mix_stream(uint64_t seed, uint64_t a, uint64_t b = 0, uint64_t c = 0) {
    uint64_t h = splitmix64(seed ^ 0x6a09e667f3bcc909ULL);
    h = splitmix64(h ^ splitmix64(a));
    h = splitmix64(h ^ splitmix64(b + 0x9e3779b9ULL));
    h = splitmix64(h ^ splitmix64(c + 0x3c6ef372ULL));
    return h;
}

// One reproducible stream: mt19937_64 keyed by (seed, ids...).
class Stream {
public:
    explicit Stream(uint64_t key) : gen_(key) {}
    Stream(uint64_t seed, uint64_t a, uint64_t b = 0, uint64_t c = 0)
        : gen_(mix_stream(seed, a, b, c)) {}

    double uniform01() {
        return std::uniform_real_distribution<double>(0.0, 1.0)(gen_);
    }
    double normal(double mean = 0.0, double sd = 1.0) {
        return std::normal_distribution<double>(mean, sd)(gen_);
    }
    double gamma(double shape) {
        return std::gamma_distribution<double>(shape, 1.0)(gen_);
    }
    uint64_t bits() { return gen_(); }

    std::mt19937_64& raw() { return gen_; }

private:
    std::mt19937_64 gen_;
};

// Dirichlet(1,...,1) draw on the k-simplex.
inline std::vector<double> dirichlet_uniform(Stream& s, size_t k) {
    std::vector<double> w(k);
    double tot = 0;
    for (auto& v : w) { v = s.gamma(1.0); tot += v; }
    for (auto& v : w) v /= tot;
    return w;
}

}  // namespace fastrates
