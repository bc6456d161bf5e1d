#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace pretouch {

/// Seedable, splittable generator. Children derive from the construction seed
/// and a stream id only, so a split never depends on how many draws the
/// parent has made.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : seed_(seed), engine_(mix(seed)) {}

    std::uint64_t seed() const { return seed_; }

    Rng split(std::uint64_t stream) const { return Rng(mix(seed_ ^ mix(stream + 0x632be59bd9b4e019ULL))); }

    Rng split(std::initializer_list<std::uint64_t> path) const {
        Rng child = *this;
        for (std::uint64_t s : path) child = child.split(s);
        return child;
    }

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
    double normal(double mean, double sigma) { return std::normal_distribution<double>(mean, sigma)(engine_); }

    std::mt19937_64& engine() { return engine_; }

    static std::uint64_t mix(std::uint64_t x) {
        // splitmix64 finalizer
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace pretouch
