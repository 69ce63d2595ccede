#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace rcd {

// Deterministic RNG with counter-derived substreams.
//
// Every Rng remembers the seed it was constructed from, and `child(a, b)`
// derives an independent stream from (seed, a, b) alone, never from the
// mutable engine state. Work items that run in parallel each get their own
// child stream, which makes results independent of scheduling.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t seed() const { return seed_; }

    Rng child(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) const;

    // Uniform on [0, 1) with 53 random bits.
    double uniform01();
    // Uniform on [lo, hi).
    double uniform(double lo, double hi);
    // Standard normal via Box-Muller; consumes exactly two engine draws.
    double normal();
    double normal(double mean, double sd);
    // Uniform integer on [0, n), unbiased. n must be positive.
    std::uint64_t below(std::uint64_t n);
    bool bernoulli(double prob);

    // Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

    // k distinct values from {0..n-1}, in random order.
    std::vector<int> sample_without_replacement(int n, int k);

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

// splitmix64-style mixer used for substream derivation.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                       std::uint64_t c = 0);

}  // namespace rcd
