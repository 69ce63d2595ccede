#include "rng.hpp"

#include <cmath>

#include "types.hpp"

namespace rcd {
namespace {

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                       std::uint64_t c) {
    std::uint64_t z = splitmix64(seed ^ 0x8000000000000000ull);
    z = splitmix64(z ^ splitmix64(a));
    z = splitmix64(z ^ splitmix64(b ^ 0x5555555555555555ull));
    z = splitmix64(z ^ splitmix64(c ^ 0xaaaaaaaaaaaaaaaaull));
    return z;
}

Rng::Rng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

Rng Rng::child(std::uint64_t a, std::uint64_t b, std::uint64_t c) const {
    return Rng(mix_seed(seed_, a, b, c));
}

double Rng::uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
}

double Rng::normal() {
    // u1 in (0, 1]: avoids log(0).
    const double u1 =
        (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

double Rng::normal(double mean, double sd) { return mean + sd * normal(); }

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) fail(ErrorCode::InvalidArgument, "Rng::below requires n > 0");
    // Rejection sampling over the largest multiple of n.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return x % n;
}

bool Rng::bernoulli(double prob) { return uniform01() < prob; }

std::vector<int> Rng::sample_without_replacement(int n, int k) {
    if (k < 0 || k > n)
        fail(ErrorCode::InvalidArgument, "sample_without_replacement: k out of range");
    std::vector<int> pool(n);
    for (int i = 0; i < n; ++i) pool[i] = i;
    // Partial Fisher-Yates: first k slots are the sample.
    for (int i = 0; i < k; ++i) {
        const int j = i + static_cast<int>(below(static_cast<std::uint64_t>(n - i)));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
}

}  // namespace rcd
