#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace rcd {

enum class ErrorCode {
    InvalidArgument,
    Io,
    Parse,
    Numeric,
};

// Single exception type used across the core; the C API and the CLI map
// `code` onto their numeric error spaces.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string message)
        : std::runtime_error(std::move(message)), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

// Nonnegative score value that may be infinite. Infinite values order above
// every finite value and compare equal to each other; this ordering is what
// candidate ranking relies on, so it lives here rather than in call sites.
struct Score {
    double value = 0.0;
    bool infinite = false;

    static Score inf() { return Score{0.0, true}; }
    static Score finite(double v) { return Score{v, false}; }

    friend bool operator==(const Score& a, const Score& b) {
        if (a.infinite || b.infinite) return a.infinite == b.infinite;
        return a.value == b.value;
    }
    friend bool operator<(const Score& a, const Score& b) {
        if (a.infinite) return false;
        if (b.infinite) return true;
        return a.value < b.value;
    }
    friend bool operator>(const Score& a, const Score& b) { return b < a; }
};

// Bijection on {0..p-1}. forward[i] is the variable placed at position i;
// inverse[v] is the position of variable v.
struct Permutation {
    std::vector<int> forward;
    std::vector<int> inverse;

    Permutation() = default;
    explicit Permutation(std::vector<int> fwd);

    int size() const { return static_cast<int>(forward.size()); }

    static Permutation identity(int p);
};

inline Permutation::Permutation(std::vector<int> fwd) : forward(std::move(fwd)) {
    const int p = static_cast<int>(forward.size());
    inverse.assign(p, -1);
    for (int i = 0; i < p; ++i) {
        const int v = forward[i];
        if (v < 0 || v >= p || inverse[v] != -1)
            fail(ErrorCode::InvalidArgument, "permutation is not a bijection on {1..p}");
        inverse[v] = i;
    }
}

inline Permutation Permutation::identity(int p) {
    std::vector<int> fwd(p);
    for (int i = 0; i < p; ++i) fwd[i] = i;
    return Permutation(std::move(fwd));
}

}  // namespace rcd
