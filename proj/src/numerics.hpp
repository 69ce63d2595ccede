#pragma once

#include <Eigen/Dense>

#include "types.hpp"

namespace rcd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Lower-triangular Cholesky factor. `jitter` is the multiple of the identity
// that had to be added to the input before the factorization succeeded
// (0 when no regularization fired), so L*L^T reconstructs input + jitter*I.
struct CholeskyFactor {
    Matrix lower;
    double jitter = 0.0;
};

// Factors a symmetric matrix into L L^T with strictly positive diagonal.
// A nonpositive pivot triggers a retry on input + jitter*I, starting at
// 1e-8 * mean(diag) and doubling, ten retries at most. Still failing raises
// ErrorCode::Numeric naming the offending pivot.
CholeskyFactor cholesky_lower(const Matrix& sym);

// Solves L x = y for lower-triangular L.
Vector forward_solve(const Matrix& lower, const Vector& y);

struct Moments {
    Vector mean;  // per-column sample mean
    Vector sd;    // per-column sample standard deviation, 1/(n-1) divisor
};

// Column means and standard deviations. Requires n >= 2. Degenerate columns
// (sd exactly zero) are reported as-is; callers that cannot tolerate them
// check and name the column.
Moments sample_moments(const Matrix& data);

enum class CovMode {
    Auto,    // Sample when n > p, otherwise Shrunk
    Sample,
    Shrunk,
};

struct CovarianceEstimate {
    Matrix matrix;
    bool shrunk = false;
    double alpha = 0.0;
};

inline constexpr double kDefaultShrinkAlpha = 0.1;

// Unbiased sample covariance, optionally shrunk towards its scaled identity:
// (1-alpha) * S + alpha * (trace(S)/p) * I.
CovarianceEstimate covariance(const Matrix& data, CovMode mode,
                              double alpha = kDefaultShrinkAlpha);

}  // namespace rcd
