#pragma once

#include <vector>

#include "numerics.hpp"
#include "rng.hpp"
#include "types.hpp"

namespace rcd {

struct LassoFit {
    Vector coefficients;       // original scale
    double intercept = 0.0;
    double lambda = 0.0;
    std::vector<int> support;  // indices with nonzero coefficient
    bool converged = true;
    int sweeps = 0;
};

inline constexpr double kLassoTol = 1e-6;
inline constexpr int kLassoMaxSweeps = 10000;

// Mean validation errors within this relative band of the minimum count as
// tied; the tie resolves toward the larger penalty. The band sits well below
// one standard error of a cross-validated MSE at the supported sample sizes,
// so tied fits are statistically indistinguishable.
inline constexpr double kCvTieRelTol = 0.03;

// Cyclic coordinate descent with soft-thresholding on internally standardized
// columns, minimizing (1/2n)||y - b0 - X beta||^2 + lambda ||beta||_1.
// Zero-spread columns are frozen at zero. Non-convergence flips `converged`
// but still returns the fit. When objective_trace is given it receives the
// internal (standardized) objective value after every sweep.
LassoFit lasso_cd(const Matrix& x, const Vector& y, double lambda,
                  double tol = kLassoTol, int max_sweeps = kLassoMaxSweeps,
                  std::vector<double>* objective_trace = nullptr);

// Smallest penalty that zeroes every coefficient: max_j |x_j^T (y - ybar)| / n
// on standardized columns.
double lasso_lambda_max(const Matrix& x, const Vector& y);

// Deterministic fold assignment: a seeded shuffle of the row indices cut
// into `folds` nearly equal blocks. Depends only on (n, folds, seed).
std::vector<int> cv_fold_assignment(int n, int folds, const Rng& rng);

// k-fold cross-validated lasso over a geometric penalty grid descending from
// lambda_max. Picks the lambda with the smallest mean validation MSE, the
// larger lambda on ties, then refits on all rows.
LassoFit cv_lasso(const Matrix& x, const Vector& y, int folds, int grid_size,
                  double lambda_min_ratio, const Rng& rng,
                  double tol = kLassoTol, int max_sweeps = kLassoMaxSweeps);

}  // namespace rcd
