#include "lasso.hpp"

#include <algorithm>
#include <cmath>

namespace rcd {
namespace {

struct Standardized {
    Matrix x;          // columns centered and scaled to unit 1/n variance
    Vector col_mean;
    Vector col_scale;  // sqrt of 1/n variance; 0 marks a frozen column
    double y_mean = 0.0;
    Vector y_centered;
};

Standardized standardize(const Matrix& x, const Vector& y) {
    const int n = static_cast<int>(x.rows());
    const int q = static_cast<int>(x.cols());
    Standardized s;
    s.col_mean = x.colwise().mean();
    s.col_scale.resize(q);
    s.x.resize(n, q);
    for (int j = 0; j < q; ++j) {
        double ss = 0.0;
        for (int i = 0; i < n; ++i) {
            const double d = x(i, j) - s.col_mean(j);
            ss += d * d;
        }
        const double scale = std::sqrt(ss / n);
        s.col_scale(j) = scale;
        if (scale > 0.0)
            s.x.col(j) = (x.col(j).array() - s.col_mean(j)) / scale;
        else
            s.x.col(j).setZero();
    }
    s.y_mean = y.mean();
    s.y_centered = y.array() - s.y_mean;
    return s;
}

// Coordinate descent on pre-standardized data; beta is the warm start and
// holds the solution on return. Full sweeps alternate with cheap passes over
// the active coordinates until a full sweep moves nothing, so convergence is
// certified over every coordinate. Returns sweeps used, or -1 on
// non-convergence.
int descend(const Standardized& s, double lambda, double tol, int max_sweeps,
            Vector& beta, Vector& residual,
            std::vector<double>* objective_trace = nullptr) {
    const int n = static_cast<int>(s.x.rows());
    const int q = static_cast<int>(s.x.cols());

    auto update = [&](int j) {
        const double old = beta(j);
        // Unit design variance makes the update a plain soft-threshold.
        const double rho = s.x.col(j).dot(residual) / n + old;
        const double mag = std::abs(rho) - lambda;
        const double next = mag > 0.0 ? std::copysign(mag, rho) : 0.0;
        if (next != old) {
            residual -= (next - old) * s.x.col(j);
            beta(j) = next;
            return std::abs(next - old);
        }
        return 0.0;
    };
    auto record = [&] {
        if (objective_trace != nullptr)
            objective_trace->push_back(residual.squaredNorm() / (2.0 * n) +
                                       lambda * beta.cwiseAbs().sum());
    };

    std::vector<int> active;
    int sweeps = 0;
    while (sweeps < max_sweeps) {
        ++sweeps;
        double max_delta = 0.0;
        for (int j = 0; j < q; ++j) {
            if (s.col_scale(j) == 0.0) continue;
            max_delta = std::max(max_delta, update(j));
        }
        record();
        if (max_delta < tol) return sweeps;

        active.clear();
        for (int j = 0; j < q; ++j)
            if (beta(j) != 0.0) active.push_back(j);
        while (sweeps < max_sweeps) {
            ++sweeps;
            double delta = 0.0;
            for (int j : active) delta = std::max(delta, update(j));
            record();
            if (delta < tol) break;
        }
    }
    return -1;
}

LassoFit finalize(const Standardized& s, const Vector& beta_std, double lambda,
                  bool converged, int sweeps) {
    const int q = static_cast<int>(beta_std.size());
    LassoFit fit;
    fit.lambda = lambda;
    fit.converged = converged;
    fit.sweeps = sweeps;
    fit.coefficients.resize(q);
    double offset = 0.0;
    for (int j = 0; j < q; ++j) {
        const double c =
            s.col_scale(j) > 0.0 ? beta_std(j) / s.col_scale(j) : 0.0;
        fit.coefficients(j) = c;
        offset += c * s.col_mean(j);
        if (c != 0.0) fit.support.push_back(j);
    }
    fit.intercept = s.y_mean - offset;
    return fit;
}

void check_xy(const Matrix& x, const Vector& y) {
    if (x.rows() != y.size())
        fail(ErrorCode::InvalidArgument, "lasso: X and y row counts disagree");
    if (x.rows() < 2) fail(ErrorCode::InvalidArgument, "lasso: need at least 2 rows");
    if (x.cols() < 1) fail(ErrorCode::InvalidArgument, "lasso: need at least 1 column");
}

}  // namespace

double lasso_lambda_max(const Matrix& x, const Vector& y) {
    check_xy(x, y);
    const Standardized s = standardize(x, y);
    const int n = static_cast<int>(x.rows());
    double lmax = 0.0;
    for (int j = 0; j < x.cols(); ++j)
        lmax = std::max(lmax, std::abs(s.x.col(j).dot(s.y_centered)) / n);
    return lmax;
}

LassoFit lasso_cd(const Matrix& x, const Vector& y, double lambda, double tol,
                  int max_sweeps, std::vector<double>* objective_trace) {
    check_xy(x, y);
    if (lambda < 0.0) fail(ErrorCode::InvalidArgument, "lasso: lambda must be nonnegative");
    const Standardized s = standardize(x, y);
    Vector beta = Vector::Zero(x.cols());
    Vector residual = s.y_centered;
    const int sweeps =
        descend(s, lambda, tol, max_sweeps, beta, residual, objective_trace);
    return finalize(s, beta, lambda, sweeps > 0, sweeps > 0 ? sweeps : max_sweeps);
}

namespace {

struct GramPath {
    Matrix gram;      // X~^T X~ / n
    Vector xty;       // X~^T y_c / n
    Vector col_scale;
};

// Gram-form descent for penalty paths: gradient g = X^T r / n is maintained
// incrementally, so checking a stationary coordinate costs O(1) and only
// actual moves touch a Gram column. Plain sweeps zigzag badly on correlated
// active sets, so once a full sweep is unsettled the minimizer restricted to
// the current sign pattern is solved exactly, stepping only to the first
// sign crossing; a closing full sweep below tol certifies the solution over
// all coordinates. Requires unit-variance columns.
int descend_gram(const GramPath& path, double lambda, double tol, int max_sweeps,
                 Vector& beta, Vector& grad) {
    const Matrix& gram = path.gram;
    const int q = static_cast<int>(gram.rows());
    auto update = [&](int j) {
        const double old = beta(j);
        const double rho = grad(j) + old;
        const double mag = std::abs(rho) - lambda;
        const double next = mag > 0.0 ? std::copysign(mag, rho) : 0.0;
        if (next != old) {
            grad.noalias() -= gram.col(j) * (next - old);
            beta(j) = next;
            return std::abs(next - old);
        }
        return 0.0;
    };
    auto refresh_grad = [&] {
        grad = path.xty;
        for (int j = 0; j < q; ++j)
            if (beta(j) != 0.0) grad.noalias() -= gram.col(j) * beta(j);
    };

    std::vector<int> active;
    int sweeps = 0;
    while (sweeps < max_sweeps) {
        ++sweeps;
        double max_delta = 0.0;
        for (int j = 0; j < q; ++j) {
            if (path.col_scale(j) == 0.0) continue;
            max_delta = std::max(max_delta, update(j));
        }
        if (max_delta < tol) return sweeps;

        bool landed = false;
        for (int round = 0; round < 16 && sweeps < max_sweeps; ++round) {
            active.clear();
            for (int j = 0; j < q; ++j)
                if (beta(j) != 0.0) active.push_back(j);
            const int k = static_cast<int>(active.size());
            if (k == 0) break;

            Matrix gaa(k, k);
            Vector rhs(k);
            for (int a = 0; a < k; ++a) {
                rhs(a) = path.xty(active[a]) -
                         lambda * (beta(active[a]) > 0.0 ? 1.0 : -1.0);
                for (int b = 0; b < k; ++b) gaa(a, b) = gram(active[a], active[b]);
            }
            const Eigen::LDLT<Matrix> ldlt(gaa);
            if (ldlt.info() != Eigen::Success) break;
            const Vector z = ldlt.solve(rhs);
            if (!z.allFinite()) break;

            // Step towards the restricted minimizer, clamping at the first
            // coordinate whose sign would flip; that coordinate leaves the
            // active set exactly at zero.
            double step = 1.0;
            int crossing = -1;
            for (int a = 0; a < k; ++a) {
                const double from = beta(active[a]);
                if (z(a) == 0.0 || (z(a) > 0.0) != (from > 0.0)) {
                    const double gamma = from / (from - z(a));
                    if (gamma < step) {
                        step = gamma;
                        crossing = a;
                    }
                }
            }
            for (int a = 0; a < k; ++a)
                beta(active[a]) += step * (z(a) - beta(active[a]));
            if (crossing >= 0) beta(active[crossing]) = 0.0;
            refresh_grad();
            ++sweeps;
            if (crossing < 0) {
                landed = true;
                break;
            }
        }
        if (!landed) {
            // Safeguard: plain sweeps over the active set.
            active.clear();
            for (int j = 0; j < q; ++j)
                if (beta(j) != 0.0) active.push_back(j);
            while (sweeps < max_sweeps) {
                ++sweeps;
                double delta = 0.0;
                for (int j : active) delta = std::max(delta, update(j));
                if (delta < tol) break;
            }
        }
    }
    return -1;
}

GramPath build_gram(const Standardized& s) {
    const int n = static_cast<int>(s.x.rows());
    const int q = static_cast<int>(s.x.cols());
    GramPath path;
    path.gram.noalias() = s.x.transpose() * s.x / n;
    // Per-column dots, so a zero warm start stays exactly zero at the
    // penalty ceiling lasso_lambda_max computes the same way.
    path.xty.resize(q);
    for (int j = 0; j < q; ++j) path.xty(j) = s.x.col(j).dot(s.y_centered) / n;
    path.col_scale = s.col_scale;
    return path;
}

}  // namespace

std::vector<int> cv_fold_assignment(int n, int folds, const Rng& rng) {
    if (folds < 2 || folds > n)
        fail(ErrorCode::InvalidArgument, "cv: need 2 <= folds <= n");
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    Rng stream = rng.child(0x666f6c64ull);
    stream.shuffle(order);
    std::vector<int> fold(n);
    for (int i = 0; i < n; ++i)
        fold[order[i]] = static_cast<int>((static_cast<long long>(i) * folds) / n);
    return fold;
}

LassoFit cv_lasso(const Matrix& x, const Vector& y, int folds, int grid_size,
                  double lambda_min_ratio, const Rng& rng, double tol,
                  int max_sweeps) {
    check_xy(x, y);
    if (grid_size < 1) fail(ErrorCode::InvalidArgument, "cv: grid must be nonempty");
    if (!(lambda_min_ratio > 0.0 && lambda_min_ratio <= 1.0))
        fail(ErrorCode::InvalidArgument, "cv: lambda_min_ratio must be in (0,1]");
    const int n = static_cast<int>(x.rows());
    const int q = static_cast<int>(x.cols());

    const double lmax = lasso_lambda_max(x, y);
    std::vector<double> grid(grid_size);
    if (lmax == 0.0 || grid_size == 1) {
        grid.assign(1, lmax);
    } else {
        const double ratio = std::pow(lambda_min_ratio, 1.0 / (grid_size - 1));
        double lam = lmax;
        for (int g = 0; g < grid_size; ++g) {
            grid[g] = lam;
            lam *= ratio;
        }
    }

    const std::vector<int> fold = cv_fold_assignment(n, folds, rng);
    std::vector<double> total_sq_error(grid.size(), 0.0);

    for (int f = 0; f < folds; ++f) {
        std::vector<int> train_rows;
        std::vector<int> val_rows;
        for (int i = 0; i < n; ++i)
            (fold[i] == f ? val_rows : train_rows).push_back(i);

        Matrix xt(static_cast<int>(train_rows.size()), q);
        Vector yt(static_cast<int>(train_rows.size()));
        for (std::size_t i = 0; i < train_rows.size(); ++i) {
            xt.row(static_cast<int>(i)) = x.row(train_rows[i]);
            yt(static_cast<int>(i)) = y(train_rows[i]);
        }

        const Standardized s = standardize(xt, yt);
        const GramPath path = build_gram(s);
        Vector beta = Vector::Zero(q);
        Vector grad = path.xty;
        // Warm-started descent along the grid.
        for (std::size_t g = 0; g < grid.size(); ++g) {
            descend_gram(path, grid[g], tol, max_sweeps, beta, grad);
            const LassoFit fit = finalize(s, beta, grid[g], true, 0);
            for (int row : val_rows) {
                const double pred = fit.intercept + x.row(row).dot(fit.coefficients);
                const double err = y(row) - pred;
                total_sq_error[g] += err * err;
            }
        }
    }

    // Smallest mean validation error; larger lambda wins ties, where a tie is
    // any error within kCvTieRelTol of the minimum. The grid descends, so the
    // first index inside the band is the sparsest tied choice.
    std::size_t gmin = 0;
    for (std::size_t g = 1; g < grid.size(); ++g)
        if (total_sq_error[g] < total_sq_error[gmin]) gmin = g;
    std::size_t best = 0;
    while (total_sq_error[best] > total_sq_error[gmin] * (1.0 + kCvTieRelTol))
        ++best;

    const Standardized s = standardize(x, y);
    const GramPath path = build_gram(s);
    Vector beta = Vector::Zero(q);
    Vector grad = path.xty;
    bool converged = true;
    int sweeps = 0;
    for (std::size_t g = 0; g <= best; ++g) {
        const int used =
            descend_gram(path, grid[g], tol, max_sweeps, beta, grad);
        if (g == best) {
            converged = used > 0;
            sweeps = used > 0 ? used : max_sweeps;
        }
    }
    return finalize(s, beta, grid[best], converged, sweeps);
}

}  // namespace rcd
