#include "numerics.hpp"

#include <cmath>
#include <string>

namespace rcd {
namespace {

// In-place lower Cholesky attempt. Returns the index of the first
// nonpositive pivot, or -1 on success.
int try_factor(const Matrix& sym, Matrix& lower) {
    const int p = static_cast<int>(sym.rows());
    lower.setZero(p, p);
    for (int j = 0; j < p; ++j) {
        double d = sym(j, j);
        for (int k = 0; k < j; ++k) d -= lower(j, k) * lower(j, k);
        if (!(d > 0.0) || !std::isfinite(d)) return j;
        const double ljj = std::sqrt(d);
        lower(j, j) = ljj;
        for (int i = j + 1; i < p; ++i) {
            double s = sym(i, j);
            for (int k = 0; k < j; ++k) s -= lower(i, k) * lower(j, k);
            lower(i, j) = s / ljj;
        }
    }
    return -1;
}

}  // namespace

CholeskyFactor cholesky_lower(const Matrix& sym) {
    if (sym.rows() != sym.cols())
        fail(ErrorCode::InvalidArgument, "cholesky_lower: matrix must be square");
    const int p = static_cast<int>(sym.rows());
    if (p == 0) fail(ErrorCode::InvalidArgument, "cholesky_lower: empty matrix");
    const double scale = sym.cwiseAbs().maxCoeff();
    const double asym = (sym - sym.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-10 * (1.0 + scale))
        fail(ErrorCode::InvalidArgument, "cholesky_lower: matrix is not symmetric");

    CholeskyFactor result;
    int pivot = try_factor(sym, result.lower);
    if (pivot < 0) return result;

    double lambda = 1e-8 * sym.diagonal().mean();
    if (!(lambda > 0.0)) lambda = 1e-8;
    Matrix jittered = sym;
    for (int attempt = 0; attempt < 10; ++attempt) {
        jittered = sym + lambda * Matrix::Identity(p, p);
        pivot = try_factor(jittered, result.lower);
        if (pivot < 0) {
            result.jitter = lambda;
            return result;
        }
        lambda *= 2.0;
    }
    fail(ErrorCode::Numeric,
         "cholesky_lower: not positive definite, pivot " + std::to_string(pivot + 1) +
             " nonpositive after 10 jitter retries");
}

Vector forward_solve(const Matrix& lower, const Vector& y) {
    const int p = static_cast<int>(lower.rows());
    if (lower.cols() != p || y.size() != p)
        fail(ErrorCode::InvalidArgument, "forward_solve: dimension mismatch");
    Vector x(p);
    for (int i = 0; i < p; ++i) {
        double s = y(i);
        for (int k = 0; k < i; ++k) s -= lower(i, k) * x(k);
        x(i) = s / lower(i, i);
    }
    return x;
}

Moments sample_moments(const Matrix& data) {
    const int n = static_cast<int>(data.rows());
    const int p = static_cast<int>(data.cols());
    if (n < 2) fail(ErrorCode::InvalidArgument, "sample_moments: need at least 2 samples");
    Moments m;
    m.mean = data.colwise().mean();
    m.sd.resize(p);
    for (int j = 0; j < p; ++j) {
        double ss = 0.0;
        for (int i = 0; i < n; ++i) {
            const double d = data(i, j) - m.mean(j);
            ss += d * d;
        }
        m.sd(j) = std::sqrt(ss / (n - 1));
    }
    return m;
}

CovarianceEstimate covariance(const Matrix& data, CovMode mode, double alpha) {
    const int n = static_cast<int>(data.rows());
    const int p = static_cast<int>(data.cols());
    if (n < 2) fail(ErrorCode::InvalidArgument, "covariance: need at least 2 samples");
    if (mode == CovMode::Auto) mode = (n > p) ? CovMode::Sample : CovMode::Shrunk;
    if (mode == CovMode::Shrunk && (alpha < 0.0 || alpha > 1.0))
        fail(ErrorCode::InvalidArgument, "covariance: shrinkage alpha must be in [0,1]");

    const Vector mean = data.colwise().mean();
    Matrix centered = data.rowwise() - mean.transpose();
    Matrix s(p, p);
    // Upper triangle then mirror, so the estimate is exactly symmetric.
    for (int i = 0; i < p; ++i) {
        for (int j = i; j < p; ++j) {
            const double v = centered.col(i).dot(centered.col(j)) / (n - 1);
            s(i, j) = v;
            s(j, i) = v;
        }
    }

    CovarianceEstimate est;
    if (mode == CovMode::Sample) {
        est.matrix = std::move(s);
        return est;
    }
    const double target = s.trace() / p;
    est.matrix = (1.0 - alpha) * s;
    est.matrix.diagonal().array() += alpha * target;
    est.shrunk = true;
    est.alpha = alpha;
    return est;
}

}  // namespace rcd
