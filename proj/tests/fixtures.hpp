#pragma once

#include <vector>

#include "sem.hpp"

namespace rcd::testing {

// Three-variable model with a confounded collider: 1 -> 2 (weight 2),
// 1 -> 3 (weight 1), 2 -> 3 (weight -1), unit error variances, unit
// intercepts. The two paths into variable 3 nearly cancel, which makes its
// marginal variance smaller than the propagated shift from variable 2; the
// canonical case where marginal aberrancy ranks the wrong variable.
inline Sem confounded_chain() {
    Matrix b = Matrix::Zero(3, 3);
    b(1, 0) = 2.0;
    b(2, 0) = 1.0;
    b(2, 1) = -1.0;
    Sem sem;
    sem.dag = WeightedDag(std::move(b), {0, 1, 2});
    sem.intercept = Vector::Ones(3);
    sem.error_family = {ErrorFamily::Gaussian, ErrorFamily::Gaussian,
                        ErrorFamily::Gaussian};
    sem.error_variances = Vector::Ones(3);
    return sem;
}

// Five-variable demo model: variable 3 influences everything except
// variable 4. Written with the edge convention weights(child, parent).
inline Sem five_node_demo() {
    Matrix b = Matrix::Zero(5, 5);
    b(0, 1) = 1.0;
    b(0, 2) = -1.0;
    b(0, 3) = -2.0;
    b(1, 2) = -1.0;
    b(1, 3) = 1.0;
    b(2, 3) = -2.0;
    b(4, 1) = -2.0;
    b(4, 2) = 1.0;
    b(4, 3) = 3.0;
    Sem sem;
    sem.dag = WeightedDag(std::move(b), {3, 2, 1, 0, 4});
    sem.intercept = Vector::Zero(5);
    sem.error_family.assign(5, ErrorFamily::Gaussian);
    sem.error_variances.resize(5);
    sem.error_variances << 3.0, 2.0, 3.0, 2.0, 3.0;
    return sem;
}

// Two-variable chain 1 -> 2 with exactly representable moments, so the
// whitened shift of the causal ordering is 1-sparse in exact arithmetic.
inline Sem integer_chain(double weight = 2.0) {
    Matrix b = Matrix::Zero(2, 2);
    b(1, 0) = weight;
    Sem sem;
    sem.dag = WeightedDag(std::move(b), {0, 1});
    sem.intercept = Vector::Zero(2);
    sem.error_family = {ErrorFamily::Gaussian, ErrorFamily::Gaussian};
    sem.error_variances = Vector::Ones(2);
    return sem;
}

}  // namespace rcd::testing
