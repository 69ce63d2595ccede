#pragma once

#include <vector>

#include "numerics.hpp"
#include "types.hpp"

namespace rcd {

// Weighted DAG over variables {0..p-1}. weights(j, k) is the weight of the
// edge k -> j. Acyclicity is certified by causal_order: listing the
// variables in that order makes the weight matrix strictly lower-triangular.
struct WeightedDag {
    int p = 0;
    Matrix weights;
    std::vector<int> causal_order;

    WeightedDag() = default;
    WeightedDag(Matrix b, std::vector<int> order);

    bool has_edge(int from, int to) const { return weights(to, from) != 0.0; }
};

// Checks the strict lower-triangularity certificate exactly.
void validate_dag(const WeightedDag& dag);

// (I - B)^{-1}, computed by substitution along the causal order. Entry (k, r)
// is the total causal effect of variable r on variable k; the diagonal is 1.
Matrix total_effects(const WeightedDag& dag);

struct GraphSets {
    std::vector<int> parents;
    std::vector<int> ancestors;
    std::vector<int> descendants;
    std::vector<int> real_descendants;  // nonzero total effect, cancellation-aware
};

// Relative threshold below which a total effect counts as a cancelled path.
inline double support_threshold(const Matrix& effects) {
    return 1e-12 * (1.0 + effects.cwiseAbs().maxCoeff());
}

GraphSets graph_sets(const WeightedDag& dag, int j);

// Marginal variances diag((I-B)^{-1} D (I-B)^{-T}) for error variances D.
Vector marginal_variances(const WeightedDag& dag, const Vector& error_variances);

enum class VarianceOrder {
    Safe,      // Var(X_k) exceeds the propagated intervention variance
    Unsafe,
    Boundary,  // tie within rounding
};

struct SafetyReport {
    VarianceOrder order = VarianceOrder::Safe;
    // True when one of the structural sufficient conditions holds:
    // k outside De(r); k in De(r) with no ancestor path into k bypassing r;
    // all edge weights nonnegative; or the DAG is a polytree.
    bool structurally_safe = false;
};

SafetyReport zscore_safety(const WeightedDag& dag, const Vector& error_variances,
                           int r, int k);

bool is_polytree(const WeightedDag& dag);

}  // namespace rcd
