#include "graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rcd {
namespace {

// Reachability from `start` over edges, optionally treating `blocked` as
// removed. Does not include `start` itself.
std::vector<bool> reachable_from(const WeightedDag& dag, int start, int blocked = -1) {
    std::vector<bool> seen(dag.p, false);
    std::vector<int> stack{start};
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        for (int w = 0; w < dag.p; ++w) {
            if (w == blocked || seen[w] || !dag.has_edge(v, w)) continue;
            seen[w] = true;
            stack.push_back(w);
        }
    }
    seen[start] = false;
    return seen;
}

std::vector<int> to_indices(const std::vector<bool>& mask) {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(mask.size()); ++i)
        if (mask[i]) out.push_back(i);
    return out;
}

}  // namespace

WeightedDag::WeightedDag(Matrix b, std::vector<int> order)
    : p(static_cast<int>(b.rows())), weights(std::move(b)), causal_order(std::move(order)) {
    validate_dag(*this);
}

void validate_dag(const WeightedDag& dag) {
    const int p = dag.p;
    if (dag.weights.rows() != p || dag.weights.cols() != p)
        fail(ErrorCode::InvalidArgument, "dag: weight matrix must be p x p");
    if (static_cast<int>(dag.causal_order.size()) != p)
        fail(ErrorCode::InvalidArgument, "dag: causal order must list all variables");
    std::vector<int> position(p, -1);
    for (int i = 0; i < p; ++i) {
        const int v = dag.causal_order[i];
        if (v < 0 || v >= p || position[v] != -1)
            fail(ErrorCode::InvalidArgument, "dag: causal order is not a permutation");
        position[v] = i;
    }
    for (int j = 0; j < p; ++j) {
        for (int k = 0; k < p; ++k) {
            if (dag.weights(j, k) != 0.0 && position[k] >= position[j])
                fail(ErrorCode::InvalidArgument,
                     "dag: edge " + std::to_string(k + 1) + " -> " + std::to_string(j + 1) +
                         " violates the causal order");
        }
    }
}

Matrix total_effects(const WeightedDag& dag) {
    const int p = dag.p;
    Matrix t = Matrix::Zero(p, p);
    // Row of (I-B)^{-1} for node v: e_v plus the parent rows scaled by the
    // edge weights. Parents precede v in the causal order, so one pass works.
    for (int idx = 0; idx < p; ++idx) {
        const int v = dag.causal_order[idx];
        for (int k = 0; k < p; ++k) {
            const double w = dag.weights(v, k);
            if (w != 0.0) t.row(v) += w * t.row(k);
        }
        t(v, v) += 1.0;
    }
    return t;
}

GraphSets graph_sets(const WeightedDag& dag, int j) {
    if (j < 0 || j >= dag.p) fail(ErrorCode::InvalidArgument, "graph_sets: bad variable");
    GraphSets sets;
    for (int k = 0; k < dag.p; ++k)
        if (dag.weights(j, k) != 0.0) sets.parents.push_back(k);
    sets.descendants = to_indices(reachable_from(dag, j));

    std::vector<bool> anc(dag.p, false);
    for (int l = 0; l < dag.p; ++l) {
        if (l == j) continue;
        if (reachable_from(dag, l)[j]) anc[l] = true;
    }
    sets.ancestors = to_indices(anc);

    const Matrix effects = total_effects(dag);
    const double tol = support_threshold(effects);
    for (int k = 0; k < dag.p; ++k)
        if (k != j && std::abs(effects(k, j)) > tol) sets.real_descendants.push_back(k);
    return sets;
}

Vector marginal_variances(const WeightedDag& dag, const Vector& error_variances) {
    const Matrix t = total_effects(dag);
    Vector var(dag.p);
    for (int i = 0; i < dag.p; ++i) {
        double s = 0.0;
        for (int k = 0; k < dag.p; ++k) s += t(i, k) * t(i, k) * error_variances(k);
        var(i) = s;
    }
    return var;
}

bool is_polytree(const WeightedDag& dag) {
    // Acyclic skeleton: union-find over undirected edges, a repeated root
    // means a cycle.
    const int p = dag.p;
    std::vector<int> root(p);
    for (int i = 0; i < p; ++i) root[i] = i;
    auto find = [&](int v) {
        while (root[v] != v) {
            root[v] = root[root[v]];
            v = root[v];
        }
        return v;
    };
    for (int j = 0; j < p; ++j) {
        for (int k = 0; k < j; ++k) {
            if (dag.weights(j, k) == 0.0 && dag.weights(k, j) == 0.0) continue;
            const int a = find(j);
            const int b = find(k);
            if (a == b) return false;
            root[a] = b;
        }
    }
    return true;
}

SafetyReport zscore_safety(const WeightedDag& dag, const Vector& error_variances,
                           int r, int k) {
    if (r == k) fail(ErrorCode::InvalidArgument, "zscore_safety: r and k must differ");
    if (r < 0 || r >= dag.p || k < 0 || k >= dag.p)
        fail(ErrorCode::InvalidArgument, "zscore_safety: variable out of range");

    const Matrix effects = total_effects(dag);
    const Vector var = marginal_variances(dag, error_variances);
    const double alpha = effects(k, r);
    const double lhs = var(k);
    const double rhs = alpha * alpha * var(r);

    SafetyReport report;
    const double tol = 1e-12 * std::max({lhs, rhs, 1.0});
    if (std::abs(lhs - rhs) <= tol)
        report.order = VarianceOrder::Boundary;
    else
        report.order = lhs > rhs ? VarianceOrder::Safe : VarianceOrder::Unsafe;

    const bool k_descendant = reachable_from(dag, r)[k];
    bool structural = !k_descendant;
    if (!structural) {
        // O(r, k): common ancestors of r and k with a path into k avoiding r.
        bool bypass = false;
        const std::vector<bool> into_k_avoiding_r = [&] {
            std::vector<bool> seen(dag.p, false);
            for (int j = 0; j < dag.p; ++j) {
                if (j == r || j == k) continue;
                if (reachable_from(dag, j, r)[k]) seen[j] = true;
            }
            return seen;
        }();
        for (int j = 0; j < dag.p && !bypass; ++j) {
            if (j == r || j == k || !into_k_avoiding_r[j]) continue;
            if (reachable_from(dag, j)[r] && reachable_from(dag, j)[k]) bypass = true;
        }
        structural = !bypass;
    }
    if (!structural && dag.weights.minCoeff() >= 0.0) structural = true;
    if (!structural && is_polytree(dag)) structural = true;
    report.structurally_safe = structural;
    return report;
}

}  // namespace rcd
