#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "fixtures.hpp"
#include "graph.hpp"
#include "oracles.hpp"
#include "sem.hpp"

using namespace rcd;
using rcd::testing::confounded_chain;
using rcd::testing::five_node_demo;
using rcd::testing::path_sum_effect;

namespace {

int edge_count(const WeightedDag& dag) {
    int count = 0;
    for (int i = 0; i < dag.p; ++i)
        for (int j = 0; j < dag.p; ++j)
            if (dag.weights(i, j) != 0.0) ++count;
    return count;
}

}  // namespace

TEST_CASE("random dag: zero sparsity gives the empty graph") {
    Rng rng(1);
    const WeightedDag dag = random_dag(5, 0.0, rng);
    CHECK(edge_count(dag) == 0);
}

TEST_CASE("random dag: sparsity one on two nodes forces the single edge") {
    Rng rng(2);
    const WeightedDag dag = random_dag(2, 1.0, rng);
    CHECK(edge_count(dag) == 1);
    CHECK(dag.weights(1, 0) != 0.0);
    CHECK(std::abs(dag.weights(1, 0)) < 1.0);
}

TEST_CASE("random dag: edge count concentrates at s * p(p-1)/2") {
    Rng rng(3);
    const WeightedDag dag = random_dag(100, 0.4, rng);
    const double trials = 100.0 * 99.0 / 2.0;
    const double expected = 0.4 * trials;
    const double sd = std::sqrt(trials * 0.4 * 0.6);
    CHECK(std::abs(edge_count(dag) - expected) <= 3.0 * sd);
}

TEST_CASE("generated dags honor their causal order certificate") {
    Rng rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        const WeightedDag dag = random_dag(2 + static_cast<int>(rng.below(10)),
                                           rng.uniform01(), rng);
        // validate_dag asserts exact strict lower-triangularity under the order.
        CHECK_NOTHROW(validate_dag(dag));
    }
}

TEST_CASE("hub dag: paper-sized layouts") {
    Rng rng(5);
    HubLayout small;  // 4 hubs, 15 upper, 10 lower
    CHECK(small.total_variables() == 104);
    const WeightedDag dag = hub_dag(small, rng);
    CHECK(dag.p == 104);
    CHECK_NOTHROW(validate_dag(dag));

    HubLayout large;
    large.n_hubs = 20;
    large.upper = 30;
    large.lower = 20;
    large.cross_in = 9;
    large.cross_out = 6;
    large.s = 0.2;
    CHECK(large.total_variables() == 1020);
    Rng rng2(6);
    const WeightedDag big = hub_dag(large, rng2);
    CHECK(big.p == 1020);
    CHECK_NOTHROW(validate_dag(big));
}

TEST_CASE("hub dag: single hub has full in/out degree and no cross edges") {
    Rng rng(7);
    HubLayout layout;
    layout.n_hubs = 1;
    layout.upper = 6;
    layout.lower = 4;
    layout.cross_in = 0;
    layout.cross_out = 0;
    layout.s = 0.5;
    const WeightedDag dag = hub_dag(layout, rng);
    const int hub = 6;  // after the single upper block
    int in_degree = 0;
    int out_degree = 0;
    for (int j = 0; j < dag.p; ++j) {
        if (dag.weights(hub, j) != 0.0) ++in_degree;
        if (dag.weights(j, hub) != 0.0) ++out_degree;
    }
    CHECK(in_degree == 6);
    CHECK(out_degree == 4);
}

TEST_CASE("hub dag: cross edge counts are validated") {
    Rng rng(8);
    HubLayout layout;
    layout.n_hubs = 2;
    layout.upper = 3;
    layout.lower = 2;
    layout.cross_in = 4;  // only 3 foreign upper nodes exist
    CHECK_THROWS_AS(hub_dag(layout, rng), Error);
}

TEST_CASE("hub dag: every hub receives exactly upper + cross_in edges") {
    Rng rng(9);
    HubLayout layout;
    layout.n_hubs = 3;
    layout.upper = 5;
    layout.lower = 4;
    layout.cross_in = 2;
    layout.cross_out = 3;
    layout.s = 0.3;
    const WeightedDag dag = hub_dag(layout, rng);
    const int hub_base = 15;
    for (int h = 0; h < 3; ++h) {
        int in_degree = 0;
        for (int j = 0; j < dag.p; ++j)
            if (dag.weights(hub_base + h, j) != 0.0) ++in_degree;
        CHECK(in_degree == layout.upper + layout.cross_in);
        int out_degree = 0;
        for (int j = 0; j < dag.p; ++j)
            if (dag.weights(j, hub_base + h) != 0.0) ++out_degree;
        CHECK(out_degree == layout.lower + layout.cross_out);
    }
}

TEST_CASE("total effects: empty graph gives the identity") {
    Rng rng(10);
    const WeightedDag dag = random_dag(4, 0.0, rng);
    CHECK((total_effects(dag) - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("total effects on the confounded chain match hand values") {
    const Sem sem = confounded_chain();
    const Matrix t = total_effects(sem.dag);
    CHECK(t(1, 0) == doctest::Approx(2.0));    // effect of 1 on 2
    CHECK(t(2, 0) == doctest::Approx(-1.0));   // direct 1 plus 2 * (-1)
    CHECK(t(2, 1) == doctest::Approx(-1.0));
    for (int i = 0; i < 3; ++i) CHECK(t(i, i) == doctest::Approx(1.0));
}

TEST_CASE("total effects equal the path-sum brute force on small graphs") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const int p = 2 + static_cast<int>(rng.below(5));
        const WeightedDag dag = random_dag(p, 0.5, rng);
        const Matrix t = total_effects(dag);
        for (int r = 0; r < p; ++r)
            for (int k = 0; k < p; ++k)
                CHECK(std::abs(t(k, r) - path_sum_effect(dag, r, k)) < 1e-10);
    }
}

TEST_CASE("graph sets: empty graph") {
    Rng rng(12);
    const WeightedDag dag = random_dag(3, 0.0, rng);
    const GraphSets sets = graph_sets(dag, 1);
    CHECK(sets.parents.empty());
    CHECK(sets.ancestors.empty());
    CHECK(sets.descendants.empty());
    CHECK(sets.real_descendants.empty());
}

TEST_CASE("graph sets on the confounded chain") {
    const Sem sem = confounded_chain();
    const GraphSets sets = graph_sets(sem.dag, 1);
    CHECK(sets.parents == std::vector<int>{0});
    CHECK(sets.descendants == std::vector<int>{2});
    CHECK(sets.ancestors == std::vector<int>{0});
    CHECK(sets.real_descendants == std::vector<int>{2});
}

TEST_CASE("real descendants are a subset of descendants") {
    Rng rng(13);
    for (int trial = 0; trial < 40; ++trial) {
        const int p = 3 + static_cast<int>(rng.below(6));
        const WeightedDag dag = random_dag(p, 0.5, rng);
        for (int j = 0; j < p; ++j) {
            const GraphSets sets = graph_sets(dag, j);
            const std::set<int> de(sets.descendants.begin(), sets.descendants.end());
            for (int k : sets.real_descendants) CHECK(de.count(k) == 1);
        }
    }
}

TEST_CASE("real descendants equal descendants without path cancellation") {
    // Continuous weights make exact cancellation measure zero; check equality
    // whenever no total effect sits in the numerical gray zone.
    Rng rng(14);
    int checked = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const int p = 3 + static_cast<int>(rng.below(5));
        const WeightedDag dag = random_dag(p, 0.5, rng);
        const Matrix t = total_effects(dag);
        bool near_cancel = false;
        for (int i = 0; i < p && !near_cancel; ++i)
            for (int j = 0; j < p && !near_cancel; ++j)
                if (i != j && t(i, j) != 0.0 && std::abs(t(i, j)) < 1e-6) near_cancel = true;
        if (near_cancel) continue;
        ++checked;
        for (int j = 0; j < p; ++j) {
            const GraphSets sets = graph_sets(dag, j);
            CHECK(sets.real_descendants == sets.descendants);
        }
    }
    CHECK(checked > 40);
}

TEST_CASE("variance order on the confounded chain") {
    const Sem sem = confounded_chain();

    // Intervening on the middle variable: the collider is the unsafe one.
    const SafetyReport r23 = zscore_safety(sem.dag, sem.error_variances, 1, 2);
    CHECK(r23.order == VarianceOrder::Unsafe);
    CHECK_FALSE(r23.structurally_safe);

    // Intervening on the source: everything is safe.
    for (int k : {1, 2}) {
        const SafetyReport r = zscore_safety(sem.dag, sem.error_variances, 0, k);
        CHECK(r.order == VarianceOrder::Safe);
    }
    // Variable 1 is not downstream of 2, hence structurally safe.
    CHECK(zscore_safety(sem.dag, sem.error_variances, 1, 0).structurally_safe);
}

TEST_CASE("boundary ties are reported distinctly") {
    // Chain 1 -> 2 with the child's own noise shrunk to nothing: the child
    // variance equals the propagated share within rounding.
    Matrix b = Matrix::Zero(2, 2);
    b(1, 0) = 1.0;
    WeightedDag chain(std::move(b), {0, 1});
    Vector tie_vars(2);
    tie_vars << 1.0, 1e-300;
    const SafetyReport tie = zscore_safety(chain, tie_vars, 0, 1);
    CHECK(tie.order == VarianceOrder::Boundary);

    Vector clear_vars(2);
    clear_vars << 1.0, 1.0;
    CHECK(zscore_safety(chain, clear_vars, 0, 1).order == VarianceOrder::Safe);
}

TEST_CASE("polytrees and nonnegative weights are structurally safe everywhere") {
    // Chain with an extra branch: a polytree.
    Matrix b = Matrix::Zero(4, 4);
    b(1, 0) = -0.8;
    b(2, 1) = 1.2;
    b(3, 1) = 0.7;
    WeightedDag poly(std::move(b), {0, 1, 2, 3});
    CHECK(is_polytree(poly));
    Vector vars = Vector::Ones(4);
    for (int r = 0; r < 4; ++r)
        for (int k = 0; k < 4; ++k) {
            if (r == k) continue;
            CHECK(zscore_safety(poly, vars, r, k).structurally_safe);
        }

    // Dense nonnegative graph: not a polytree, still structurally safe.
    Matrix b2 = Matrix::Zero(3, 3);
    b2(1, 0) = 0.5;
    b2(2, 0) = 0.25;
    b2(2, 1) = 0.75;
    WeightedDag nonneg(std::move(b2), {0, 1, 2});
    CHECK_FALSE(is_polytree(nonneg));
    Vector vars3 = Vector::Ones(3);
    for (int r = 0; r < 3; ++r)
        for (int k = 0; k < 3; ++k) {
            if (r == k) continue;
            CHECK(zscore_safety(nonneg, vars3, r, k).structurally_safe);
        }
}

TEST_CASE("structural safety implies the variance ordering") {
    Rng rng(16);
    int safes = 0;
    for (int trial = 0; trial < 120; ++trial) {
        const int p = 2 + static_cast<int>(rng.below(6));
        const WeightedDag dag = random_dag(p, rng.uniform(0.2, 0.8), rng);
        Vector vars(p);
        for (int j = 0; j < p; ++j) vars(j) = rng.uniform(0.5, 2.0);
        for (int r = 0; r < p; ++r)
            for (int k = 0; k < p; ++k) {
                if (r == k) continue;
                const SafetyReport report = zscore_safety(dag, vars, r, k);
                if (report.structurally_safe) {
                    ++safes;
                    CHECK(report.order == VarianceOrder::Safe);
                }
            }
    }
    CHECK(safes > 500);
}

TEST_CASE("rescaling hits the targets exactly in the analytic variance") {
    Rng rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        const int p = 2 + static_cast<int>(rng.below(9));
        const WeightedDag dag = random_dag(p, 0.5, rng);
        Sem sem = make_sem(WeightedDag(dag), ErrorFamily::Gaussian, rng);
        Vector targets(p);
        for (int j = 0; j < p; ++j) targets(j) = rng.uniform(10.0, 50.0);
        const Sem scaled = rescale_to_target_variances(sem, targets);
        const Vector var = marginal_variances(scaled.dag, scaled.error_variances);
        for (int j = 0; j < p; ++j)
            CHECK(std::abs(var(j) - targets(j)) <= 1e-9 * targets(j));
    }
}

TEST_CASE("rescaling a sourceless model only touches error variances") {
    Rng rng(18);
    const WeightedDag dag = random_dag(4, 0.0, rng);
    Sem sem = make_sem(WeightedDag(dag), ErrorFamily::Gaussian, rng);
    Vector targets(4);
    targets << 11.0, 12.0, 13.0, 14.0;
    const Sem scaled = rescale_to_target_variances(sem, targets);
    CHECK((scaled.error_variances - targets).cwiseAbs().maxCoeff() == 0.0);
    CHECK(scaled.dag.weights.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("rescaling the two-chain matches the closed form") {
    Sem sem = rcd::testing::integer_chain(2.0);
    Vector targets(2);
    targets << 10.0, 50.0;
    const Sem scaled = rescale_to_target_variances(sem, targets);
    // Var(X1) = 10; Var(X2) = w^2 * 10 + 1 must equal 50, so w^2 = 4.9.
    CHECK(scaled.error_variances(0) == doctest::Approx(10.0));
    const double w = scaled.dag.weights(1, 0);
    CHECK(w * w * 10.0 + scaled.error_variances(1) == doctest::Approx(50.0));
    CHECK(w * w == doctest::Approx(4.9));
}

TEST_CASE("rescaled models reproduce their targets in monte carlo") {
    Rng rng(19);
    const WeightedDag dag = random_dag(10, 0.4, rng);
    Sem sem = make_sem(WeightedDag(dag), ErrorFamily::Gaussian, rng);
    Vector targets(10);
    for (int j = 0; j < 10; ++j) targets(j) = rng.uniform(10.0, 50.0);
    const Sem scaled = rescale_to_target_variances(sem, targets);
    Rng sample_rng(20);
    const Matrix data = sample_observational(scaled, 1000000, sample_rng);
    const Moments m = sample_moments(data);
    for (int j = 0; j < 10; ++j) {
        const double observed = m.sd(j) * m.sd(j);
        CHECK(std::abs(observed - targets(j)) < 0.02 * targets(j));
    }
}

TEST_CASE("rescale validates its preconditions") {
    Sem sem = rcd::testing::integer_chain(1.0);
    Vector bad(2);
    bad << 4.0, 0.5;  // below the child's unit error variance
    CHECK_THROWS_AS(rescale_to_target_variances(sem, bad), Error);
}

TEST_CASE("zero-shift intervention replays the observational stream") {
    const Sem sem = five_node_demo();
    Rng a(77);
    Rng b(77);
    const Matrix obs = sample_observational(sem, 1, a);
    const Vector iv = sample_interventional(sem, Intervention{2, 0.0}, b);
    CHECK((obs.row(0).transpose() - iv).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("demo model: shift propagates to everything but the non-descendant") {
    const Sem sem = five_node_demo();
    const Matrix t = total_effects(sem.dag);
    const Vector shift = t.col(2) * 10.0;  // intervene on variable 3
    CHECK(shift(3) == 0.0);                // variable 4 is untouched
    for (int j : {0, 1, 2, 4}) CHECK(std::abs(shift(j)) > 1.0);

    // Empirically: interventional draw minus the paired observational draw
    // averages to the analytic shift (shared noise cancels exactly).
    Rng rng(21);
    const int n = 20000;
    Vector mean_shift = Vector::Zero(5);
    for (int i = 0; i < n; ++i) {
        Rng case_rng = rng.child(static_cast<std::uint64_t>(i));
        Rng obs_rng = rng.child(static_cast<std::uint64_t>(i));
        const Vector xi = sample_interventional(sem, Intervention{2, 10.0}, case_rng);
        const Vector xo = sample_observational(sem, 1, obs_rng).row(0).transpose();
        mean_shift += (xi - xo) / n;
    }
    CHECK((mean_shift - shift).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("observational sample mean approaches (I-B)^{-1} b") {
    const Sem sem = confounded_chain();
    const Vector mu = population_mean(sem);
    Rng rng(22);
    const Matrix data = sample_observational(sem, 100000, rng);
    const Moments m = sample_moments(data);
    for (int j = 0; j < 3; ++j) {
        const double se = m.sd(j) / std::sqrt(100000.0);
        CHECK(std::abs(m.mean(j) - mu(j)) < 3.5 * se);
    }
}

TEST_CASE("uniform errors hit the requested variance") {
    Sem sem = rcd::testing::integer_chain(0.0);
    sem.error_family = {ErrorFamily::Uniform, ErrorFamily::Uniform};
    sem.error_variances << 4.0, 0.25;
    Rng rng(23);
    const Matrix data = sample_observational(sem, 200000, rng);
    const Moments m = sample_moments(data);
    CHECK(m.sd(0) * m.sd(0) == doctest::Approx(4.0).epsilon(0.02));
    CHECK(m.sd(1) * m.sd(1) == doctest::Approx(0.25).epsilon(0.02));
    // Bounded support: |x| <= sqrt(3 sigma^2).
    CHECK(data.col(0).cwiseAbs().maxCoeff() <= std::sqrt(12.0));
}

TEST_CASE("variable shuffling relabels the model consistently") {
    Rng rng(24);
    const WeightedDag dag = random_dag(6, 0.5, rng);
    Sem sem = make_sem(WeightedDag(dag), ErrorFamily::Gaussian, rng);
    const Permutation perm = random_permutation(6, rng);
    const Sem shuffled = apply_variable_permutation(sem, perm);
    CHECK_NOTHROW(validate_sem(shuffled));
    // Marginal variances travel with the labels.
    const Vector before = marginal_variances(sem.dag, sem.error_variances);
    const Vector after = marginal_variances(shuffled.dag, shuffled.error_variances);
    for (int i = 0; i < 6; ++i)
        CHECK(after(i) == doctest::Approx(before(perm.forward[i])).epsilon(1e-12));
}

TEST_CASE("model json round trips") {
    Rng rng(25);
    const WeightedDag dag = random_dag(5, 0.6, rng);
    Sem sem = make_sem(WeightedDag(dag), ErrorFamily::Uniform, rng);
    const std::string text = sem_to_json(sem);
    const Sem back = sem_from_json(text);
    CHECK(back.p() == 5);
    CHECK((back.dag.weights - sem.dag.weights).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.intercept - sem.intercept).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.error_variances - sem.error_variances).cwiseAbs().maxCoeff() == 0.0);
    CHECK(back.dag.causal_order == sem.dag.causal_order);
    CHECK(back.error_family == sem.error_family);

    CHECK_THROWS_AS(sem_from_json("{ not json"), Error);
    CHECK_THROWS_AS(sem_from_json("{\"p\": 2}"), Error);
}
