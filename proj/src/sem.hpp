#pragma once

#include <string>
#include <vector>

#include "graph.hpp"
#include "rng.hpp"
#include "types.hpp"

namespace rcd {

enum class ErrorFamily { Gaussian, Uniform };

// Mean-shift intervention on a single variable.
struct Intervention {
    int target = 0;
    double shift = 0.0;
};

// Linear structural equation model X <- b + B X + eps with independent
// zero-mean errors. Uniform errors are realized as U(-a, a) with
// a = sqrt(3 * variance) so the requested variance is matched.
struct Sem {
    WeightedDag dag;
    Vector intercept;
    std::vector<ErrorFamily> error_family;
    Vector error_variances;

    int p() const { return dag.p; }
};

void validate_sem(const Sem& sem);

// Strictly lower-triangular weights with identity causal order; each edge is
// present with probability s and weighted U(-1, 1).
WeightedDag random_dag(int p, double s, Rng& rng);

struct HubLayout {
    int n_hubs = 4;
    int upper = 15;     // block of nodes feeding each hub
    int lower = 10;     // block of nodes fed by each hub
    int cross_in = 4;   // extra feeders sampled from other upper blocks
    int cross_out = 3;  // extra targets sampled from other lower blocks
    double s = 0.4;     // within-block sparsity

    int total_variables() const { return n_hubs * (1 + upper + lower); }
};

// Hub graph: all upper blocks, then the hubs, then all lower blocks, which
// is also the causal order. Each hub takes edges from its whole upper block
// plus cross_in foreign upper nodes, and feeds its whole lower block plus
// cross_out foreign lower nodes; blocks are internally random DAGs.
WeightedDag hub_dag(const HubLayout& layout, Rng& rng);

// Gaussian SEM pieces around a DAG: intercepts U(-10,10) and error variances
// U(1,2) by default, matching the simulation protocol.
Sem make_sem(WeightedDag dag, ErrorFamily family, Rng& rng,
             double var_lo = 1.0, double var_hi = 2.0,
             double intercept_lo = -10.0, double intercept_hi = 10.0);

// Rescales edge weights row by row along the causal order so every marginal
// variance lands exactly on its target; source nodes get their error
// variance replaced by the target instead. Targets must exceed the error
// variance of every non-source node.
Sem rescale_to_target_variances(const Sem& sem, const Vector& targets);

// Relabels variables: new variable i is old variable perm.forward[i].
Sem apply_variable_permutation(const Sem& sem, const Permutation& perm);
Permutation random_permutation(int p, Rng& rng);

Matrix sample_observational(const Sem& sem, int n, Rng& rng);
Vector sample_interventional(const Sem& sem, const Intervention& iv, Rng& rng);

// E[X] = (I-B)^{-1} b and Cov(X) = (I-B)^{-1} D (I-B)^{-T}.
Vector population_mean(const Sem& sem);
Matrix population_covariance(const Sem& sem);

std::string sem_to_json(const Sem& sem);
Sem sem_from_json(const std::string& text);
void save_sem(const Sem& sem, const std::string& path);
Sem load_sem(const std::string& path);

}  // namespace rcd
