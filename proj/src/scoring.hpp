#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "numerics.hpp"
#include "rng.hpp"
#include "sem.hpp"
#include "types.hpp"

namespace rcd {

// Squared z-scores of the case against the reference columns. A zero-spread
// column is an error naming the column.
Vector squared_zscores(const Dataset& ds);
Vector squared_zscores(const Vector& case_values, const Moments& moments,
                       const std::vector<std::string>& names);

// L^{-1} (case - mean) without forming the inverse. Inputs must already be
// permuted consistently.
Vector xi_hat(const Matrix& lower, const Vector& mean_permuted,
              const Vector& case_permuted);

// Sparsity-gap statistic of a whitened shift: (|xi|_(1) - |xi|_(2)) / |xi|_(2),
// infinite when the vector is 1-sparse. winner is the variable whose position
// attains the largest magnitude, earliest position on exact ties.
struct GapScore {
    Score value;
    int winner = 0;
};

GapScore gap_score(const Vector& xi, const Permutation& perm);

// One permutation of the form (rest, candidate, remaining aberrant): the
// construction that is guaranteed to be sufficient when `aberrant` is the
// root cause together with its real descendants and `candidate` is the root
// cause. Orderings inside the two groups are drawn from rng.
Permutation candidate_permutation(int p, const std::vector<int>& aberrant,
                                  int candidate, Rng& rng);

struct PermutationBatch {
    std::vector<Permutation> perms;
    std::size_t generated = 0;  // before duplicate removal
};

// Threshold sweep over the squared z-scores (default: every observed value,
// optionally a fixed list), emitting v randomized permutations per aberrant
// candidate. Exact duplicates are dropped. Substreams are derived per
// (threshold, candidate, repeat), so the output is independent of evaluation
// order.
PermutationBatch generate_permutations(const Vector& zscores_sq, int v,
                                       const std::vector<double>* thresholds,
                                       const Rng& rng);

// First and second moments the permutation scoring consumes. Estimated from
// data in the standard pipeline; tests may inject exact population values.
struct MomentModel {
    Vector mean;
    Matrix covariance;
    Vector case_values;
};

MomentModel estimate_moments(const Dataset& ds, CovMode mode, double alpha);

// Gap score of every permutation, in input order.
std::vector<GapScore> score_permutations(const MomentModel& model,
                                         const std::vector<Permutation>& perms);

struct ScoreReport {
    std::vector<std::string> names;
    Vector zscores_sq;
    std::vector<Score> rc_scores;
    std::vector<bool> in_candidate_set;
    Vector fallback_weights;  // zero for candidates
    std::optional<int> root_cause_rank;
};

struct ScoreOptions {
    int v = 10;
    // Empty optional: thresholds are the observed squared z-scores.
    std::optional<std::vector<double>> thresholds;
    CovMode cov_mode = CovMode::Auto;
    double shrink_alpha = kDefaultShrinkAlpha;
    std::uint64_t seed = 0;
};

// The main estimator: permutation search driven by aberrancy thresholds,
// candidate scores from the sparsity gap, and a z-score-weighted fallback
// below every candidate.
ScoreReport rc_scores(const Dataset& ds, const ScoreOptions& opts);

// Exhaustive variant over all p! permutations; the small-p oracle.
// Guarded at p <= 8.
ScoreReport rc_scores_all_perms(const Dataset& ds, CovMode mode = CovMode::Auto,
                                double alpha = kDefaultShrinkAlpha);

// Exact whitened mean shift of a known model under a permutation.
Vector population_xi(const Sem& sem, const Permutation& perm, const Intervention& iv);

// Parents of r precede it and real descendants follow it.
bool is_sufficient(const WeightedDag& dag, const Permutation& perm, int r);

// Candidate reduction shared by the plain, exhaustive, and high-dimensional
// scorers: max gap per nominated variable, fallback weights for the rest.
ScoreReport reduce_to_report(std::vector<std::string> names, Vector zscores_sq,
                             const std::vector<GapScore>& scored);

// variable,zscore_sq,rc_score,in_candidate_set with round-trip floats;
// infinite scores serialize as "inf".
std::string report_to_csv(const ScoreReport& report);
void write_report_csv(const ScoreReport& report, const std::string& path);

// Fixed threshold ladder used by the simulation protocol: 0.1, 0.3, ... up
// to 5.
std::vector<double> default_threshold_ladder();

}  // namespace rcd
