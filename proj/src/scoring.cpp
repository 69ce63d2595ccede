#include "scoring.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_set>

#include "csv.hpp"
#include "parallel.hpp"

namespace rcd {
namespace {

struct VectorHash {
    std::size_t operator()(const std::vector<int>& v) const {
        std::size_t h = v.size();
        for (int x : v) h = h * 1000003u + static_cast<std::size_t>(x) + 0x9e3779b9u;
        return h;
    }
};

Vector permute_vector(const Vector& v, const Permutation& perm) {
    Vector out(perm.size());
    for (int i = 0; i < perm.size(); ++i) out(i) = v(perm.forward[i]);
    return out;
}

Matrix permute_symmetric(const Matrix& m, const Permutation& perm) {
    const int p = perm.size();
    Matrix out(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) out(i, j) = m(perm.forward[i], perm.forward[j]);
    return out;
}

}  // namespace

Vector squared_zscores(const Vector& case_values, const Moments& moments,
                       const std::vector<std::string>& names) {
    const int p = static_cast<int>(case_values.size());
    Vector z(p);
    for (int j = 0; j < p; ++j) {
        if (moments.sd(j) == 0.0)
            fail(ErrorCode::InvalidArgument,
                 "squared_zscores: column '" + names[j] + "' has zero sample variance");
        const double d = (case_values(j) - moments.mean(j)) / moments.sd(j);
        z(j) = d * d;
    }
    return z;
}

Vector squared_zscores(const Dataset& ds) {
    return squared_zscores(ds.case_values, sample_moments(ds.observations), ds.names);
}

Vector xi_hat(const Matrix& lower, const Vector& mean_permuted,
              const Vector& case_permuted) {
    return forward_solve(lower, case_permuted - mean_permuted);
}

GapScore gap_score(const Vector& xi, const Permutation& perm) {
    const int p = static_cast<int>(xi.size());
    if (p < 2) fail(ErrorCode::InvalidArgument, "gap_score: need at least 2 entries");
    if (perm.size() != p)
        fail(ErrorCode::InvalidArgument, "gap_score: permutation size mismatch");
    int best_pos = 0;
    double best = std::abs(xi(0));
    double second = -1.0;
    for (int j = 1; j < p; ++j) {
        const double a = std::abs(xi(j));
        if (a > best) {
            second = best;
            best = a;
            best_pos = j;
        } else if (a > second) {
            second = a;
        }
    }
    GapScore out;
    out.winner = perm.forward[best_pos];
    if (second == 0.0)
        out.value = best > 0.0 ? Score::inf() : Score::finite(0.0);
    else
        out.value = Score::finite((best - second) / second);
    return out;
}

Permutation candidate_permutation(int p, const std::vector<int>& aberrant,
                                  int candidate, Rng& rng) {
    std::vector<bool> in_aberrant(p, false);
    for (int d : aberrant) in_aberrant[d] = true;
    if (!in_aberrant[candidate])
        fail(ErrorCode::InvalidArgument,
             "candidate_permutation: candidate must be aberrant");
    std::vector<int> head;
    std::vector<int> tail;
    for (int j = 0; j < p; ++j) {
        if (!in_aberrant[j])
            head.push_back(j);
        else if (j != candidate)
            tail.push_back(j);
    }
    rng.shuffle(head);
    rng.shuffle(tail);
    std::vector<int> fwd;
    fwd.reserve(p);
    fwd.insert(fwd.end(), head.begin(), head.end());
    fwd.push_back(candidate);
    fwd.insert(fwd.end(), tail.begin(), tail.end());
    return Permutation(std::move(fwd));
}

PermutationBatch generate_permutations(const Vector& zscores_sq, int v,
                                       const std::vector<double>* thresholds,
                                       const Rng& rng) {
    const int p = static_cast<int>(zscores_sq.size());
    if (v < 1) fail(ErrorCode::InvalidArgument, "generate_permutations: v must be positive");

    std::vector<double> ladder;
    if (thresholds != nullptr) {
        ladder = *thresholds;
    } else {
        ladder.resize(p);
        for (int i = 0; i < p; ++i) ladder[i] = zscores_sq(i);
    }

    PermutationBatch batch;
    std::unordered_set<std::vector<int>, VectorHash> seen;
    std::unordered_set<std::vector<int>, VectorHash> seen_sets;
    for (std::size_t t = 0; t < ladder.size(); ++t) {
        std::vector<int> aberrant;
        for (int j = 0; j < p; ++j)
            if (zscores_sq(j) >= ladder[t]) aberrant.push_back(j);
        if (aberrant.empty()) continue;
        // Thresholds that select the same aberrant set are one class.
        if (!seen_sets.insert(aberrant).second) continue;
        for (int d : aberrant) {
            for (int k = 0; k < v; ++k) {
                Rng stream = rng.child(t, static_cast<std::uint64_t>(d),
                                       static_cast<std::uint64_t>(k));
                Permutation perm = candidate_permutation(p, aberrant, d, stream);
                ++batch.generated;
                if (seen.insert(perm.forward).second)
                    batch.perms.push_back(std::move(perm));
            }
        }
    }
    return batch;
}

MomentModel estimate_moments(const Dataset& ds, CovMode mode, double alpha) {
    MomentModel model;
    model.mean = sample_moments(ds.observations).mean;
    model.covariance = covariance(ds.observations, mode, alpha).matrix;
    model.case_values = ds.case_values;
    return model;
}

std::vector<GapScore> score_permutations(const MomentModel& model,
                                         const std::vector<Permutation>& perms) {
    std::vector<GapScore> scored(perms.size());
    parallel_for(perms.size(), [&](std::size_t i) {
        const Permutation& perm = perms[i];
        const Matrix cov = permute_symmetric(model.covariance, perm);
        const CholeskyFactor chol = cholesky_lower(cov);
        const Vector xi = xi_hat(chol.lower, permute_vector(model.mean, perm),
                                 permute_vector(model.case_values, perm));
        scored[i] = gap_score(xi, perm);
    });
    return scored;
}

ScoreReport reduce_to_report(std::vector<std::string> names, Vector zscores_sq,
                             const std::vector<GapScore>& scored) {
    const int p = static_cast<int>(zscores_sq.size());
    ScoreReport report;
    report.names = std::move(names);
    report.zscores_sq = std::move(zscores_sq);
    report.rc_scores.assign(p, Score::finite(0.0));
    report.in_candidate_set.assign(p, false);
    report.fallback_weights = Vector::Zero(p);

    Score largest_finite = Score::finite(1.0);
    bool any_finite = false;
    for (const GapScore& g : scored) {
        if (!report.in_candidate_set[g.winner] ||
            report.rc_scores[g.winner] < g.value)
            report.rc_scores[g.winner] = g.value;
        report.in_candidate_set[g.winner] = true;
        if (!g.value.infinite && (!any_finite || largest_finite < g.value)) {
            largest_finite = g.value;
            any_finite = true;
        }
    }

    std::vector<int> rest;
    for (int i = 0; i < p; ++i)
        if (!report.in_candidate_set[i]) rest.push_back(i);
    if (rest.empty()) return report;

    // Half of the smallest candidate score; when every candidate is infinite
    // the halved largest finite gap (1 when none was seen) stands in, which
    // keeps the fallback strictly below the candidates.
    bool have_candidate = false;
    Score smallest = Score::inf();
    for (int i = 0; i < p; ++i) {
        if (!report.in_candidate_set[i]) continue;
        have_candidate = true;
        if (report.rc_scores[i] < smallest) smallest = report.rc_scores[i];
    }
    double c_min;
    if (have_candidate && !smallest.infinite)
        c_min = smallest.value / 2.0;
    else
        c_min = (any_finite ? largest_finite.value : 1.0) / 2.0;

    double weight_sum = 0.0;
    for (int i : rest) weight_sum += report.zscores_sq(i);
    for (int i : rest) {
        const double w = weight_sum > 0.0
                             ? report.zscores_sq(i) / weight_sum
                             : 1.0 / static_cast<double>(rest.size());
        report.fallback_weights(i) = w;
        report.rc_scores[i] = Score::finite(w * c_min);
    }
    return report;
}

ScoreReport rc_scores(const Dataset& ds, const ScoreOptions& opts) {
    validate_dataset(ds, /*require_variation=*/false);
    if (ds.p() < 2) fail(ErrorCode::InvalidArgument, "rc_scores: need at least 2 variables");
    const Vector zsq = squared_zscores(ds);
    const Rng rng(opts.seed);
    const std::vector<double>* ladder =
        opts.thresholds.has_value() ? &*opts.thresholds : nullptr;
    PermutationBatch batch = generate_permutations(zsq, opts.v, ladder, rng);
    const MomentModel model = estimate_moments(ds, opts.cov_mode, opts.shrink_alpha);
    const std::vector<GapScore> scored = score_permutations(model, batch.perms);
    return reduce_to_report(ds.names, zsq, scored);
}

ScoreReport rc_scores_all_perms(const Dataset& ds, CovMode mode, double alpha) {
    validate_dataset(ds, /*require_variation=*/false);
    const int p = ds.p();
    if (p < 2) fail(ErrorCode::InvalidArgument, "rc_scores_all_perms: need p >= 2");
    if (p > 8)
        fail(ErrorCode::InvalidArgument,
             "rc_scores_all_perms: p = " + std::to_string(p) +
                 " exceeds the exhaustive limit of 8");
    std::vector<int> fwd(p);
    std::iota(fwd.begin(), fwd.end(), 0);
    std::vector<Permutation> perms;
    do {
        perms.emplace_back(fwd);
    } while (std::next_permutation(fwd.begin(), fwd.end()));

    const Vector zsq = squared_zscores(ds);
    const MomentModel model = estimate_moments(ds, mode, alpha);
    const std::vector<GapScore> scored = score_permutations(model, perms);
    return reduce_to_report(ds.names, zsq, scored);
}

Vector population_xi(const Sem& sem, const Permutation& perm, const Intervention& iv) {
    validate_sem(sem);
    if (perm.size() != sem.p())
        fail(ErrorCode::InvalidArgument, "population_xi: permutation size mismatch");
    if (iv.target < 0 || iv.target >= sem.p())
        fail(ErrorCode::InvalidArgument, "population_xi: intervention target out of range");
    const Matrix effects = total_effects(sem.dag);
    const Vector shift = effects.col(iv.target) * iv.shift;  // mean of X^I minus mean of X
    const Matrix cov = permute_symmetric(population_covariance(sem), perm);
    const CholeskyFactor chol = cholesky_lower(cov);
    return forward_solve(chol.lower, permute_vector(shift, perm));
}

bool is_sufficient(const WeightedDag& dag, const Permutation& perm, int r) {
    if (r < 0 || r >= dag.p) fail(ErrorCode::InvalidArgument, "is_sufficient: bad root");
    if (perm.size() != dag.p)
        fail(ErrorCode::InvalidArgument, "is_sufficient: permutation size mismatch");
    const GraphSets sets = graph_sets(dag, r);
    const int pos_r = perm.inverse[r];
    for (int k : sets.parents)
        if (perm.inverse[k] >= pos_r) return false;
    for (int k : sets.real_descendants)
        if (perm.inverse[k] <= pos_r) return false;
    return true;
}

std::string report_to_csv(const ScoreReport& report) {
    std::string out = "variable,zscore_sq,rc_score,in_candidate_set\n";
    const int p = static_cast<int>(report.names.size());
    for (int i = 0; i < p; ++i) {
        out += report.names[i];
        out += ',';
        out += format_double(report.zscores_sq(i));
        out += ',';
        out += report.rc_scores[i].infinite ? "inf" : format_double(report.rc_scores[i].value);
        out += ',';
        out += report.in_candidate_set[i] ? '1' : '0';
        out += '\n';
    }
    return out;
}

void write_report_csv(const ScoreReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::Io, "cannot write " + path);
    out << report_to_csv(report);
    if (!out) fail(ErrorCode::Io, "write failed for " + path);
}

std::vector<double> default_threshold_ladder() {
    std::vector<double> ladder;
    for (int i = 0;; ++i) {
        const double t = 0.1 + 0.2 * i;
        if (t > 5.0 + 1e-12) break;
        ladder.push_back(t);
    }
    return ladder;
}

}  // namespace rcd
