#include "highdim.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "lasso.hpp"
#include "parallel.hpp"

namespace rcd {

SubsystemOutcome subsystem_candidate_score(const MomentModel& model,
                                           const Vector& zscores_sq_sub,
                                           int response_pos, int v,
                                           const std::vector<double>* thresholds,
                                           const Rng& rng) {
    PermutationBatch batch = generate_permutations(zscores_sq_sub, v, thresholds, rng);
    const std::vector<GapScore> scored = score_permutations(model, batch.perms);
    SubsystemOutcome outcome;
    for (const GapScore& g : scored) {
        if (g.winner != response_pos) continue;
        if (!outcome.nominated || outcome.score < g.value) outcome.score = g.value;
        outcome.nominated = true;
    }
    return outcome;
}

HighdimReport rc_scores_highdim(const Dataset& ds, const HighdimOptions& opts) {
    validate_dataset(ds, /*require_variation=*/false);
    const int p = ds.p();
    const int n = ds.n();
    const Moments moments = sample_moments(ds.observations);
    const Vector zsq = squared_zscores(ds.case_values, moments, ds.names);
    const Rng rng(opts.seed);
    const std::vector<double>* ladder =
        opts.thresholds.has_value() ? &*opts.thresholds : nullptr;

    std::vector<int> responses;
    for (int i = 0; i < p; ++i)
        if (zsq(i) > opts.response_threshold) responses.push_back(i);

    std::vector<ResponseLog> logs(responses.size());
    std::vector<std::optional<Score>> candidate_scores(responses.size());

    parallel_for(responses.size(), [&](std::size_t idx) {
        const int i = responses[idx];
        ResponseLog& log = logs[idx];
        log.variable = i;

        // Blanket via cross-validated lasso of column i on the others.
        Matrix x(n, p - 1);
        std::vector<int> col_of(p - 1);
        int c = 0;
        for (int j = 0; j < p; ++j) {
            if (j == i) continue;
            x.col(c) = ds.observations.col(j);
            col_of[c] = j;
            ++c;
        }
        const Rng resp_rng = rng.child(static_cast<std::uint64_t>(i), 0x686400ull);
        LassoFit fit;
        try {
            fit = cv_lasso(x, ds.observations.col(i), opts.cv_folds, opts.cv_grid,
                           opts.cv_lambda_min_ratio, resp_rng.child(1));
        } catch (const Error& e) {
            log.skip_reason = std::string("lasso failed: ") + e.what();
            return;
        }
        log.lambda = fit.lambda;
        log.blanket_size = static_cast<int>(fit.support.size());
        if (fit.support.empty()) {
            log.skip_reason = "empty blanket";
            return;
        }

        std::vector<int> subset;
        subset.push_back(i);
        for (int s : fit.support) subset.push_back(col_of[s]);
        std::sort(subset.begin(), subset.end());
        const int response_pos = static_cast<int>(
            std::lower_bound(subset.begin(), subset.end(), i) - subset.begin());

        const Dataset sub = select_columns(ds, subset);
        Vector zsq_sub(static_cast<int>(subset.size()));
        for (std::size_t k = 0; k < subset.size(); ++k)
            zsq_sub(static_cast<int>(k)) = zsq(subset[k]);

        try {
            const MomentModel model =
                estimate_moments(sub, opts.cov_mode, opts.shrink_alpha);
            const SubsystemOutcome outcome = subsystem_candidate_score(
                model, zsq_sub, response_pos, opts.v, ladder, resp_rng.child(2));
            if (outcome.nominated) {
                candidate_scores[idx] = outcome.score;
                log.nominated = true;
            }
        } catch (const Error& e) {
            log.skip_reason = std::string("subsystem scoring failed: ") + e.what();
        }
    });

    // Assemble: nominated responses keep their subsystem gap, the rest share
    // the weighted floor, exactly as in the low-dimensional reduction.
    std::vector<GapScore> as_gap_scores;
    for (std::size_t idx = 0; idx < responses.size(); ++idx) {
        if (!candidate_scores[idx].has_value()) continue;
        GapScore g;
        g.winner = responses[idx];
        g.value = *candidate_scores[idx];
        as_gap_scores.push_back(g);
    }
    HighdimReport report;
    report.scores = reduce_to_report(ds.names, zsq, as_gap_scores);
    report.responses = std::move(logs);
    return report;
}

std::string highdim_meta_json(const HighdimReport& report) {
    nlohmann::json j;
    j["responses"] = nlohmann::json::array();
    for (const ResponseLog& log : report.responses) {
        nlohmann::json r;
        r["variable"] = report.scores.names[static_cast<std::size_t>(log.variable)];
        r["blanket_size"] = log.blanket_size;
        r["lambda"] = log.lambda;
        r["nominated"] = log.nominated;
        if (!log.skip_reason.empty()) r["skip_reason"] = log.skip_reason;
        j["responses"].push_back(std::move(r));
    }
    return j.dump(2);
}

void write_highdim_meta_json(const HighdimReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::Io, "cannot write " + path);
    out << highdim_meta_json(report) << '\n';
    if (!out) fail(ErrorCode::Io, "write failed for " + path);
}

}  // namespace rcd
