#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "scoring.hpp"

namespace rcd {

struct HighdimOptions {
    // Variables with squared z-score above this become responses; set to
    // -infinity to scan everything.
    double response_threshold = 1.5;
    int v = 20;
    std::optional<std::vector<double>> thresholds;  // empty: observed z-scores
    int cv_folds = 5;
    int cv_grid = 100;
    double cv_lambda_min_ratio = 1e-3;
    CovMode cov_mode = CovMode::Auto;
    double shrink_alpha = kDefaultShrinkAlpha;
    std::uint64_t seed = 0;
};

// Per-response record for the diagnostics sidecar.
struct ResponseLog {
    int variable = 0;           // 0-based
    int blanket_size = 0;
    double lambda = 0.0;
    bool nominated = false;     // entered the candidate set of its subsystem
    std::string skip_reason;    // empty unless the response fell through
};

struct HighdimReport {
    ScoreReport scores;
    std::vector<ResponseLog> responses;
};

// Node-wise dimension reduction: each sufficiently aberrant variable is
// regressed on the rest with cross-validated lasso, the scorer runs on the
// variable plus its estimated blanket, and a variable that wins inside its
// own subsystem keeps that gap score. Everything else falls back to the
// z-score-weighted floor. Isolated numerical failures skip the response
// rather than aborting the run.
HighdimReport rc_scores_highdim(const Dataset& ds, const HighdimOptions& opts);

// Scores one subsystem (moments already extracted, response at position
// `response_pos`) and reports whether the response was nominated, with its
// max gap. Shared with tests that inject exact moments.
struct SubsystemOutcome {
    bool nominated = false;
    Score score = Score::finite(0.0);
};

SubsystemOutcome subsystem_candidate_score(const MomentModel& model,
                                           const Vector& zscores_sq_sub,
                                           int response_pos, int v,
                                           const std::vector<double>* thresholds,
                                           const Rng& rng);

std::string highdim_meta_json(const HighdimReport& report);
void write_highdim_meta_json(const HighdimReport& report, const std::string& path);

}  // namespace rcd
