#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "highdim.hpp"
#include "scoring.hpp"
#include "sem.hpp"

namespace rcd {

enum class DagKind { Random, Hub };

// One batch experiment: generate models, draw reference samples and
// intervened cases, score each case with every configured method, and rank
// the true target.
struct ExperimentConfig {
    DagKind dag_kind = DagKind::Random;
    int p = 20;                     // ignored for hub graphs (layout decides)
    double s = 0.4;
    int n = 200;
    double delta = 8.0;
    ErrorFamily error_family = ErrorFamily::Gaussian;
    double error_var_lo = 1.0;
    double error_var_hi = 2.0;
    double target_var_lo = 10.0;
    double target_var_hi = 50.0;
    double intercept_lo = -10.0;
    double intercept_hi = 10.0;
    int n_matrices = 20;
    int cases_per_matrix = 50;
    std::vector<std::string> methods = {"zscore", "rc"};
    double latent_fraction = 0.0;   // columns dropped per case
    std::uint64_t seed = 0;
    int top_k = 20;

    // Scorer settings shared by the rc methods.
    int v = 10;
    std::optional<std::vector<double>> thresholds;
    CovMode cov_mode = CovMode::Auto;
    double shrink_alpha = kDefaultShrinkAlpha;
    double highdim_response_threshold = 1.5;
    int cv_folds = 5;

    HubLayout hub;

    int variables() const {
        return dag_kind == DagKind::Hub ? hub.total_variables() : p;
    }
};

void validate_config(const ExperimentConfig& config);

struct CaseRecord {
    int matrix_id = 0;              // 1-based
    int case_id = 0;                // 1-based, global
    int root_cause = 0;             // 1-based column in the shuffled model
    std::map<std::string, int> ranks;
    bool failed = false;
    std::string failure;
    int dropout_retries = 0;
};

struct RankResult {
    std::vector<std::string> methods;
    std::vector<CaseRecord> cases;
    std::map<std::string, std::vector<double>> cdf;  // per method, k = 1..top_k
    int failed_cases = 0;
};

// Competition rank of entry r: ties count against it, infinities sit above
// every finite score and tie with each other.
int root_cause_rank(const std::vector<Score>& scores, int r);

// cdf[k-1] = fraction of ranks <= k.
std::vector<double> rank_cdf(const std::vector<int>& ranks, int top_k);

RankResult run_experiment(const ExperimentConfig& config);

// ranks.csv, cdf.csv and a config echo next to them.
void write_experiment_outputs(const ExperimentConfig& config, const RankResult& result,
                              const std::string& out_dir);

std::string config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig load_config(const std::string& path);

}  // namespace rcd
