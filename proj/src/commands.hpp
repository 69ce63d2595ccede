#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "eval.hpp"
#include "highdim.hpp"
#include "preprocess.hpp"
#include "scoring.hpp"
#include "sem.hpp"

namespace rcd {

// File-level operations behind the CLI verbs. Everything here is
// deterministic given its arguments; parallelism only affects wall time.

struct SimulateArgs {
    DagKind dag_kind = DagKind::Random;
    int p = 20;
    double s = 0.4;
    int n = 200;
    double delta = 8.0;
    int cases = 10;
    std::uint64_t seed = 0;
    ErrorFamily error_family = ErrorFamily::Gaussian;
    HubLayout hub;
};

// Writes model.json, observations.csv, cases.csv and one case_###.csv per
// intervened sample, generated with the standard protocol (variance
// targeting, variable shuffle).
void cmd_simulate(const SimulateArgs& args, const std::string& out_dir);

void cmd_score(const std::string& obs_path, const std::string& case_path,
               const ScoreOptions& opts, const std::string& out_path);

// Report CSV plus "<out>.meta.json" with per-response diagnostics.
void cmd_score_highdim(const std::string& obs_path, const std::string& case_path,
                       const HighdimOptions& opts, const std::string& out_path);

void cmd_eval(const std::string& config_path, const std::string& out_dir);

void cmd_preprocess(const std::string& counts_path, const PreprocessOptions& opts,
                    const std::string& out_path);

// perm lists variables (1-based) in their tested order; root is 1-based.
bool cmd_check_sufficiency(const std::string& model_path,
                           const std::vector<int>& perm_1based, int root_1based);

}  // namespace rcd
