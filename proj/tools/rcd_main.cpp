// Command line front end; all functionality is reached through the C API of
// librcd. Exit codes: 0 success, 1 input error, 2 numerical failure.

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rcd/rcd.h"

namespace {

int exit_code_of(rcd_status status) {
    switch (status) {
        case RCD_OK: return 0;
        case RCD_ERROR_INVALID_ARGUMENT:
        case RCD_ERROR_IO:
        case RCD_ERROR_PARSE: return 1;
        default: return 2;
    }
}

int report_failure(rcd_status status) {
    std::cerr << "error: " << rcd_last_error() << "\n";
    return exit_code_of(status);
}

bool parse_double_list(const std::string& text, std::vector<double>& out) {
    out.clear();
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) return false;
        } catch (...) {
            return false;
        }
    }
    return !out.empty();
}

bool parse_int_list(const std::string& text, std::vector<int64_t>& out) {
    out.clear();
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stoll(item, &used));
            if (used != item.size()) return false;
        } catch (...) {
            return false;
        }
    }
    return !out.empty();
}

// "auto" keeps the data-driven thresholds; "ladder" selects the fixed sweep
// 0.1, 0.3, ..., 4.9; anything else must be a comma-separated list.
bool resolve_thresholds(const std::string& text, std::vector<double>& storage,
                        bool& use_list) {
    use_list = false;
    if (text == "auto") return true;
    if (text == "ladder") {
        storage.clear();
        for (int i = 0; 0.1 + 0.2 * i <= 5.0 + 1e-12; ++i)
            storage.push_back(0.1 + 0.2 * i);
        use_list = true;
        return true;
    }
    if (!parse_double_list(text, storage)) return false;
    use_list = true;
    return true;
}

bool resolve_cov(const std::string& text, rcd_cov_mode& mode, double& alpha) {
    if (text == "auto") {
        mode = RCD_COV_AUTO;
        return true;
    }
    if (text == "sample") {
        mode = RCD_COV_SAMPLE;
        return true;
    }
    if (text == "shrunk") {
        mode = RCD_COV_SHRUNK;
        return true;
    }
    const std::string prefix = "shrunk:";
    if (text.rfind(prefix, 0) == 0) {
        try {
            std::size_t used = 0;
            alpha = std::stod(text.substr(prefix.size()), &used);
            if (used != text.size() - prefix.size()) return false;
        } catch (...) {
            return false;
        }
        mode = RCD_COV_SHRUNK;
        return true;
    }
    return false;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Root cause discovery for a single anomalous sample"};
    app.require_subcommand(1);

    // simulate ---------------------------------------------------------------
    auto* simulate = app.add_subcommand("simulate", "Generate a model and samples");
    std::string sim_dag = "random";
    rcd_simulate_args sim;
    rcd_simulate_args_init(&sim);
    std::string sim_family = "gaussian";
    std::string sim_out;
    simulate->add_option("--dag", sim_dag, "random or hub")->required();
    simulate->add_option("--p", sim.p, "variable count")->required();
    simulate->add_option("--s", sim.s, "edge sparsity in [0,1]")->required();
    simulate->add_option("--n", sim.n, "observational samples")->required();
    simulate->add_option("--delta", sim.delta, "intervention shift")->required();
    simulate->add_option("--cases", sim.cases, "intervened samples")->required();
    simulate->add_option("--seed", sim.seed, "random seed")->required();
    simulate->add_option("--out", sim_out, "output directory")->required();
    simulate->add_option("--family", sim_family, "gaussian or uniform");
    simulate->add_option("--hubs", sim.hub_count, "hub count (hub graphs)");
    simulate->add_option("--upper", sim.hub_upper, "upper block size (hub graphs)");
    simulate->add_option("--lower", sim.hub_lower, "lower block size (hub graphs)");
    simulate->add_option("--cross-in", sim.hub_cross_in, "foreign feeders per hub");
    simulate->add_option("--cross-out", sim.hub_cross_out, "foreign targets per hub");

    // score --------------------------------------------------------------------
    auto* score = app.add_subcommand("score", "Rank root cause candidates");
    std::string score_obs, score_case, score_out;
    std::string score_thresholds = "auto";
    std::string score_cov = "auto";
    rcd_score_options sopts;
    rcd_score_options_init(&sopts);
    score->add_option("--obs", score_obs, "observations CSV")->required();
    score->add_option("--case", score_case, "case CSV (one row)")->required();
    score->add_option("--v", sopts.v, "orderings per candidate");
    score->add_option("--thresholds", score_thresholds, "LIST, auto, or ladder");
    score->add_option("--cov", score_cov, "auto, sample, or shrunk[:ALPHA]");
    score->add_option("--seed", sopts.seed, "random seed");
    score->add_option("--out", score_out, "report CSV")->required();

    // score-highdim -------------------------------------------------------------
    auto* hd = app.add_subcommand("score-highdim",
                                  "Rank candidates with node-wise dimension reduction");
    std::string hd_obs, hd_case, hd_out;
    std::string hd_thresholds = "auto";
    std::string hd_cov = "auto";
    rcd_highdim_options hopts;
    rcd_highdim_options_init(&hopts);
    hd->add_option("--obs", hd_obs, "observations CSV")->required();
    hd->add_option("--case", hd_case, "case CSV (one row)")->required();
    hd->add_option("--resp-threshold", hopts.response_threshold,
                   "squared z-score cutoff for responses");
    hd->add_option("--v", hopts.v, "orderings per candidate");
    hd->add_option("--cv-folds", hopts.cv_folds, "cross-validation folds");
    hd->add_option("--thresholds", hd_thresholds, "LIST, auto, or ladder");
    hd->add_option("--cov", hd_cov, "auto, sample, or shrunk[:ALPHA]");
    hd->add_option("--seed", hopts.seed, "random seed");
    hd->add_option("--out", hd_out, "report CSV")->required();

    // eval -----------------------------------------------------------------------
    auto* eval = app.add_subcommand("eval", "Run a batch ranking experiment");
    std::string eval_config, eval_out;
    eval->add_option("--config", eval_config, "experiment config JSON")->required();
    eval->add_option("--out", eval_out, "output directory")->required();

    // preprocess -------------------------------------------------------------------
    auto* prep = app.add_subcommand("preprocess", "Prepare count data for scoring");
    std::string prep_counts, prep_out;
    rcd_preprocess_args popts;
    rcd_preprocess_args_init(&popts);
    bool scale_after_log = false;
    prep->add_option("--counts", prep_counts, "raw counts CSV")->required();
    prep->add_option("--min-count", popts.min_count, "low-count threshold");
    prep->add_option("--max-zero-frac", popts.max_zero_frac,
                     "max fraction of samples below min-count");
    prep->add_option("--corr-cutoff", popts.corr_cutoff, "absolute correlation cutoff");
    prep->add_option("--pseudocount", popts.pseudocount, "added before the log");
    prep->add_flag("--scale-after-log", scale_after_log,
                   "divide the logged value by the size factor instead of the count");
    prep->add_option("--out", prep_out, "output CSV")->required();

    // check-sufficiency ---------------------------------------------------------
    auto* check = app.add_subcommand("check-sufficiency",
                                     "Test whether an ordering pins the root cause");
    std::string check_model, check_perm;
    std::int64_t check_root = 0;
    check->add_option("--model", check_model, "model JSON")->required();
    check->add_option("--perm", check_perm, "comma-separated variable order, 1-based")
        ->required();
    check->add_option("--root", check_root, "root cause, 1-based")->required();

    CLI11_PARSE(app, argc, argv);

    if (simulate->parsed()) {
        sim.dag = sim_dag.c_str();
        sim.family = sim_family.c_str();
        const rcd_status status = rcd_cmd_simulate(&sim, sim_out.c_str());
        if (status != RCD_OK) return report_failure(status);
        return 0;
    }

    if (score->parsed()) {
        std::vector<double> thresholds;
        bool use_list = false;
        if (!resolve_thresholds(score_thresholds, thresholds, use_list)) {
            std::cerr << "error: cannot parse --thresholds '" << score_thresholds << "'\n";
            return 1;
        }
        if (use_list) {
            sopts.thresholds = thresholds.data();
            sopts.n_thresholds = static_cast<int64_t>(thresholds.size());
        }
        if (!resolve_cov(score_cov, sopts.cov_mode, sopts.shrink_alpha)) {
            std::cerr << "error: cannot parse --cov '" << score_cov << "'\n";
            return 1;
        }
        const rcd_status status =
            rcd_cmd_score(score_obs.c_str(), score_case.c_str(), &sopts, score_out.c_str());
        if (status != RCD_OK) return report_failure(status);
        return 0;
    }

    if (hd->parsed()) {
        std::vector<double> thresholds;
        bool use_list = false;
        if (!resolve_thresholds(hd_thresholds, thresholds, use_list)) {
            std::cerr << "error: cannot parse --thresholds '" << hd_thresholds << "'\n";
            return 1;
        }
        if (use_list) {
            hopts.thresholds = thresholds.data();
            hopts.n_thresholds = static_cast<int64_t>(thresholds.size());
        }
        if (!resolve_cov(hd_cov, hopts.cov_mode, hopts.shrink_alpha)) {
            std::cerr << "error: cannot parse --cov '" << hd_cov << "'\n";
            return 1;
        }
        const rcd_status status =
            rcd_cmd_score_highdim(hd_obs.c_str(), hd_case.c_str(), &hopts, hd_out.c_str());
        if (status != RCD_OK) return report_failure(status);
        return 0;
    }

    if (eval->parsed()) {
        const rcd_status status = rcd_cmd_eval(eval_config.c_str(), eval_out.c_str());
        if (status != RCD_OK) return report_failure(status);
        return 0;
    }

    if (prep->parsed()) {
        popts.scale_after_log = scale_after_log ? 1 : 0;
        const rcd_status status =
            rcd_cmd_preprocess(prep_counts.c_str(), &popts, prep_out.c_str());
        if (status != RCD_OK) return report_failure(status);
        return 0;
    }

    if (check->parsed()) {
        std::vector<int64_t> perm;
        if (!parse_int_list(check_perm, perm)) {
            std::cerr << "error: cannot parse --perm '" << check_perm << "'\n";
            return 1;
        }
        rcd_model* model = nullptr;
        rcd_status status = rcd_model_load_json(check_model.c_str(), &model);
        if (status != RCD_OK) return report_failure(status);
        int32_t sufficient = 0;
        status = rcd_model_is_sufficient(model, perm.data(),
                                         static_cast<int64_t>(perm.size()), check_root,
                                         &sufficient);
        rcd_model_free(model);
        if (status != RCD_OK) return report_failure(status);
        std::cout << (sufficient ? "true" : "false") << "\n";
        return 0;
    }

    return 1;
}
