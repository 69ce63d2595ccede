#include "rcd/rcd.h"

#include <cstring>
#include <limits>
#include <string>

#include "commands.hpp"
#include "csv.hpp"
#include "dataset.hpp"
#include "highdim.hpp"
#include "scoring.hpp"
#include "sem.hpp"
#include "types.hpp"

namespace {

thread_local std::string g_last_error;

rcd_status status_of(rcd::ErrorCode code) {
    switch (code) {
        case rcd::ErrorCode::InvalidArgument: return RCD_ERROR_INVALID_ARGUMENT;
        case rcd::ErrorCode::Io: return RCD_ERROR_IO;
        case rcd::ErrorCode::Parse: return RCD_ERROR_PARSE;
        case rcd::ErrorCode::Numeric: return RCD_ERROR_NUMERIC;
    }
    return RCD_ERROR_INTERNAL;
}

template <typename Fn>
rcd_status guarded(Fn&& fn) {
    try {
        fn();
        return RCD_OK;
    } catch (const rcd::Error& e) {
        g_last_error = e.what();
        return status_of(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return RCD_ERROR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return RCD_ERROR_INTERNAL;
    }
}

rcd_status require(bool ok, const char* message) {
    if (ok) return RCD_OK;
    g_last_error = message;
    return RCD_ERROR_INVALID_ARGUMENT;
}

rcd::CovMode cov_mode_of(rcd_cov_mode mode) {
    switch (mode) {
        case RCD_COV_SAMPLE: return rcd::CovMode::Sample;
        case RCD_COV_SHRUNK: return rcd::CovMode::Shrunk;
        default: return rcd::CovMode::Auto;
    }
}

rcd::ScoreOptions score_options_of(const rcd_score_options* options) {
    rcd::ScoreOptions opts;
    if (options == nullptr) return opts;
    opts.v = options->v;
    if (options->thresholds != nullptr)
        opts.thresholds.emplace(options->thresholds,
                                options->thresholds + options->n_thresholds);
    opts.cov_mode = cov_mode_of(options->cov_mode);
    opts.shrink_alpha = options->shrink_alpha;
    opts.seed = options->seed;
    return opts;
}

rcd::HighdimOptions highdim_options_of(const rcd_highdim_options* options) {
    rcd::HighdimOptions opts;
    if (options == nullptr) return opts;
    opts.response_threshold = options->response_threshold;
    opts.v = options->v;
    if (options->thresholds != nullptr)
        opts.thresholds.emplace(options->thresholds,
                                options->thresholds + options->n_thresholds);
    opts.cv_folds = options->cv_folds;
    opts.cv_grid = options->cv_grid;
    opts.cv_lambda_min_ratio = options->cv_lambda_min_ratio;
    opts.cov_mode = cov_mode_of(options->cov_mode);
    opts.shrink_alpha = options->shrink_alpha;
    opts.seed = options->seed;
    return opts;
}

}  // namespace

struct rcd_dataset {
    rcd::Dataset data;
};

struct rcd_model {
    rcd::Sem sem;
};

struct rcd_report {
    rcd::ScoreReport scores;
    bool has_meta = false;
    rcd::HighdimReport meta;
};

extern "C" {

const char* rcd_version(void) { return "1.0.0"; }

const char* rcd_last_error(void) { return g_last_error.c_str(); }

rcd_status rcd_dataset_load_csv(const char* observations_path, const char* case_path,
                                rcd_dataset** out) {
    if (auto st = require(observations_path && case_path && out, "null argument"))
        return st;
    return guarded([&] {
        auto handle = new rcd_dataset{rcd::load_dataset(observations_path, case_path)};
        *out = handle;
    });
}

rcd_status rcd_dataset_create(int64_t n, int64_t p, const double* observations,
                              const double* case_values, const char* const* names,
                              rcd_dataset** out) {
    if (auto st = require(observations && case_values && out, "null argument"))
        return st;
    if (auto st = require(n >= 2 && p >= 1, "need n >= 2 and p >= 1")) return st;
    return guarded([&] {
        rcd::Dataset ds;
        ds.observations.resize(n, p);
        for (int64_t i = 0; i < n; ++i)
            for (int64_t j = 0; j < p; ++j) ds.observations(i, j) = observations[i * p + j];
        ds.case_values = Eigen::Map<const rcd::Vector>(case_values, p);
        if (names != nullptr) {
            ds.names.reserve(static_cast<std::size_t>(p));
            for (int64_t j = 0; j < p; ++j) ds.names.emplace_back(names[j]);
        } else {
            ds.names = rcd::default_names(static_cast<int>(p));
        }
        rcd::validate_dataset(ds, /*require_variation=*/false);
        *out = new rcd_dataset{std::move(ds)};
    });
}

void rcd_dataset_free(rcd_dataset* dataset) { delete dataset; }

int64_t rcd_dataset_samples(const rcd_dataset* dataset) {
    return dataset == nullptr ? 0 : dataset->data.n();
}

int64_t rcd_dataset_variables(const rcd_dataset* dataset) {
    return dataset == nullptr ? 0 : dataset->data.p();
}

void rcd_score_options_init(rcd_score_options* options) {
    if (options == nullptr) return;
    options->v = 10;
    options->thresholds = nullptr;
    options->n_thresholds = 0;
    options->cov_mode = RCD_COV_AUTO;
    options->shrink_alpha = rcd::kDefaultShrinkAlpha;
    options->seed = 0;
}

void rcd_highdim_options_init(rcd_highdim_options* options) {
    if (options == nullptr) return;
    options->response_threshold = 1.5;
    options->v = 20;
    options->thresholds = nullptr;
    options->n_thresholds = 0;
    options->cv_folds = 5;
    options->cv_grid = 100;
    options->cv_lambda_min_ratio = 1e-3;
    options->cov_mode = RCD_COV_AUTO;
    options->shrink_alpha = rcd::kDefaultShrinkAlpha;
    options->seed = 0;
}

rcd_status rcd_score(const rcd_dataset* dataset, const rcd_score_options* options,
                     rcd_report** out) {
    if (auto st = require(dataset && out, "null argument")) return st;
    return guarded([&] {
        auto report = new rcd_report{};
        report->scores = rcd::rc_scores(dataset->data, score_options_of(options));
        *out = report;
    });
}

rcd_status rcd_score_all_permutations(const rcd_dataset* dataset, rcd_cov_mode cov_mode,
                                      double shrink_alpha, rcd_report** out) {
    if (auto st = require(dataset && out, "null argument")) return st;
    return guarded([&] {
        auto report = new rcd_report{};
        report->scores =
            rcd::rc_scores_all_perms(dataset->data, cov_mode_of(cov_mode), shrink_alpha);
        *out = report;
    });
}

rcd_status rcd_score_highdim(const rcd_dataset* dataset,
                             const rcd_highdim_options* options, rcd_report** out) {
    if (auto st = require(dataset && out, "null argument")) return st;
    return guarded([&] {
        auto report = new rcd_report{};
        report->meta = rcd::rc_scores_highdim(dataset->data, highdim_options_of(options));
        report->scores = report->meta.scores;
        report->has_meta = true;
        *out = report;
    });
}

int64_t rcd_report_variables(const rcd_report* report) {
    return report == nullptr ? 0 : static_cast<int64_t>(report->scores.names.size());
}

rcd_status rcd_report_values(const rcd_report* report, double* zscores_sq,
                             double* rc_scores, int32_t* in_candidate_set) {
    if (auto st = require(report != nullptr, "null report")) return st;
    const auto& scores = report->scores;
    const std::size_t p = scores.names.size();
    for (std::size_t i = 0; i < p; ++i) {
        if (zscores_sq != nullptr) zscores_sq[i] = scores.zscores_sq(static_cast<int>(i));
        if (rc_scores != nullptr)
            rc_scores[i] = scores.rc_scores[i].infinite
                               ? std::numeric_limits<double>::infinity()
                               : scores.rc_scores[i].value;
        if (in_candidate_set != nullptr)
            in_candidate_set[i] = scores.in_candidate_set[i] ? 1 : 0;
    }
    return RCD_OK;
}

const char* rcd_report_variable_name(const rcd_report* report, int64_t index) {
    if (report == nullptr || index < 1 ||
        index > static_cast<int64_t>(report->scores.names.size()))
        return nullptr;
    return report->scores.names[static_cast<std::size_t>(index - 1)].c_str();
}

rcd_status rcd_report_write_csv(const rcd_report* report, const char* path) {
    if (auto st = require(report && path, "null argument")) return st;
    return guarded([&] { rcd::write_report_csv(report->scores, path); });
}

rcd_status rcd_report_write_meta_json(const rcd_report* report, const char* path) {
    if (auto st = require(report && path, "null argument")) return st;
    if (auto st = require(report->has_meta, "report carries no response diagnostics"))
        return st;
    return guarded([&] { rcd::write_highdim_meta_json(report->meta, path); });
}

void rcd_report_free(rcd_report* report) { delete report; }

rcd_status rcd_model_load_json(const char* path, rcd_model** out) {
    if (auto st = require(path && out, "null argument")) return st;
    return guarded([&] { *out = new rcd_model{rcd::load_sem(path)}; });
}

rcd_status rcd_model_save_json(const rcd_model* model, const char* path) {
    if (auto st = require(model && path, "null argument")) return st;
    return guarded([&] { rcd::save_sem(model->sem, path); });
}

void rcd_model_free(rcd_model* model) { delete model; }

int64_t rcd_model_variables(const rcd_model* model) {
    return model == nullptr ? 0 : model->sem.p();
}

rcd_status rcd_model_is_sufficient(const rcd_model* model, const int64_t* permutation,
                                   int64_t length, int64_t root, int32_t* out) {
    if (auto st = require(model && permutation && out, "null argument")) return st;
    return guarded([&] {
        const int p = model->sem.p();
        if (static_cast<int>(length) != p)
            rcd::fail(rcd::ErrorCode::InvalidArgument,
                      "permutation must list all " + std::to_string(p) + " variables");
        if (root < 1 || root > p)
            rcd::fail(rcd::ErrorCode::InvalidArgument, "root out of range");
        std::vector<int> fwd(static_cast<std::size_t>(p));
        for (int i = 0; i < p; ++i) fwd[static_cast<std::size_t>(i)] =
            static_cast<int>(permutation[i]) - 1;
        const rcd::Permutation perm{std::move(fwd)};
        *out = rcd::is_sufficient(model->sem.dag, perm, static_cast<int>(root) - 1) ? 1 : 0;
    });
}

void rcd_simulate_args_init(rcd_simulate_args* args) {
    if (args == nullptr) return;
    std::memset(args, 0, sizeof(*args));
    args->dag = "random";
    args->p = 20;
    args->s = 0.4;
    args->n = 200;
    args->delta = 8.0;
    args->cases = 10;
    args->seed = 0;
    args->family = "gaussian";
    const rcd::HubLayout defaults;
    args->hub_count = defaults.n_hubs;
    args->hub_upper = defaults.upper;
    args->hub_lower = defaults.lower;
    args->hub_cross_in = defaults.cross_in;
    args->hub_cross_out = defaults.cross_out;
}

rcd_status rcd_cmd_simulate(const rcd_simulate_args* args, const char* out_dir) {
    if (auto st = require(args && out_dir && args->dag, "null argument")) return st;
    return guarded([&] {
        rcd::SimulateArgs sim;
        const std::string kind(args->dag);
        if (kind == "hub")
            sim.dag_kind = rcd::DagKind::Hub;
        else if (kind == "random")
            sim.dag_kind = rcd::DagKind::Random;
        else
            rcd::fail(rcd::ErrorCode::InvalidArgument,
                      "dag must be 'random' or 'hub', got '" + kind + "'");
        sim.p = args->p;
        sim.s = args->s;
        sim.n = args->n;
        sim.delta = args->delta;
        sim.cases = args->cases;
        sim.seed = args->seed;
        if (args->family != nullptr) {
            const std::string family(args->family);
            if (family == "uniform")
                sim.error_family = rcd::ErrorFamily::Uniform;
            else if (family == "gaussian")
                sim.error_family = rcd::ErrorFamily::Gaussian;
            else
                rcd::fail(rcd::ErrorCode::InvalidArgument,
                          "family must be 'gaussian' or 'uniform', got '" + family + "'");
        }
        if (args->hub_count > 0) sim.hub.n_hubs = args->hub_count;
        if (args->hub_upper > 0) sim.hub.upper = args->hub_upper;
        if (args->hub_lower > 0) sim.hub.lower = args->hub_lower;
        if (args->hub_cross_in >= 0) sim.hub.cross_in = args->hub_cross_in;
        if (args->hub_cross_out >= 0) sim.hub.cross_out = args->hub_cross_out;
        if (sim.dag_kind == rcd::DagKind::Hub && sim.p != 0 &&
            sim.p != sim.hub.total_variables())
            rcd::fail(rcd::ErrorCode::InvalidArgument,
                      "hub layout yields p = " + std::to_string(sim.hub.total_variables()) +
                          ", which disagrees with --p " + std::to_string(sim.p));
        rcd::cmd_simulate(sim, out_dir);
    });
}

rcd_status rcd_cmd_score(const char* observations_path, const char* case_path,
                         const rcd_score_options* options, const char* out_path) {
    if (auto st = require(observations_path && case_path && out_path, "null argument"))
        return st;
    return guarded([&] {
        rcd::cmd_score(observations_path, case_path, score_options_of(options), out_path);
    });
}

rcd_status rcd_cmd_score_highdim(const char* observations_path, const char* case_path,
                                 const rcd_highdim_options* options,
                                 const char* out_path) {
    if (auto st = require(observations_path && case_path && out_path, "null argument"))
        return st;
    return guarded([&] {
        rcd::cmd_score_highdim(observations_path, case_path, highdim_options_of(options),
                               out_path);
    });
}

rcd_status rcd_cmd_eval(const char* config_json_path, const char* out_dir) {
    if (auto st = require(config_json_path && out_dir, "null argument")) return st;
    return guarded([&] { rcd::cmd_eval(config_json_path, out_dir); });
}

void rcd_preprocess_args_init(rcd_preprocess_args* args) {
    if (args == nullptr) return;
    args->min_count = 10.0;
    args->max_zero_frac = 0.9;
    args->corr_cutoff = 0.999;
    args->pseudocount = 1.0;
    args->scale_after_log = 0;
}

rcd_status rcd_cmd_preprocess(const char* counts_path, const rcd_preprocess_args* args,
                              const char* out_path) {
    if (auto st = require(counts_path && out_path, "null argument")) return st;
    return guarded([&] {
        rcd::PreprocessOptions opts;
        if (args != nullptr) {
            opts.min_count = args->min_count;
            opts.max_zero_frac = args->max_zero_frac;
            opts.corr_cutoff = args->corr_cutoff;
            opts.pseudocount = args->pseudocount;
            opts.scale_after_log = args->scale_after_log != 0;
        }
        rcd::cmd_preprocess(counts_path, opts, out_path);
    });
}

}  // extern "C"
