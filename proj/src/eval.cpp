#include "eval.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "csv.hpp"
#include "parallel.hpp"

namespace rcd {
namespace {

constexpr std::uint64_t kMatrixTag = 0x6d6174ull;
constexpr std::uint64_t kCaseTag = 0x63617365ull;

struct PreparedMatrix {
    Sem sem;
    Matrix observations;
    std::vector<int> roots;  // 0-based, one per case
};

PreparedMatrix prepare_matrix(const ExperimentConfig& config, int m, const Rng& run_rng) {
    PreparedMatrix out;
    Rng rng = run_rng.child(static_cast<std::uint64_t>(m), kMatrixTag);
    const int p = config.variables();

    Rng dag_rng = rng.child(0);
    HubLayout layout = config.hub;
    layout.s = config.s;  // within-block sparsity follows the main knob
    WeightedDag dag = config.dag_kind == DagKind::Hub
                          ? hub_dag(layout, dag_rng)
                          : random_dag(config.p, config.s, dag_rng);

    Rng sem_rng = rng.child(1);
    Sem sem = make_sem(std::move(dag), config.error_family, sem_rng,
                       config.error_var_lo, config.error_var_hi,
                       config.intercept_lo, config.intercept_hi);

    Rng target_rng = rng.child(2);
    Vector targets(p);
    for (int j = 0; j < p; ++j)
        targets(j) = target_rng.uniform(config.target_var_lo, config.target_var_hi);
    sem = rescale_to_target_variances(sem, targets);

    Rng shuffle_rng = rng.child(3);
    out.sem = apply_variable_permutation(sem, random_permutation(p, shuffle_rng));

    Rng obs_rng = rng.child(4);
    out.observations = sample_observational(out.sem, config.n, obs_rng);

    Rng root_rng = rng.child(5);
    if (p >= config.cases_per_matrix) {
        out.roots = root_rng.sample_without_replacement(p, config.cases_per_matrix);
    } else {
        out.roots.resize(config.cases_per_matrix);
        for (int c = 0; c < config.cases_per_matrix; ++c)
            out.roots[c] = static_cast<int>(root_rng.below(static_cast<std::uint64_t>(p)));
    }
    return out;
}

std::vector<Score> zscore_as_scores(const Vector& zsq) {
    std::vector<Score> scores(zsq.size());
    for (int i = 0; i < zsq.size(); ++i) scores[i] = Score::finite(zsq(i));
    return scores;
}

void score_case(const ExperimentConfig& config, const PreparedMatrix& mat, int m,
                int c, const Rng& run_rng, CaseRecord& record) {
    const int p = config.variables();
    const int root = mat.roots[c];
    Rng rng = run_rng.child(static_cast<std::uint64_t>(m), kCaseTag,
                            static_cast<std::uint64_t>(c));

    Rng case_rng = rng.child(0);
    const Vector case_values =
        sample_interventional(mat.sem, Intervention{root, config.delta}, case_rng);

    // Latent dropout: hide a uniform subset of columns, redrawing whenever
    // the intervened column itself lands in it.
    std::vector<int> kept(p);
    for (int i = 0; i < p; ++i) kept[i] = i;
    const int n_drop = static_cast<int>(std::floor(config.latent_fraction * p));
    if (n_drop > 0) {
        for (int attempt = 0;; ++attempt) {
            if (attempt >= 1000)
                fail(ErrorCode::Numeric, "latent dropout kept hitting the intervened column");
            Rng drop_rng = rng.child(1, static_cast<std::uint64_t>(attempt));
            std::vector<int> dropped = drop_rng.sample_without_replacement(p, n_drop);
            if (std::find(dropped.begin(), dropped.end(), root) != dropped.end()) {
                record.dropout_retries = attempt + 1;
                continue;
            }
            std::vector<bool> is_dropped(p, false);
            for (int d : dropped) is_dropped[d] = true;
            kept.clear();
            for (int i = 0; i < p; ++i)
                if (!is_dropped[i]) kept.push_back(i);
            break;
        }
    }

    Dataset full;
    full.observations = mat.observations;
    full.case_values = case_values;
    full.names = default_names(p);
    const Dataset ds = select_columns(full, kept);
    const int root_pos = static_cast<int>(
        std::lower_bound(kept.begin(), kept.end(), root) - kept.begin());

    for (std::size_t mi = 0; mi < config.methods.size(); ++mi) {
        const std::string& method = config.methods[mi];
        std::vector<Score> scores;
        if (method == "zscore") {
            scores = zscore_as_scores(squared_zscores(ds));
        } else if (method == "rc") {
            ScoreOptions opts;
            opts.v = config.v;
            opts.thresholds = config.thresholds;
            opts.cov_mode = config.cov_mode;
            opts.shrink_alpha = config.shrink_alpha;
            opts.seed = rng.child(2, mi).seed();
            scores = rc_scores(ds, opts).rc_scores;
        } else if (method == "rc-all") {
            scores = rc_scores_all_perms(ds, config.cov_mode, config.shrink_alpha)
                         .rc_scores;
        } else if (method == "rc-highdim") {
            HighdimOptions opts;
            opts.response_threshold = config.highdim_response_threshold;
            opts.v = config.v;
            opts.thresholds = config.thresholds;
            opts.cv_folds = config.cv_folds;
            opts.cov_mode = config.cov_mode;
            opts.shrink_alpha = config.shrink_alpha;
            opts.seed = rng.child(2, mi).seed();
            scores = rc_scores_highdim(ds, opts).scores.rc_scores;
        } else {
            fail(ErrorCode::InvalidArgument, "unknown method '" + method + "'");
        }
        record.ranks[method] = root_cause_rank(scores, root_pos);
    }
    record.root_cause = root + 1;
}

}  // namespace

void validate_config(const ExperimentConfig& config) {
    if (config.dag_kind == DagKind::Random && config.p < 2)
        fail(ErrorCode::InvalidArgument, "config: p must be at least 2");
    if (!(config.s >= 0.0 && config.s <= 1.0))
        fail(ErrorCode::InvalidArgument, "config: sparsity must lie in [0,1]");
    if (config.n < 2) fail(ErrorCode::InvalidArgument, "config: n must be at least 2");
    if (config.n_matrices < 1 || config.cases_per_matrix < 1)
        fail(ErrorCode::InvalidArgument, "config: counts must be positive");
    if (!(config.latent_fraction >= 0.0 && config.latent_fraction < 1.0))
        fail(ErrorCode::InvalidArgument, "config: latent fraction must lie in [0,1)");
    if (config.top_k < 1) fail(ErrorCode::InvalidArgument, "config: top_k must be positive");
    if (config.methods.empty())
        fail(ErrorCode::InvalidArgument, "config: at least one method required");
    for (const auto& m : config.methods)
        if (m != "zscore" && m != "rc" && m != "rc-all" && m != "rc-highdim")
            fail(ErrorCode::InvalidArgument, "config: unknown method '" + m + "'");
}

int root_cause_rank(const std::vector<Score>& scores, int r) {
    if (r < 0 || r >= static_cast<int>(scores.size()))
        fail(ErrorCode::InvalidArgument, "root_cause_rank: index out of range");
    int rank = 1;
    for (int k = 0; k < static_cast<int>(scores.size()); ++k) {
        if (k == r) continue;
        if (scores[k] > scores[r] || scores[k] == scores[r]) ++rank;
    }
    return rank;
}

std::vector<double> rank_cdf(const std::vector<int>& ranks, int top_k) {
    if (top_k < 1) fail(ErrorCode::InvalidArgument, "rank_cdf: top_k must be positive");
    std::vector<double> cdf(static_cast<std::size_t>(top_k), 0.0);
    if (ranks.empty()) return cdf;
    for (int k = 1; k <= top_k; ++k) {
        int hits = 0;
        for (int r : ranks)
            if (r <= k) ++hits;
        cdf[static_cast<std::size_t>(k - 1)] =
            static_cast<double>(hits) / static_cast<double>(ranks.size());
    }
    return cdf;
}

RankResult run_experiment(const ExperimentConfig& config) {
    validate_config(config);
    const Rng run_rng(config.seed);

    RankResult result;
    result.methods = config.methods;
    const int total = config.n_matrices * config.cases_per_matrix;
    result.cases.assign(static_cast<std::size_t>(total), CaseRecord{});

    for (int m = 0; m < config.n_matrices; ++m) {
        const PreparedMatrix mat = prepare_matrix(config, m, run_rng);
        parallel_for(static_cast<std::size_t>(config.cases_per_matrix), [&](std::size_t c) {
            const int idx = m * config.cases_per_matrix + static_cast<int>(c);
            CaseRecord& record = result.cases[static_cast<std::size_t>(idx)];
            record.matrix_id = m + 1;
            record.case_id = idx + 1;
            try {
                score_case(config, mat, m, static_cast<int>(c), run_rng, record);
            } catch (const Error& e) {
                record.failed = true;
                record.failure = e.what();
                record.root_cause = mat.roots[c] + 1;
            }
        });
    }

    for (const auto& record : result.cases)
        if (record.failed) ++result.failed_cases;
    for (const auto& method : config.methods) {
        std::vector<int> ranks;
        for (const auto& record : result.cases) {
            if (record.failed) continue;
            ranks.push_back(record.ranks.at(method));
        }
        result.cdf[method] = rank_cdf(ranks, config.top_k);
    }
    return result;
}

void write_experiment_outputs(const ExperimentConfig& config, const RankResult& result,
                              const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    const auto dir = std::filesystem::path(out_dir);

    {
        std::ofstream out(dir / "ranks.csv", std::ios::binary);
        if (!out) fail(ErrorCode::Io, "cannot write ranks.csv");
        out << "case_id,matrix_id,root_cause,method,rank\n";
        for (const auto& record : result.cases) {
            if (record.failed) continue;
            for (const auto& method : result.methods)
                out << record.case_id << ',' << record.matrix_id << ','
                    << record.root_cause << ',' << method << ','
                    << record.ranks.at(method) << '\n';
        }
    }
    {
        std::ofstream out(dir / "cdf.csv", std::ios::binary);
        if (!out) fail(ErrorCode::Io, "cannot write cdf.csv");
        out << "method,k,value\n";
        for (const auto& method : result.methods) {
            const auto& cdf = result.cdf.at(method);
            for (std::size_t k = 0; k < cdf.size(); ++k)
                out << method << ',' << (k + 1) << ',' << format_double(cdf[k]) << '\n';
        }
    }
    {
        std::ofstream out(dir / "config.json", std::ios::binary);
        if (!out) fail(ErrorCode::Io, "cannot write config.json");
        out << config_to_json(config) << '\n';
    }
    if (result.failed_cases > 0) {
        std::ofstream out(dir / "failures.csv", std::ios::binary);
        out << "case_id,matrix_id,root_cause,reason\n";
        for (const auto& record : result.cases) {
            if (!record.failed) continue;
            std::string reason = record.failure;
            std::replace(reason.begin(), reason.end(), ',', ';');
            out << record.case_id << ',' << record.matrix_id << ','
                << record.root_cause << ',' << reason << '\n';
        }
    }
}

namespace {

const char* dag_kind_name(DagKind kind) {
    return kind == DagKind::Hub ? "hub" : "random";
}

const char* family_name(ErrorFamily family) {
    return family == ErrorFamily::Gaussian ? "gaussian" : "uniform";
}

const char* cov_mode_name(CovMode mode) {
    switch (mode) {
        case CovMode::Sample: return "sample";
        case CovMode::Shrunk: return "shrunk";
        default: return "auto";
    }
}

}  // namespace

std::string config_to_json(const ExperimentConfig& config) {
    nlohmann::json j;
    j["dag"] = dag_kind_name(config.dag_kind);
    j["p"] = config.p;
    j["s"] = config.s;
    j["n"] = config.n;
    j["delta"] = config.delta;
    j["error_family"] = family_name(config.error_family);
    j["error_variance_range"] = {config.error_var_lo, config.error_var_hi};
    j["target_variance_range"] = {config.target_var_lo, config.target_var_hi};
    j["intercept_range"] = {config.intercept_lo, config.intercept_hi};
    j["n_matrices"] = config.n_matrices;
    j["cases_per_matrix"] = config.cases_per_matrix;
    j["methods"] = config.methods;
    j["latent_fraction"] = config.latent_fraction;
    j["seed"] = config.seed;
    j["top_k"] = config.top_k;
    j["v"] = config.v;
    if (config.thresholds.has_value()) j["thresholds"] = *config.thresholds;
    j["cov"] = cov_mode_name(config.cov_mode);
    j["shrink_alpha"] = config.shrink_alpha;
    j["highdim_response_threshold"] = config.highdim_response_threshold;
    j["cv_folds"] = config.cv_folds;
    if (config.dag_kind == DagKind::Hub) {
        j["hub"] = {{"hubs", config.hub.n_hubs},
                    {"upper", config.hub.upper},
                    {"lower", config.hub.lower},
                    {"cross_in", config.hub.cross_in},
                    {"cross_out", config.hub.cross_out}};
    }
    return j.dump(2);
}

ExperimentConfig config_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::Parse, std::string("config json: ") + e.what());
    }
    ExperimentConfig config;
    try {
        if (j.contains("dag")) {
            const auto kind = j["dag"].get<std::string>();
            if (kind == "hub")
                config.dag_kind = DagKind::Hub;
            else if (kind == "random")
                config.dag_kind = DagKind::Random;
            else
                fail(ErrorCode::Parse, "config json: unknown dag kind '" + kind + "'");
        }
        config.p = j.value("p", config.p);
        config.s = j.value("s", config.s);
        config.n = j.value("n", config.n);
        config.delta = j.value("delta", config.delta);
        if (j.contains("error_family")) {
            const auto fam = j["error_family"].get<std::string>();
            if (fam == "gaussian")
                config.error_family = ErrorFamily::Gaussian;
            else if (fam == "uniform")
                config.error_family = ErrorFamily::Uniform;
            else
                fail(ErrorCode::Parse, "config json: unknown error family '" + fam + "'");
        }
        if (j.contains("error_variance_range")) {
            config.error_var_lo = j["error_variance_range"].at(0).get<double>();
            config.error_var_hi = j["error_variance_range"].at(1).get<double>();
        }
        if (j.contains("target_variance_range")) {
            config.target_var_lo = j["target_variance_range"].at(0).get<double>();
            config.target_var_hi = j["target_variance_range"].at(1).get<double>();
        }
        if (j.contains("intercept_range")) {
            config.intercept_lo = j["intercept_range"].at(0).get<double>();
            config.intercept_hi = j["intercept_range"].at(1).get<double>();
        }
        config.n_matrices = j.value("n_matrices", config.n_matrices);
        config.cases_per_matrix = j.value("cases_per_matrix", config.cases_per_matrix);
        if (j.contains("methods"))
            config.methods = j["methods"].get<std::vector<std::string>>();
        config.latent_fraction = j.value("latent_fraction", config.latent_fraction);
        config.seed = j.value("seed", config.seed);
        config.top_k = j.value("top_k", config.top_k);
        config.v = j.value("v", config.v);
        if (j.contains("thresholds")) {
            if (j["thresholds"].is_string()) {
                const auto s = j["thresholds"].get<std::string>();
                if (s == "auto")
                    config.thresholds.reset();
                else if (s == "ladder")
                    config.thresholds = default_threshold_ladder();
                else
                    fail(ErrorCode::Parse, "config json: thresholds must be a list, "
                                           "\"auto\", or \"ladder\"");
            } else {
                config.thresholds = j["thresholds"].get<std::vector<double>>();
            }
        }
        if (j.contains("cov")) {
            const auto mode = j["cov"].get<std::string>();
            if (mode == "sample")
                config.cov_mode = CovMode::Sample;
            else if (mode == "shrunk")
                config.cov_mode = CovMode::Shrunk;
            else if (mode == "auto")
                config.cov_mode = CovMode::Auto;
            else
                fail(ErrorCode::Parse, "config json: unknown cov mode '" + mode + "'");
        }
        config.shrink_alpha = j.value("shrink_alpha", config.shrink_alpha);
        config.highdim_response_threshold =
            j.value("highdim_response_threshold", config.highdim_response_threshold);
        config.cv_folds = j.value("cv_folds", config.cv_folds);
        if (j.contains("hub")) {
            const auto& h = j["hub"];
            config.hub.n_hubs = h.value("hubs", config.hub.n_hubs);
            config.hub.upper = h.value("upper", config.hub.upper);
            config.hub.lower = h.value("lower", config.hub.lower);
            config.hub.cross_in = h.value("cross_in", config.hub.cross_in);
            config.hub.cross_out = h.value("cross_out", config.hub.cross_out);
        }
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::Parse, std::string("config json: ") + e.what());
    }
    validate_config(config);
    return config;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::Io, "cannot read " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return config_from_json(buf.str());
}

}  // namespace rcd
