#include "commands.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "csv.hpp"

namespace rcd {
namespace {

std::string case_file_name(int case_id) {
    std::ostringstream name;
    name << "case_" << std::setw(3) << std::setfill('0') << case_id << ".csv";
    return name.str();
}

}  // namespace

void cmd_simulate(const SimulateArgs& args, const std::string& out_dir) {
    if (args.cases < 1)
        fail(ErrorCode::InvalidArgument, "simulate: cases must be positive");
    Rng rng(args.seed);

    Rng dag_rng = rng.child(0);
    HubLayout layout = args.hub;
    layout.s = args.s;
    WeightedDag dag = args.dag_kind == DagKind::Hub
                          ? hub_dag(layout, dag_rng)
                          : random_dag(args.p, args.s, dag_rng);
    const int p = dag.p;

    Rng sem_rng = rng.child(1);
    Sem sem = make_sem(std::move(dag), args.error_family, sem_rng);
    Rng target_rng = rng.child(2);
    Vector targets(p);
    for (int j = 0; j < p; ++j) targets(j) = target_rng.uniform(10.0, 50.0);
    sem = rescale_to_target_variances(sem, targets);
    Rng shuffle_rng = rng.child(3);
    sem = apply_variable_permutation(sem, random_permutation(p, shuffle_rng));

    Rng obs_rng = rng.child(4);
    const Matrix obs = sample_observational(sem, args.n, obs_rng);

    Rng root_rng = rng.child(5);
    std::vector<int> roots;
    if (p >= args.cases) {
        roots = root_rng.sample_without_replacement(p, args.cases);
    } else {
        roots.resize(args.cases);
        for (int c = 0; c < args.cases; ++c)
            roots[c] = static_cast<int>(root_rng.below(static_cast<std::uint64_t>(p)));
    }

    std::filesystem::create_directories(out_dir);
    const auto dir = std::filesystem::path(out_dir);
    save_sem(sem, (dir / "model.json").string());

    Dataset ds;
    ds.observations = obs;
    ds.case_values = Vector::Zero(p);
    ds.names = default_names(p);
    write_dataset_observations(ds, (dir / "observations.csv").string());

    std::ofstream manifest(dir / "cases.csv", std::ios::binary);
    if (!manifest) fail(ErrorCode::Io, "cannot write cases.csv");
    manifest << "case_id,file,root_cause,root_cause_name,delta\n";
    for (int c = 0; c < args.cases; ++c) {
        Rng case_rng = rng.child(6, static_cast<std::uint64_t>(c));
        ds.case_values =
            sample_interventional(sem, Intervention{roots[c], args.delta}, case_rng);
        const std::string file = case_file_name(c + 1);
        write_case(ds, (dir / file).string(), "case" + std::to_string(c + 1));
        manifest << (c + 1) << ',' << file << ',' << (roots[c] + 1) << ','
                 << ds.names[static_cast<std::size_t>(roots[c])] << ','
                 << format_double(args.delta) << '\n';
    }
    if (!manifest) fail(ErrorCode::Io, "write failed for cases.csv");
}

void cmd_score(const std::string& obs_path, const std::string& case_path,
               const ScoreOptions& opts, const std::string& out_path) {
    const Dataset ds = load_dataset(obs_path, case_path);
    const ScoreReport report = rc_scores(ds, opts);
    write_report_csv(report, out_path);
}

void cmd_score_highdim(const std::string& obs_path, const std::string& case_path,
                       const HighdimOptions& opts, const std::string& out_path) {
    const Dataset ds = load_dataset(obs_path, case_path);
    const HighdimReport report = rc_scores_highdim(ds, opts);
    write_report_csv(report.scores, out_path);
    write_highdim_meta_json(report, out_path + ".meta.json");
}

void cmd_eval(const std::string& config_path, const std::string& out_dir) {
    const ExperimentConfig config = load_config(config_path);
    const RankResult result = run_experiment(config);
    write_experiment_outputs(config, result, out_dir);
}

void cmd_preprocess(const std::string& counts_path, const PreprocessOptions& opts,
                    const std::string& out_path) {
    Table raw = load_table(counts_path);
    CountMatrix counts;
    counts.counts = std::move(raw.values);
    counts.gene_names = std::move(raw.col_names);
    counts.sample_names = std::move(raw.row_labels);
    const PreprocessResult result = preprocess_counts(counts, opts);

    Table out;
    out.corner = raw.corner.empty() ? std::string("sample") : raw.corner;
    out.col_names = result.gene_names;
    out.row_labels = result.sample_names;
    out.values = result.values;
    write_table(out, out_path);
}

bool cmd_check_sufficiency(const std::string& model_path,
                           const std::vector<int>& perm_1based, int root_1based) {
    const Sem sem = load_sem(model_path);
    const int p = sem.p();
    if (static_cast<int>(perm_1based.size()) != p)
        fail(ErrorCode::InvalidArgument,
             "check-sufficiency: permutation must list all " + std::to_string(p) +
                 " variables");
    std::vector<int> fwd(perm_1based.size());
    for (std::size_t i = 0; i < perm_1based.size(); ++i) fwd[i] = perm_1based[i] - 1;
    const Permutation perm{std::move(fwd)};
    if (root_1based < 1 || root_1based > p)
        fail(ErrorCode::InvalidArgument, "check-sufficiency: root out of range");
    return is_sufficient(sem.dag, perm, root_1based - 1);
}

}  // namespace rcd
