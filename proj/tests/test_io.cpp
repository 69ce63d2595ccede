#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "commands.hpp"
#include "csv.hpp"
#include "preprocess.hpp"
#include "rng.hpp"

using namespace rcd;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("/tmp/rcd_io_" + name) {}
    ~TempFile() { std::remove(path.c_str()); }
};

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

CountMatrix make_counts(std::initializer_list<std::initializer_list<double>> rows,
                        std::vector<std::string> genes) {
    CountMatrix counts;
    counts.counts.resize(static_cast<Eigen::Index>(rows.size()),
                         static_cast<Eigen::Index>(genes.size()));
    int i = 0;
    for (const auto& row : rows) {
        int j = 0;
        for (double v : row) counts.counts(i, j++) = v;
        ++i;
    }
    counts.gene_names = std::move(genes);
    for (int s = 0; s < counts.samples(); ++s)
        counts.sample_names.push_back("s" + std::to_string(s + 1));
    return counts;
}

}  // namespace

TEST_CASE("csv round trip is bitwise for awkward doubles") {
    TempFile file("roundtrip.csv");
    Table table;
    table.corner = "sample";
    table.col_names = {"a", "b", "c"};
    table.row_labels = {"r1", "r2"};
    table.values.resize(2, 3);
    table.values << 0.1, -0.0, 1e-300, 1.7976931348623157e308, 3.141592653589793,
        -123456.789e-12;
    write_table(table, file.path);
    const Table back = load_table(file.path);
    CHECK(back.col_names == table.col_names);
    CHECK(back.row_labels == table.row_labels);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 3; ++j) {
            const double a = table.values(i, j);
            const double b = back.values(i, j);
            CHECK(std::memcmp(&a, &b, sizeof(double)) == 0);
        }
}

TEST_CASE("csv round trip holds for random doubles") {
    TempFile file("roundtrip_rand.csv");
    Rng rng(71);
    Table table;
    table.corner = "sample";
    for (int j = 0; j < 8; ++j) table.col_names.push_back("v" + std::to_string(j));
    table.values.resize(50, 8);
    for (int i = 0; i < 50; ++i) {
        table.row_labels.push_back("r" + std::to_string(i));
        for (int j = 0; j < 8; ++j)
            table.values(i, j) = rng.normal() * std::pow(10.0, rng.uniform(-20, 20));
    }
    write_table(table, file.path);
    const Table back = load_table(file.path);
    for (int i = 0; i < 50; ++i)
        for (int j = 0; j < 8; ++j) CHECK(back.values(i, j) == table.values(i, j));
}

TEST_CASE("csv loader names the offending cell") {
    TempFile file("bad.csv");
    write_text(file.path, "sample,a,b\nr1,1.0,NaN\n");
    try {
        load_table(file.path);
        FAIL("expected parse error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Parse);
        const std::string what = e.what();
        CHECK(what.find("row 2") != std::string::npos);
        CHECK(what.find("column 3") != std::string::npos);
    }
}

TEST_CASE("csv loader rejects ragged rows and duplicate headers") {
    TempFile ragged("ragged.csv");
    write_text(ragged.path, "sample,a,b\nr1,1.0\n");
    CHECK_THROWS_AS(load_table(ragged.path), Error);

    TempFile dup("dup.csv");
    write_text(dup.path, "sample,a,a\nr1,1.0,2.0\n");
    CHECK_THROWS_AS(load_table(dup.path), Error);

    TempFile gibberish("gibberish.csv");
    write_text(gibberish.path, "sample,a\nr1,hello\n");
    CHECK_THROWS_AS(load_table(gibberish.path), Error);

    CHECK_THROWS_AS(load_table("/tmp/rcd_io_missing_file.csv"), Error);
}

TEST_CASE("csv loader accepts very wide headers") {
    TempFile file("wide.csv");
    std::string text = "sample";
    for (int j = 0; j < 20000; ++j) text += ",g" + std::to_string(j);
    text += "\nr1";
    for (int j = 0; j < 20000; ++j) text += ",1";
    text += "\n";
    write_text(file.path, text);
    const Table table = load_table(file.path);
    CHECK(table.values.cols() == 20000);
    CHECK(table.values.rows() == 1);
}

TEST_CASE("dataset loading cross-checks case and observation columns") {
    TempFile obs("obs.csv");
    TempFile case_file("case.csv");
    write_text(obs.path, "sample,a,b\nr1,1.0,2.0\nr2,2.0,1.0\nr3,0.0,0.5\n");
    write_text(case_file.path, "sample,a,b\npatient,5.0,5.0\n");
    const Dataset ds = load_dataset(obs.path, case_file.path);
    CHECK(ds.n() == 3);
    CHECK(ds.p() == 2);
    CHECK(ds.case_values(0) == 5.0);

    TempFile wrong("wrong_case.csv");
    write_text(wrong.path, "sample,a,c\npatient,5.0,5.0\n");
    CHECK_THROWS_AS(load_dataset(obs.path, wrong.path), Error);

    TempFile tall("tall_case.csv");
    write_text(tall.path, "sample,a,b\np1,5.0,5.0\np2,1.0,1.0\n");
    CHECK_THROWS_AS(load_dataset(obs.path, tall.path), Error);

    TempFile flat("flat_obs.csv");
    write_text(flat.path, "sample,a,b\nr1,1.0,2.0\nr2,1.0,1.0\nr3,1.0,0.5\n");
    try {
        load_dataset(flat.path, case_file.path);
        FAIL("expected degenerate-column error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("'a'") != std::string::npos);
    }
}

TEST_CASE("preprocess: identical samples give unit size factors") {
    const CountMatrix counts =
        make_counts({{100, 20, 3000}, {100, 20, 3000}}, {"g1", "g2", "g3"});
    const PreprocessResult result = preprocess_counts(counts, {});
    CHECK(result.size_factors(0) == doctest::Approx(1.0));
    CHECK(result.size_factors(1) == doctest::Approx(1.0));
    // Transform reduces to log(count + 1).
    CHECK(result.values(0, 0) == doctest::Approx(std::log(101.0)));
    CHECK(result.values(1, 2) == doctest::Approx(std::log(3001.0)));
}

TEST_CASE("preprocess: all-zero genes are dropped by the count filter") {
    const CountMatrix counts =
        make_counts({{100, 0, 50}, {90, 0, 60}, {110, 0, 40}}, {"g1", "dead", "g3"});
    PreprocessOptions opts;
    opts.corr_cutoff = 1.1;  // isolate the count filter
    const PreprocessResult result = preprocess_counts(counts, opts);
    CHECK(result.gene_names == std::vector<std::string>{"g1", "g3"});
    CHECK(result.dropped_low_count == 1);
}

TEST_CASE("preprocess: duplicated gene keeps only the earlier copy") {
    const CountMatrix counts = make_counts(
        {{100, 100, 17}, {50, 50, 80}, {75, 75, 40}, {120, 120, 90}},
        {"orig", "copy", "other"});
    const PreprocessResult result = preprocess_counts(counts, {});
    CHECK(result.gene_names == std::vector<std::string>{"orig", "other"});
    CHECK(result.dropped_correlated == 1);
}

TEST_CASE("preprocess: undefined size factors raise a parameter hint") {
    // Every retained gene carries a zero somewhere.
    const CountMatrix counts = make_counts({{0, 100}, {100, 0}}, {"g1", "g2"});
    try {
        preprocess_counts(counts, {});
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("count filter") != std::string::npos);
    }
}

TEST_CASE("preprocess: sequencing depth is divided out") {
    // Second sample is the first at double depth.
    const CountMatrix counts =
        make_counts({{100, 200, 400}, {200, 400, 800}}, {"g1", "g2", "g3"});
    PreprocessOptions opts;
    opts.corr_cutoff = 1.1;  // keep all genes; depth is what's under test
    const PreprocessResult result = preprocess_counts(counts, opts);
    const double ratio = result.size_factors(1) / result.size_factors(0);
    CHECK(ratio == doctest::Approx(2.0));
    // After scaling, the two samples nearly agree.
    for (int j = 0; j < result.values.cols(); ++j)
        CHECK(result.values(0, j) ==
              doctest::Approx(result.values(1, j)).epsilon(0.01));
}

TEST_CASE("preprocess: alternative transform divides after the log") {
    const CountMatrix counts =
        make_counts({{100, 200}, {400, 800}}, {"g1", "g2"});
    PreprocessOptions opts;
    opts.corr_cutoff = 1.1;
    opts.scale_after_log = true;
    const PreprocessResult result = preprocess_counts(counts, opts);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            CHECK(result.values(i, j) ==
                  doctest::Approx(std::log(counts.counts(i, j) + 1.0) /
                                  result.size_factors(i)));
}

TEST_CASE("preprocess: pseudocount is configurable") {
    const CountMatrix counts = make_counts({{10, 20}, {10, 20}}, {"g1", "g2"});
    PreprocessOptions opts;
    opts.pseudocount = 0.5;
    opts.corr_cutoff = 1.1;
    const PreprocessResult result = preprocess_counts(counts, opts);
    CHECK(result.values(0, 0) == doctest::Approx(std::log(10.5)));
}

TEST_CASE("preprocess: rejects fractional and negative counts") {
    CHECK_THROWS_AS(preprocess_counts(make_counts({{1.5, 2}, {1, 2}}, {"a", "b"}), {}),
                    Error);
    CHECK_THROWS_AS(preprocess_counts(make_counts({{-1, 2}, {1, 2}}, {"a", "b"}), {}),
                    Error);
    CountMatrix dup = make_counts({{1, 2}, {1, 2}}, {"a", "a"});
    CHECK_THROWS_AS(preprocess_counts(dup, {}), Error);
}

TEST_CASE("simulate command writes a loadable bundle") {
    const std::string dir = "/tmp/rcd_io_sim";
    std::filesystem::remove_all(dir);
    SimulateArgs args;
    args.p = 6;
    args.s = 0.5;
    args.n = 30;
    args.delta = 8.0;
    args.cases = 3;
    args.seed = 5;
    cmd_simulate(args, dir);

    const Sem sem = load_sem(dir + "/model.json");
    CHECK(sem.p() == 6);
    const Dataset ds = load_dataset(dir + "/observations.csv", dir + "/case_001.csv");
    CHECK(ds.n() == 30);
    CHECK(ds.p() == 6);

    std::ifstream manifest(dir + "/cases.csv");
    std::string line;
    std::getline(manifest, line);
    CHECK(line == "case_id,file,root_cause,root_cause_name,delta");
    int rows = 0;
    while (std::getline(manifest, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 3);
    std::filesystem::remove_all(dir);
}

TEST_CASE("score command produces the report schema end to end") {
    const std::string dir = "/tmp/rcd_io_score";
    std::filesystem::remove_all(dir);
    SimulateArgs args;
    args.p = 5;
    args.s = 0.5;
    args.n = 100;
    args.delta = 10.0;
    args.cases = 1;
    args.seed = 9;
    cmd_simulate(args, dir);

    ScoreOptions opts;
    opts.seed = 1;
    cmd_score(dir + "/observations.csv", dir + "/case_001.csv", opts,
              dir + "/report.csv");
    std::ifstream report(dir + "/report.csv");
    std::string line;
    std::getline(report, line);
    CHECK(line == "variable,zscore_sq,rc_score,in_candidate_set");
    int rows = 0;
    while (std::getline(report, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 5);
    std::filesystem::remove_all(dir);
}

TEST_CASE("sufficiency command reads the model format") {
    const std::string dir = "/tmp/rcd_io_suff";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    // Chain 1 -> 2 -> 3.
    Matrix b = Matrix::Zero(3, 3);
    b(1, 0) = 1.0;
    b(2, 1) = 0.5;
    Sem sem;
    sem.dag = WeightedDag(std::move(b), {0, 1, 2});
    sem.intercept = Vector::Zero(3);
    sem.error_family.assign(3, ErrorFamily::Gaussian);
    sem.error_variances = Vector::Ones(3);
    save_sem(sem, dir + "/model.json");

    CHECK(cmd_check_sufficiency(dir + "/model.json", {1, 2, 3}, 2));
    CHECK_FALSE(cmd_check_sufficiency(dir + "/model.json", {3, 2, 1}, 2));
    CHECK_THROWS_AS(cmd_check_sufficiency(dir + "/model.json", {1, 2}, 1), Error);
    CHECK_THROWS_AS(cmd_check_sufficiency(dir + "/model.json", {1, 2, 3}, 9), Error);
    std::filesystem::remove_all(dir);
}
