#include "sem.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace rcd {
namespace {

double uniform_half_width(double variance) { return std::sqrt(3.0 * variance); }

// One draw from the error distribution of variable j.
double draw_error(const Sem& sem, int j, Rng& rng) {
    const double var = sem.error_variances(j);
    if (sem.error_family[j] == ErrorFamily::Gaussian)
        return rng.normal(0.0, std::sqrt(var));
    const double a = uniform_half_width(var);
    return rng.uniform(-a, a);
}

// Solves X = b + B X + eps by substitution along the causal order, with an
// optional mean shift added to the error of one variable.
Vector sample_row(const Sem& sem, const Intervention* iv, Rng& rng) {
    const int p = sem.p();
    Vector eps(p);
    for (int j = 0; j < p; ++j) eps(j) = draw_error(sem, j, rng);
    if (iv != nullptr) eps(iv->target) += iv->shift;

    Vector x = Vector::Zero(p);
    for (int idx = 0; idx < p; ++idx) {
        const int v = sem.dag.causal_order[idx];
        double s = sem.intercept(v) + eps(v);
        for (int k = 0; k < p; ++k) {
            const double w = sem.dag.weights(v, k);
            if (w != 0.0) s += w * x(k);
        }
        x(v) = s;
    }
    return x;
}

}  // namespace

void validate_sem(const Sem& sem) {
    validate_dag(sem.dag);
    const int p = sem.p();
    if (sem.intercept.size() != p || sem.error_variances.size() != p ||
        static_cast<int>(sem.error_family.size()) != p)
        fail(ErrorCode::InvalidArgument, "sem: field lengths disagree with p");
    for (int j = 0; j < p; ++j)
        if (!(sem.error_variances(j) > 0.0))
            fail(ErrorCode::InvalidArgument,
                 "sem: error variance of variable " + std::to_string(j + 1) +
                     " must be positive");
}

WeightedDag random_dag(int p, double s, Rng& rng) {
    if (p < 2) fail(ErrorCode::InvalidArgument, "random_dag: p must be at least 2");
    if (!(s >= 0.0 && s <= 1.0))
        fail(ErrorCode::InvalidArgument, "random_dag: sparsity must lie in [0,1]");
    Matrix b = Matrix::Zero(p, p);
    for (int i = 1; i < p; ++i)
        for (int j = 0; j < i; ++j)
            if (rng.bernoulli(s)) b(i, j) = rng.uniform(-1.0, 1.0);
    std::vector<int> order(p);
    for (int i = 0; i < p; ++i) order[i] = i;
    return WeightedDag(std::move(b), std::move(order));
}

WeightedDag hub_dag(const HubLayout& layout, Rng& rng) {
    const int h = layout.n_hubs;
    if (h < 1 || layout.upper < 1 || layout.lower < 1)
        fail(ErrorCode::InvalidArgument, "hub_dag: block sizes must be positive");
    if (layout.cross_in < 0 || layout.cross_in > (h - 1) * layout.upper)
        fail(ErrorCode::InvalidArgument,
             "hub_dag: cross_in exceeds nodes available in other upper blocks");
    if (layout.cross_out < 0 || layout.cross_out > (h - 1) * layout.lower)
        fail(ErrorCode::InvalidArgument,
             "hub_dag: cross_out exceeds nodes available in other lower blocks");
    if (!(layout.s >= 0.0 && layout.s <= 1.0))
        fail(ErrorCode::InvalidArgument, "hub_dag: sparsity must lie in [0,1]");

    const int p = layout.total_variables();
    const int hub_base = h * layout.upper;
    const int lower_base = hub_base + h;
    Matrix b = Matrix::Zero(p, p);

    auto upper_node = [&](int hub, int i) { return hub * layout.upper + i; };
    auto lower_node = [&](int hub, int i) { return lower_base + hub * layout.lower + i; };

    // Within-block random DAGs, respecting the block-internal index order.
    auto fill_block = [&](int base, int size) {
        for (int i = 1; i < size; ++i)
            for (int j = 0; j < i; ++j)
                if (rng.bernoulli(layout.s)) b(base + i, base + j) = rng.uniform(-1.0, 1.0);
    };
    for (int hub = 0; hub < h; ++hub) fill_block(hub * layout.upper, layout.upper);
    for (int hub = 0; hub < h; ++hub)
        fill_block(lower_base + hub * layout.lower, layout.lower);

    for (int hub = 0; hub < h; ++hub) {
        const int hub_id = hub_base + hub;
        for (int i = 0; i < layout.upper; ++i)
            b(hub_id, upper_node(hub, i)) = rng.uniform(-1.0, 1.0);
        for (int i = 0; i < layout.lower; ++i)
            b(lower_node(hub, i), hub_id) = rng.uniform(-1.0, 1.0);

        // Cross edges, sampled without replacement from the foreign blocks.
        std::vector<int> foreign_upper;
        std::vector<int> foreign_lower;
        for (int other = 0; other < h; ++other) {
            if (other == hub) continue;
            for (int i = 0; i < layout.upper; ++i)
                foreign_upper.push_back(upper_node(other, i));
            for (int i = 0; i < layout.lower; ++i)
                foreign_lower.push_back(lower_node(other, i));
        }
        for (int idx : rng.sample_without_replacement(
                 static_cast<int>(foreign_upper.size()), layout.cross_in))
            b(hub_id, foreign_upper[idx]) = rng.uniform(-1.0, 1.0);
        for (int idx : rng.sample_without_replacement(
                 static_cast<int>(foreign_lower.size()), layout.cross_out))
            b(foreign_lower[idx], hub_id) = rng.uniform(-1.0, 1.0);
    }

    std::vector<int> order(p);
    for (int i = 0; i < p; ++i) order[i] = i;
    return WeightedDag(std::move(b), std::move(order));
}

Sem make_sem(WeightedDag dag, ErrorFamily family, Rng& rng, double var_lo,
             double var_hi, double intercept_lo, double intercept_hi) {
    Sem sem;
    const int p = dag.p;
    sem.dag = std::move(dag);
    sem.intercept.resize(p);
    sem.error_variances.resize(p);
    sem.error_family.assign(p, family);
    for (int j = 0; j < p; ++j) sem.intercept(j) = rng.uniform(intercept_lo, intercept_hi);
    for (int j = 0; j < p; ++j) sem.error_variances(j) = rng.uniform(var_lo, var_hi);
    validate_sem(sem);
    return sem;
}

Sem rescale_to_target_variances(const Sem& sem, const Vector& targets) {
    validate_sem(sem);
    const int p = sem.p();
    if (targets.size() != p)
        fail(ErrorCode::InvalidArgument, "rescale: targets must have length p");
    for (int j = 0; j < p; ++j)
        if (!(targets(j) > 0.0))
            fail(ErrorCode::InvalidArgument, "rescale: targets must be positive");

    Sem out = sem;
    // effect_rows[v] holds the finalized row of (I-B)^{-1}: X_v expressed in
    // the error terms. Finalizing nodes along the causal order means parent
    // rows are settled before any child consults them.
    Matrix effect_rows = Matrix::Zero(p, p);
    for (int idx = 0; idx < p; ++idx) {
        const int v = sem.dag.causal_order[idx];
        Vector combo = Vector::Zero(p);
        bool has_parent = false;
        for (int k = 0; k < p; ++k) {
            const double w = out.dag.weights(v, k);
            if (w == 0.0) continue;
            has_parent = true;
            combo += w * effect_rows.row(k).transpose();
        }
        if (!has_parent) {
            out.error_variances(v) = targets(v);
        } else {
            double parent_var = 0.0;
            for (int k = 0; k < p; ++k)
                parent_var += combo(k) * combo(k) * out.error_variances(k);
            if (!(parent_var > 0.0))
                fail(ErrorCode::Numeric,
                     "rescale: parent contribution of variable " + std::to_string(v + 1) +
                         " has zero variance");
            if (!(targets(v) > out.error_variances(v)))
                fail(ErrorCode::InvalidArgument,
                     "rescale: target of variable " + std::to_string(v + 1) +
                         " must exceed its error variance");
            const double scale =
                std::sqrt((targets(v) - out.error_variances(v)) / parent_var);
            out.dag.weights.row(v) *= scale;
            combo *= scale;
        }
        effect_rows.row(v) = combo.transpose();
        effect_rows(v, v) += 1.0;
    }
    return out;
}

Permutation random_permutation(int p, Rng& rng) {
    std::vector<int> fwd(p);
    for (int i = 0; i < p; ++i) fwd[i] = i;
    rng.shuffle(fwd);
    return Permutation(std::move(fwd));
}

Sem apply_variable_permutation(const Sem& sem, const Permutation& perm) {
    const int p = sem.p();
    if (perm.size() != p)
        fail(ErrorCode::InvalidArgument, "permutation size disagrees with model");
    Sem out;
    out.intercept.resize(p);
    out.error_variances.resize(p);
    out.error_family.resize(p);
    Matrix b(p, p);
    for (int i = 0; i < p; ++i) {
        const int oi = perm.forward[i];
        out.intercept(i) = sem.intercept(oi);
        out.error_variances(i) = sem.error_variances(oi);
        out.error_family[i] = sem.error_family[oi];
        for (int j = 0; j < p; ++j) b(i, j) = sem.dag.weights(oi, perm.forward[j]);
    }
    std::vector<int> order(p);
    for (int i = 0; i < p; ++i) order[i] = perm.inverse[sem.dag.causal_order[i]];
    out.dag = WeightedDag(std::move(b), std::move(order));
    validate_sem(out);
    return out;
}

// Rows get counter-derived substreams so sampling can run per row in
// parallel, and so a zero-shift interventional draw replays the exact
// stream of the first observational row.
constexpr std::uint64_t kRowStreamTag = 0x726f77ull;

Matrix sample_observational(const Sem& sem, int n, Rng& rng) {
    if (n < 1) fail(ErrorCode::InvalidArgument, "sample_observational: n must be positive");
    Matrix data(n, sem.p());
    for (int i = 0; i < n; ++i) {
        Rng row_rng = rng.child(static_cast<std::uint64_t>(i), kRowStreamTag);
        data.row(i) = sample_row(sem, nullptr, row_rng).transpose();
    }
    return data;
}

Vector sample_interventional(const Sem& sem, const Intervention& iv, Rng& rng) {
    if (iv.target < 0 || iv.target >= sem.p())
        fail(ErrorCode::InvalidArgument, "sample_interventional: target out of range");
    Rng row_rng = rng.child(0, kRowStreamTag);
    return sample_row(sem, &iv, row_rng);
}

Vector population_mean(const Sem& sem) {
    const Matrix t = total_effects(sem.dag);
    return t * sem.intercept;
}

Matrix population_covariance(const Sem& sem) {
    const Matrix t = total_effects(sem.dag);
    Matrix cov(sem.p(), sem.p());
    for (int i = 0; i < sem.p(); ++i) {
        for (int j = i; j < sem.p(); ++j) {
            double s = 0.0;
            for (int k = 0; k < sem.p(); ++k)
                s += t(i, k) * t(j, k) * sem.error_variances(k);
            cov(i, j) = s;
            cov(j, i) = s;
        }
    }
    return cov;
}

std::string sem_to_json(const Sem& sem) {
    validate_sem(sem);
    nlohmann::json j;
    const int p = sem.p();
    j["p"] = p;
    j["b"] = std::vector<double>(sem.intercept.data(), sem.intercept.data() + p);
    std::vector<std::vector<double>> rows(p, std::vector<double>(p));
    for (int r = 0; r < p; ++r)
        for (int c = 0; c < p; ++c) rows[r][c] = sem.dag.weights(r, c);
    j["B"] = rows;
    std::vector<std::string> fam(p);
    for (int i = 0; i < p; ++i)
        fam[i] = sem.error_family[i] == ErrorFamily::Gaussian ? "gaussian" : "uniform";
    j["error_family"] = fam;
    j["error_variances"] =
        std::vector<double>(sem.error_variances.data(), sem.error_variances.data() + p);
    std::vector<int> order(p);
    for (int i = 0; i < p; ++i) order[i] = sem.dag.causal_order[i] + 1;
    j["causal_order"] = order;
    return j.dump(2);
}

Sem sem_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::Parse, std::string("model json: ") + e.what());
    }
    try {
        const int p = j.at("p").get<int>();
        if (p < 1) fail(ErrorCode::Parse, "model json: p must be positive");
        Sem sem;
        const auto b = j.at("b").get<std::vector<double>>();
        const auto rows = j.at("B").get<std::vector<std::vector<double>>>();
        const auto fam = j.at("error_family").get<std::vector<std::string>>();
        const auto vars = j.at("error_variances").get<std::vector<double>>();
        const auto order1 = j.at("causal_order").get<std::vector<int>>();
        if (static_cast<int>(b.size()) != p || static_cast<int>(rows.size()) != p ||
            static_cast<int>(fam.size()) != p || static_cast<int>(vars.size()) != p ||
            static_cast<int>(order1.size()) != p)
            fail(ErrorCode::Parse, "model json: field lengths disagree with p");
        sem.intercept = Eigen::Map<const Vector>(b.data(), p);
        Matrix weights(p, p);
        for (int r = 0; r < p; ++r) {
            if (static_cast<int>(rows[r].size()) != p)
                fail(ErrorCode::Parse, "model json: B must be p x p");
            for (int c = 0; c < p; ++c) {
                if (!std::isfinite(rows[r][c]))
                    fail(ErrorCode::Parse, "model json: B entries must be finite");
                weights(r, c) = rows[r][c];
            }
        }
        sem.error_variances = Eigen::Map<const Vector>(vars.data(), p);
        sem.error_family.resize(p);
        for (int i = 0; i < p; ++i) {
            if (fam[i] == "gaussian")
                sem.error_family[i] = ErrorFamily::Gaussian;
            else if (fam[i] == "uniform")
                sem.error_family[i] = ErrorFamily::Uniform;
            else
                fail(ErrorCode::Parse, "model json: unknown error family '" + fam[i] + "'");
        }
        std::vector<int> order(p);
        for (int i = 0; i < p; ++i) order[i] = order1[i] - 1;
        sem.dag = WeightedDag(std::move(weights), std::move(order));
        validate_sem(sem);
        return sem;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::Parse, std::string("model json: ") + e.what());
    }
}

void save_sem(const Sem& sem, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::Io, "cannot write " + path);
    out << sem_to_json(sem) << '\n';
    if (!out) fail(ErrorCode::Io, "write failed for " + path);
}

Sem load_sem(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::Io, "cannot read " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return sem_from_json(buf.str());
}

}  // namespace rcd
