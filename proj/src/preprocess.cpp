#include "preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace rcd {
namespace {

double median_of(std::vector<double> values) {
    const std::size_t n = values.size();
    std::sort(values.begin(), values.end());
    if (n % 2 == 1) return values[n / 2];
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

void validate_counts(const CountMatrix& counts) {
    if (counts.samples() < 2)
        fail(ErrorCode::InvalidArgument, "counts: need at least 2 samples");
    if (counts.genes() < 1)
        fail(ErrorCode::InvalidArgument, "counts: need at least 1 gene");
    if (static_cast<int>(counts.gene_names.size()) != counts.genes() ||
        static_cast<int>(counts.sample_names.size()) != counts.samples())
        fail(ErrorCode::InvalidArgument, "counts: label counts disagree with matrix");
    std::unordered_set<std::string> seen;
    for (const auto& name : counts.gene_names)
        if (!seen.insert(name).second)
            fail(ErrorCode::InvalidArgument, "counts: duplicate gene label '" + name + "'");
    for (int i = 0; i < counts.samples(); ++i) {
        for (int j = 0; j < counts.genes(); ++j) {
            const double v = counts.counts(i, j);
            if (!(v >= 0.0) || v != std::floor(v))
                fail(ErrorCode::InvalidArgument,
                     "counts: entry for gene '" + counts.gene_names[j] + "', sample '" +
                         counts.sample_names[i] + "' is not a nonnegative integer");
        }
    }
}

PreprocessResult preprocess_counts(const CountMatrix& counts,
                                   const PreprocessOptions& opts) {
    validate_counts(counts);
    const int n = counts.samples();

    // (1) Low-count filter.
    std::vector<int> kept;
    for (int j = 0; j < counts.genes(); ++j) {
        int low = 0;
        for (int i = 0; i < n; ++i)
            if (counts.counts(i, j) < opts.min_count) ++low;
        if (static_cast<double>(low) <= opts.max_zero_frac * n) kept.push_back(j);
    }
    PreprocessResult result;
    result.dropped_low_count = counts.genes() - static_cast<int>(kept.size());
    if (kept.empty())
        fail(ErrorCode::InvalidArgument,
             "preprocess: every gene fell below the count filter; relax --min-count "
             "or --max-zero-frac");

    // (2) Median-of-ratios size factors over genes with all-positive counts.
    std::vector<double> log_geomean(kept.size());
    std::vector<bool> eligible(kept.size(), false);
    for (std::size_t k = 0; k < kept.size(); ++k) {
        const int j = kept[k];
        double s = 0.0;
        bool positive = true;
        for (int i = 0; i < n; ++i) {
            const double c = counts.counts(i, j);
            if (c <= 0.0) {
                positive = false;
                break;
            }
            s += std::log(c);
        }
        if (positive) {
            log_geomean[k] = s / n;
            eligible[k] = true;
        }
    }
    if (std::none_of(eligible.begin(), eligible.end(), [](bool b) { return b; }))
        fail(ErrorCode::InvalidArgument,
             "preprocess: size factors undefined, every retained gene has a zero "
             "count; tighten the count filter");

    result.size_factors.resize(n);
    for (int i = 0; i < n; ++i) {
        std::vector<double> ratios;
        for (std::size_t k = 0; k < kept.size(); ++k) {
            if (!eligible[k]) continue;
            ratios.push_back(std::log(counts.counts(i, kept[k])) - log_geomean[k]);
        }
        result.size_factors(i) = std::exp(median_of(std::move(ratios)));
    }

    // (3) Log transform.
    Matrix y(n, static_cast<int>(kept.size()));
    for (std::size_t k = 0; k < kept.size(); ++k) {
        for (int i = 0; i < n; ++i) {
            const double c = counts.counts(i, kept[k]) + opts.pseudocount;
            y(i, static_cast<int>(k)) =
                opts.scale_after_log ? std::log(c) / result.size_factors(i)
                                     : std::log(c / result.size_factors(i));
        }
    }

    // (4) Correlation filter; the later-indexed gene of a flagged pair goes.
    const int q = static_cast<int>(kept.size());
    Matrix standardized(n, q);
    std::vector<bool> constant(static_cast<std::size_t>(q), false);
    for (int j = 0; j < q; ++j) {
        const double mean = y.col(j).mean();
        Vector centered = y.col(j).array() - mean;
        const double norm = centered.norm();
        if (norm == 0.0) {
            constant[static_cast<std::size_t>(j)] = true;
            standardized.col(j).setZero();
        } else {
            standardized.col(j) = centered / norm;
        }
    }
    std::vector<bool> alive(static_cast<std::size_t>(q), true);
    for (int j = 0; j < q; ++j) {
        if (!alive[static_cast<std::size_t>(j)]) continue;
        for (int k = j + 1; k < q; ++k) {
            if (!alive[static_cast<std::size_t>(k)]) continue;
            double corr;
            if (constant[static_cast<std::size_t>(j)] ||
                constant[static_cast<std::size_t>(k)])
                // Identical constant columns are perfectly dependent.
                corr = (constant[static_cast<std::size_t>(j)] &&
                        constant[static_cast<std::size_t>(k)] &&
                        y.col(j) == y.col(k))
                           ? 1.0
                           : 0.0;
            else
                corr = standardized.col(j).dot(standardized.col(k));
            if (std::abs(corr) > opts.corr_cutoff)
                alive[static_cast<std::size_t>(k)] = false;
        }
    }

    std::vector<int> final_cols;
    for (int j = 0; j < q; ++j)
        if (alive[static_cast<std::size_t>(j)]) final_cols.push_back(j);
    result.dropped_correlated = q - static_cast<int>(final_cols.size());

    result.values.resize(n, static_cast<int>(final_cols.size()));
    result.gene_names.resize(final_cols.size());
    for (std::size_t k = 0; k < final_cols.size(); ++k) {
        result.values.col(static_cast<int>(k)) = y.col(final_cols[k]);
        result.gene_names[k] = counts.gene_names[static_cast<std::size_t>(kept[final_cols[k]])];
    }
    result.sample_names = counts.sample_names;
    return result;
}

}  // namespace rcd
