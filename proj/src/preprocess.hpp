#pragma once

#include <string>
#include <vector>

#include "numerics.hpp"
#include "types.hpp"

namespace rcd {

// Raw sequencing counts, samples by genes. Entries must be nonnegative
// integers; labels must be unique.
struct CountMatrix {
    Matrix counts;
    std::vector<std::string> gene_names;
    std::vector<std::string> sample_names;

    int samples() const { return static_cast<int>(counts.rows()); }
    int genes() const { return static_cast<int>(counts.cols()); }
};

void validate_counts(const CountMatrix& counts);

struct PreprocessOptions {
    double min_count = 10.0;
    double max_zero_frac = 0.9;   // drop genes below min_count in more than this
    double corr_cutoff = 0.999;
    double pseudocount = 1.0;
    // Default scales inside the log: log((c + pseudo) / sf). The alternative
    // divides the logged value by the size factor instead.
    bool scale_after_log = false;
};

struct PreprocessResult {
    Matrix values;  // samples x kept genes
    std::vector<std::string> gene_names;
    std::vector<std::string> sample_names;
    Vector size_factors;
    int dropped_low_count = 0;
    int dropped_correlated = 0;
};

// Count filter, median-of-ratios size factors, log transform, then marginal
// correlation filter that keeps the earlier-indexed gene of each offending
// pair.
PreprocessResult preprocess_counts(const CountMatrix& counts,
                                   const PreprocessOptions& opts = {});

}  // namespace rcd
