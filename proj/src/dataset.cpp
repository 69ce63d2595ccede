#include "dataset.hpp"

#include <cmath>

namespace rcd {

std::vector<std::string> default_names(int p) {
    std::vector<std::string> names(p);
    for (int i = 0; i < p; ++i) names[i] = "X" + std::to_string(i + 1);
    return names;
}

void validate_dataset(const Dataset& ds, bool require_variation) {
    const int n = ds.n();
    const int p = ds.p();
    if (n < 2) fail(ErrorCode::InvalidArgument, "dataset: need at least 2 observations");
    if (p < 1) fail(ErrorCode::InvalidArgument, "dataset: need at least 1 variable");
    if (ds.case_values.size() != p)
        fail(ErrorCode::InvalidArgument, "dataset: case vector length disagrees with data");
    if (static_cast<int>(ds.names.size()) != p)
        fail(ErrorCode::InvalidArgument, "dataset: name count disagrees with data");
    if (!ds.observations.allFinite())
        fail(ErrorCode::InvalidArgument, "dataset: observations contain non-finite values");
    if (!ds.case_values.allFinite())
        fail(ErrorCode::InvalidArgument, "dataset: case contains non-finite values");
    if (require_variation) {
        const Moments m = sample_moments(ds.observations);
        for (int j = 0; j < p; ++j)
            if (m.sd(j) == 0.0)
                fail(ErrorCode::InvalidArgument,
                     "dataset: column '" + ds.names[j] + "' has zero sample variance");
    }
}

Dataset select_columns(const Dataset& ds, const std::vector<int>& columns) {
    Dataset out;
    const int q = static_cast<int>(columns.size());
    out.observations.resize(ds.n(), q);
    out.case_values.resize(q);
    out.names.resize(q);
    for (int j = 0; j < q; ++j) {
        const int c = columns[j];
        if (c < 0 || c >= ds.p())
            fail(ErrorCode::InvalidArgument, "select_columns: index out of range");
        out.observations.col(j) = ds.observations.col(c);
        out.case_values(j) = ds.case_values(c);
        out.names[j] = ds.names[c];
    }
    return out;
}

}  // namespace rcd
