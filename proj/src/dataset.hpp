#pragma once

#include <string>
#include <vector>

#include "numerics.hpp"
#include "types.hpp"

namespace rcd {

// Reference observations (one row per sample) plus the single case vector
// under investigation.
struct Dataset {
    Matrix observations;
    Vector case_values;
    std::vector<std::string> names;

    int n() const { return static_cast<int>(observations.rows()); }
    int p() const { return static_cast<int>(observations.cols()); }
};

// n >= 2, finite entries, matching dimensions. When require_variation is set,
// columns with zero sample variance are rejected by name.
void validate_dataset(const Dataset& ds, bool require_variation);

std::vector<std::string> default_names(int p);

// Keeps the given columns (in the given order).
Dataset select_columns(const Dataset& ds, const std::vector<int>& columns);

}  // namespace rcd
