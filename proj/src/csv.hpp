#pragma once

#include <string>
#include <vector>

#include "dataset.hpp"
#include "numerics.hpp"

namespace rcd {

// Labelled numeric table: first CSV row is the header (corner cell plus
// column names), every following row is a label plus decimal values.
struct Table {
    std::string corner;
    std::vector<std::string> col_names;
    std::vector<std::string> row_labels;
    Matrix values;
};

// Strict reader: UTF-8, comma separated, no ragged rows, no duplicate
// headers, every cell finite. Errors carry the 1-based row/column position.
Table load_table(const std::string& path);

// Writer with round-trip float formatting; load(write(x)) is bitwise x for
// finite doubles.
void write_table(const Table& table, const std::string& path);

std::string format_double(double v);

// Observations CSV plus a one-row case CSV with the same column names.
Dataset load_dataset(const std::string& obs_path, const std::string& case_path);

void write_dataset_observations(const Dataset& ds, const std::string& path,
                                const std::vector<std::string>& row_labels = {});
void write_case(const Dataset& ds, const std::string& path,
                const std::string& label = "case");

}  // namespace rcd
