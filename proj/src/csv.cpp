#include "csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace rcd {
namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    cells.push_back(cur);
    return cells;
}

double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end)
        fail(ErrorCode::Parse, "csv: non-numeric cell at row " + std::to_string(row) +
                                   ", column " + std::to_string(col) + ": '" + cell + "'");
    if (!std::isfinite(value))
        fail(ErrorCode::Parse, "csv: non-finite value at row " + std::to_string(row) +
                                   ", column " + std::to_string(col) + ": '" + cell + "'");
    return value;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

Table load_table(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::Io, "cannot read " + path);

    Table table;
    std::string line;
    if (!std::getline(in, line)) fail(ErrorCode::Parse, "csv: empty file " + path);
    auto header = split_line(line);
    if (header.size() < 2)
        fail(ErrorCode::Parse, "csv: header must contain a label column and data columns");
    table.corner = header[0];
    table.col_names.assign(header.begin() + 1, header.end());
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < table.col_names.size(); ++i) {
        if (!seen.insert(table.col_names[i]).second)
            fail(ErrorCode::Parse,
                 "csv: duplicate header '" + table.col_names[i] + "' at column " +
                     std::to_string(i + 2));
    }

    const std::size_t width = header.size();
    std::vector<std::vector<double>> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() && in.eof()) break;
        auto cells = split_line(line);
        if (cells.size() != width)
            fail(ErrorCode::Parse, "csv: row " + std::to_string(lineno) + " has " +
                                       std::to_string(cells.size()) + " cells, expected " +
                                       std::to_string(width));
        table.row_labels.push_back(cells[0]);
        std::vector<double> row(width - 1);
        for (std::size_t c = 1; c < width; ++c)
            row[c - 1] = parse_cell(cells[c], lineno, c + 1);
        rows.push_back(std::move(row));
    }
    table.values.resize(static_cast<Eigen::Index>(rows.size()),
                        static_cast<Eigen::Index>(width - 1));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c + 1 < width; ++c)
            table.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                rows[r][c];
    return table;
}

void write_table(const Table& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::Io, "cannot write " + path);
    out << table.corner;
    for (const auto& name : table.col_names) out << ',' << name;
    out << '\n';
    for (Eigen::Index r = 0; r < table.values.rows(); ++r) {
        out << table.row_labels[static_cast<std::size_t>(r)];
        for (Eigen::Index c = 0; c < table.values.cols(); ++c)
            out << ',' << format_double(table.values(r, c));
        out << '\n';
    }
    if (!out) fail(ErrorCode::Io, "write failed for " + path);
}

Dataset load_dataset(const std::string& obs_path, const std::string& case_path) {
    Table obs = load_table(obs_path);
    Table case_table = load_table(case_path);
    if (case_table.values.rows() != 1)
        fail(ErrorCode::Parse, "case file must contain exactly one data row");
    if (case_table.col_names != obs.col_names)
        fail(ErrorCode::Parse, "case columns do not match observation columns");

    Dataset ds;
    ds.observations = std::move(obs.values);
    ds.case_values = case_table.values.row(0).transpose();
    ds.names = std::move(obs.col_names);
    validate_dataset(ds, /*require_variation=*/true);
    return ds;
}

void write_dataset_observations(const Dataset& ds, const std::string& path,
                                const std::vector<std::string>& row_labels) {
    Table table;
    table.corner = "sample";
    table.col_names = ds.names;
    table.values = ds.observations;
    if (!row_labels.empty()) {
        table.row_labels = row_labels;
    } else {
        table.row_labels.resize(static_cast<std::size_t>(ds.n()));
        for (int i = 0; i < ds.n(); ++i)
            table.row_labels[static_cast<std::size_t>(i)] = "s" + std::to_string(i + 1);
    }
    write_table(table, path);
}

void write_case(const Dataset& ds, const std::string& path, const std::string& label) {
    Table table;
    table.corner = "sample";
    table.col_names = ds.names;
    table.values = ds.case_values.transpose();
    table.row_labels = {label};
    write_table(table, path);
}

}  // namespace rcd
