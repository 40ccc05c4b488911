// csv.hpp — CSV emission: `#` metadata header lines, comma columns, and
// 17-significant-digit numeric rendering so values round-trip losslessly.

#pragma once

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <ostream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace zenometry {

inline std::string format_full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

using Cell = std::variant<double, long long, std::string>;

inline std::string to_cell_string(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return format_full(*d);
    if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
    return std::get<std::string>(c);
}

class CsvTable {
public:
    void add_comment(std::string line) { comments_.push_back(std::move(line)); }

    void set_columns(std::vector<std::string> names) { columns_ = std::move(names); }

    void add_row(std::initializer_list<Cell> cells) {
        add_row(std::vector<Cell>(cells));
    }

    void add_row(const std::vector<Cell>& cells) {
        if (!columns_.empty() && cells.size() != columns_.size())
            throw std::logic_error("CsvTable: row width != column count");
        std::vector<std::string> row;
        row.reserve(cells.size());
        for (const auto& c : cells) row.push_back(to_cell_string(c));
        rows_.push_back(std::move(row));
    }

    void write(std::ostream& os) const {
        for (const auto& c : comments_) os << "# " << c << "\n";
        for (std::size_t i = 0; i < columns_.size(); ++i)
            os << columns_[i] << (i + 1 == columns_.size() ? "\n" : ",");
        for (const auto& row : rows_) {
            for (std::size_t i = 0; i < row.size(); ++i)
                os << row[i] << (i + 1 == row.size() ? "\n" : ",");
        }
    }

    void write_file(const std::string& path) const {
        std::ofstream os(path, std::ios::binary);
        if (!os) throw std::runtime_error("CsvTable: cannot open " + path);
        write(os);
    }

private:
    std::vector<std::string> comments_;
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

} // namespace zenometry
