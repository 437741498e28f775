#pragma once

/**
 * @file csv.hpp
 * @brief Numeric CSV tables with fixed column schemas.
 */

#include <lmgqpt/errors.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

namespace lmgqpt::harness {

namespace schema {
inline const std::vector<std::string> kSweep{"bx", "zeta_x", "zeta_y", "sqrt_zeta_x", "chi", "gap", "c_xxyy", "eta"};
inline const std::vector<std::string> kGain{"t", "pe", "sx2", "sy2", "gain"};
inline const std::vector<std::string> kQFunction{"theta", "phi", "q"};
inline const std::vector<std::string> kTransductionMap{"delta_pp", "gamma", "pe_steady"};
inline const std::vector<std::string> kSize{"n", "chi", "gap", "c_xxyy"};
}  // namespace schema

/// 17 significant digits; non-finite values are written as nan / inf / -inf.
inline std::string format_value(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {
        lmgqpt::detail::require(!header_.empty(), "CsvTable: empty header");
    }

    void add_row(std::vector<double> row) {
        if (row.size() != header_.size())
            throw PreconditionError("CsvTable: row has " + std::to_string(row.size()) + " values, header has " +
                                    std::to_string(header_.size()));
        rows_.push_back(std::move(row));
    }
    void add_row(std::initializer_list<double> row) { add_row(std::vector<double>(row)); }

    [[nodiscard]] const std::vector<std::string>& header() const noexcept { return header_; }
    [[nodiscard]] const std::vector<std::vector<double>>& rows() const noexcept { return rows_; }

    [[nodiscard]] std::string str() const {
        std::string out;
        for (std::size_t i = 0; i < header_.size(); ++i) out += (i ? "," : "") + header_[i];
        out += '\n';
        for (const auto& row : rows_) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (i) out += ',';
                out += format_value(row[i]);
            }
            out += '\n';
        }
        return out;
    }

    void write(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw Error("cannot open '" + path + "' for writing");
        out << str();
        if (!out) throw Error("write to '" + path + "' failed");
    }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<double>> rows_;
};

/// Reads back a table written by CsvTable; a row whose width differs from the header is an error.
inline CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw Error("'" + path + "' is empty");
    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) header.push_back(cell);
    }
    CsvTable table(header);
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
        if (row.size() != header.size())
            throw Error("'" + path + "' line " + std::to_string(line_no) + ": column count mismatch");
        table.add_row(std::move(row));
    }
    return table;
}

}  // namespace lmgqpt::harness
