#pragma once

// gnuplot-friendly output: CSV with '#'-prefixed header lines, or JSON.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "laserdip/error.hpp"

namespace laserdip {

/// Shortest round-trip-safe text for a double.
inline std::string format_number(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string shortest = buf;
    for (int prec = 6; prec < 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::stod(buf) == v) {
            shortest = buf;
            break;
        }
    }
    return shortest;
}

using Cell = std::variant<double, std::string, bool>;

/// Ordered name/value list written into every output file.
using Metadata = std::vector<std::pair<std::string, std::string>>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

inline std::string cell_text(const Cell& c)
{
    if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
    if (const auto* b = std::get_if<bool>(&c)) return *b ? "1" : "0";
    return std::get<std::string>(c);
}

inline nlohmann::ordered_json cell_json(const Cell& c)
{
    if (const auto* d = std::get_if<double>(&c)) return *d;
    if (const auto* b = std::get_if<bool>(&c)) return *b;
    return std::get<std::string>(c);
}

inline std::ofstream open_output(const std::filesystem::path& path)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw io_error("cannot open " + path.string() + " for writing");
    return out;
}

inline void write_header(std::ostream& out, const std::string& title, const Metadata& meta)
{
    out << "# " << title << '\n';
    for (const auto& [k, v] : meta)
        out << "# " << k << " = " << v << '\n';
}

inline void write_csv(const std::filesystem::path& path, const std::string& title, const Metadata& meta,
    const Table& table)
{
    auto out = open_output(path);
    write_header(out, title, meta);
    out << "# ";
    for (std::size_t i = 0; i < table.columns.size(); ++i)
        out << (i ? "," : "") << table.columns[i];
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << cell_text(row[i]);
        out << '\n';
    }
    if (!out)
        throw io_error("write failed for " + path.string());
}

inline nlohmann::ordered_json metadata_json(const Metadata& meta)
{
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& [k, v] : meta) j[k] = v;
    return j;
}

inline void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& doc)
{
    auto out = open_output(path);
    out << doc.dump(2) << '\n';
    if (!out)
        throw io_error("write failed for " + path.string());
}

inline void write_table_json(const std::filesystem::path& path, const std::string& title, const Metadata& meta,
    const Table& table)
{
    nlohmann::ordered_json doc;
    doc["title"] = title;
    doc["parameters"] = metadata_json(meta);
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
        nlohmann::ordered_json r = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < row.size(); ++i) r[table.columns[i]] = cell_json(row[i]);
        rows.push_back(std::move(r));
    }
    doc["rows"] = std::move(rows);
    write_json(path, doc);
}

/// CSV matrix: one line per row, no column header (gnuplot `matrix` layout).
inline void write_matrix_csv(const std::filesystem::path& path, const std::string& title, const Metadata& meta,
    const std::vector<double>& values, std::size_t n_rows, std::size_t n_cols)
{
    auto out = open_output(path);
    write_header(out, title, meta);
    for (std::size_t r = 0; r < n_rows; ++r) {
        for (std::size_t c = 0; c < n_cols; ++c)
            out << (c ? "," : "") << format_number(values[r * n_cols + c]);
        out << '\n';
    }
    if (!out)
        throw io_error("write failed for " + path.string());
}

/// Reads back a '#'-commented CSV into rows of strings (used by tests and tools).
inline std::vector<std::vector<std::string>> read_csv_rows(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw io_error("cannot open " + path.string());
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::size_t start = 0;
        while (true) {
            const auto comma = line.find(',', start);
            cells.push_back(line.substr(start, comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        rows.push_back(std::move(cells));
    }
    return rows;
}

} // namespace laserdip
