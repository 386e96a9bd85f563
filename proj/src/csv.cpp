// Copyright (c) 2026, The tdt Authors
// SPDX-License-Identifier: Apache-2.0

#include "tdt/csv.hpp"

#include "tdt/error.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace tdt {

std::string format_double(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, r.ptr);
}

std::vector<std::string> default_names(std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back("v" + std::to_string(i));
    return out;
}

void write_series_csv(const std::string& path, const Series& series) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw DataError(DataFault::io, "cannot open '" + path + "' for writing");
    }
    out << 't';
    for (const auto& n : series.names) out << ',' << n;
    out << '\n';
    for (std::size_t r = 0; r < series.rows.size(); ++r) {
        out << format_double(series.t[r]);
        for (double v : series.rows[r].values()) out << ',' << format_double(v);
        out << '\n';
    }
    if (!out) {
        throw DataError(DataFault::io, "write to '" + path + "' failed");
    }
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
        while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
        out.push_back(cell);
    }
    return out;
}

double parse_number(const std::string& cell, const std::string& path, std::size_t line) {
    double v = 0.0;
    const auto r = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (r.ec != std::errc{} || r.ptr != cell.data() + cell.size()) {
        throw DataError(DataFault::format, "'" + path + "' line " + std::to_string(line) + ": '" + cell +
                                               "' is not a number");
    }
    return v;
}

} // namespace

Series read_series_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError(DataFault::io, "cannot open '" + path + "' for reading");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError(DataFault::format, "'" + path + "' is empty");
    }
    const auto header = split(line);
    if (header.empty() || header.front() != "t") {
        throw DataError(DataFault::format, "'" + path + "' must start with a 't' column header");
    }
    Series s;
    s.names.assign(header.begin() + 1, header.end());
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto cells = split(line);
        if (cells.size() != header.size()) {
            throw DataError(DataFault::shape, "'" + path + "' line " + std::to_string(lineno) + " has " +
                                                  std::to_string(cells.size()) + " cells, header has " +
                                                  std::to_string(header.size()));
        }
        s.t.push_back(parse_number(cells[0], path, lineno));
        std::vector<double> v;
        for (std::size_t i = 1; i < cells.size(); ++i) v.push_back(parse_number(cells[i], path, lineno));
        s.rows.emplace_back(std::move(v));
    }
    return s;
}

} // namespace tdt
