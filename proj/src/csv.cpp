#include "mginf/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

#include "mginf/errors.hpp"

namespace mginf {

void CsvTable::add(std::string name, std::vector<double> values) {
    if (!columns.empty() && values.size() != rows()) {
        throw ConfigError("csv column '" + name + "' has a different length");
    }
    header.push_back(std::move(name));
    columns.push_back(std::move(values));
}

const std::vector<double>& CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) {
            return columns[i];
        }
    }
    throw ConfigError("csv has no column '" + name + "'");
}

std::string format_double(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv(std::ostream& os, const CsvTable& table) {
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        os << (c ? "," : "") << table.header[c];
    }
    os << '\n';
    for (std::size_t r = 0; r < table.rows(); ++r) {
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            os << (c ? "," : "") << format_double(table.columns[c][r]);
        }
        os << '\n';
    }
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        out.push_back(cell);
    }
    return out;
}

}  // namespace

CsvTable read_csv(std::istream& is) {
    CsvTable table;
    std::string line;
    if (!std::getline(is, line)) {
        throw ConfigError("csv input is empty");
    }
    table.header = split(line);
    table.columns.resize(table.header.size());
    while (std::getline(is, line)) {
        const auto cells = split(line);
        if (cells.size() != table.header.size()) {
            throw ConfigError("csv row has " + std::to_string(cells.size()) + " cells, expected " +
                              std::to_string(table.header.size()));
        }
        for (std::size_t c = 0; c < cells.size(); ++c) {
            char* end = nullptr;
            const double v = std::strtod(cells[c].c_str(), &end);
            if (end == cells[c].c_str() || *end != '\0') {
                throw ConfigError("csv cell '" + cells[c] + "' is not a number");
            }
            table.columns[c].push_back(v);
        }
    }
    return table;
}

}  // namespace mginf
