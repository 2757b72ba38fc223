#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mginf {

/// Column-oriented numeric table: header row plus equal-length columns.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;

    void add(std::string name, std::vector<double> values);
    std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
    const std::vector<double>& column(const std::string& name) const;
};

/// Shortest-exact decimal form: 17 significant digits, so parsing the text
/// back yields the same double. Non-finite values print as nan / inf / -inf.
std::string format_double(double v);

/// Comma-separated, header row, LF line endings.
void write_csv(std::ostream& os, const CsvTable& table);
CsvTable read_csv(std::istream& is);

}  // namespace mginf
