#pragma once

// CSV emission and parsing. Doubles are written with enough digits to
// round-trip bit-exactly.

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace opflab::csv {

using Cell = std::variant<std::string, double, long long>;
using Row = std::vector<Cell>;

struct Table {
  std::vector<std::string> header;
  std::vector<Row> rows;
};

std::string format_double(double v);

void write(const std::filesystem::path& path, const Table& table);
Table read(const std::filesystem::path& path);

// Numeric view of a parsed cell; throws if it is not numeric.
double as_double(const Cell& c);

}  // namespace opflab::csv
