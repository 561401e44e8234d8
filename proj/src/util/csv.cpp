#include "opflab/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace opflab::csv {

std::string format_double(double v) {
  char buf[40];
  // 17 significant digits round-trips any IEEE-754 double.
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::string format_cell(const Cell& c) {
  if (std::holds_alternative<std::string>(c)) return std::get<std::string>(c);
  if (std::holds_alternative<long long>(c))
    return std::to_string(std::get<long long>(c));
  return format_double(std::get<double>(c));
}

Cell parse_cell(const std::string& s) {
  if (s.empty()) return Cell(std::string());
  // integer?
  {
    long long v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && p == s.data() + s.size()) return Cell(v);
  }
  {
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && p == s.data() + s.size()) return Cell(v);
  }
  return Cell(s);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

void write(const std::filesystem::path& path, const Table& table) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i) os << ',';
    os << table.header[i];
  }
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << ',';
      os << format_cell(row[i]);
    }
    os << '\n';
  }
}

Table read(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open: " + path.string());
  Table t;
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (first) {
      t.header = split_line(line);
      first = false;
      continue;
    }
    if (line.empty()) continue;
    Row row;
    for (const auto& f : split_line(line)) row.push_back(parse_cell(f));
    t.rows.push_back(std::move(row));
  }
  return t;
}

double as_double(const Cell& c) {
  if (std::holds_alternative<double>(c)) return std::get<double>(c);
  if (std::holds_alternative<long long>(c))
    return static_cast<double>(std::get<long long>(c));
  throw std::runtime_error("csv cell is not numeric: " + std::get<std::string>(c));
}

}  // namespace opflab::csv
