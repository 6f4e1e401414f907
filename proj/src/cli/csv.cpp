#include "decoh/cli/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "decoh/error.hpp"

namespace decoh::cli {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) value = 0.0;  // drop the sign of -0
  char buf[64];
  const auto res =
      std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::vector<std::string> split_fields(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.emplace_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string join(const std::vector<std::string>& fields, char sep) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += sep;
    out += fields[i];
  }
  return out;
}

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw InvalidInput(source.string() + ": no column '" + std::string(name) + "'");
}

CsvTable read_csv(const std::filesystem::path& path,
                  const std::vector<std::string>& expected_header) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot read " + path.string());
  CsvTable table;
  table.source = path;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (number == 1) {
      table.header = split_fields(line);
      if (table.header != expected_header) {
        throw InvalidInput(path.string() + ":1: unexpected header '" + line +
                           "', expected '" + join(expected_header) + "'");
      }
      continue;
    }
    if (line.empty()) continue;
    auto fields = split_fields(line);
    if (fields.size() != expected_header.size()) {
      throw InvalidInput(path.string() + ":" + std::to_string(number) + ": expected " +
                         std::to_string(expected_header.size()) + " fields, found " +
                         std::to_string(fields.size()));
    }
    table.rows.push_back(std::move(fields));
    table.line_numbers.push_back(number);
  }
  if (number == 0) throw InvalidInput(path.string() + ": empty file");
  return table;
}

namespace {

[[noreturn]] void bad_field(const CsvTable& t, std::size_t row, std::size_t col,
                            const char* kind) {
  std::ostringstream msg;
  msg << t.source.string() << ":" << t.line_numbers[row] << ": column '" << t.header[col]
      << "' is not " << kind << " ('" << t.rows[row][col] << "')";
  throw InvalidInput(msg.str());
}

}  // namespace

double parse_double_field(const CsvTable& t, std::size_t row, std::size_t col) {
  const std::string& s = t.rows[row][col];
  double value = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) bad_field(t, row, col, "a number");
  return value;
}

int parse_int_field(const CsvTable& t, std::size_t row, std::size_t col) {
  const std::string& s = t.rows[row][col];
  int value = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) bad_field(t, row, col, "an integer");
  return value;
}

}  // namespace decoh::cli
