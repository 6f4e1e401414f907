#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace decoh::cli {

/// Shortest form is not used on purpose: every float is written with 17
/// significant digits so files are comparable byte for byte.
std::string format_double(double value);

std::vector<std::string> split_fields(std::string_view line, char sep = ',');

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<int> line_numbers;  // 1-based source line of each row
  std::filesystem::path source;

  std::size_t column(std::string_view name) const;
};

/// Reads a comma-separated file and checks the header against `expected`.
/// Throws InvalidInput with file and line for a wrong header or a row with the
/// wrong number of fields.
CsvTable read_csv(const std::filesystem::path& path,
                  const std::vector<std::string>& expected_header);

/// Numeric field parsers that report file, line and column on failure.
double parse_double_field(const CsvTable& table, std::size_t row, std::size_t col);
int parse_int_field(const CsvTable& table, std::size_t row, std::size_t col);

std::string join(const std::vector<std::string>& fields, char sep = ',');

}  // namespace decoh::cli
