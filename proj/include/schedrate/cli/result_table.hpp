#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "schedrate/rational.hpp"

namespace schedrate::cli {

inline constexpr const char* kToolVersion = "0.1.0";

using Cell = std::variant<std::int64_t, Rational, double, bool, std::string>;

struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::pair<std::string, std::string>> metadata;

  // DomainError if the row width differs from the header.
  void add_row(std::vector<Cell> row);
  void set_metadata(const std::string& key, std::string value);
};

enum class Format { Csv, JsonLines };

Format parse_format(const std::string& name);

// Doubles use 12 significant digits: 0.25 -> "0.250000000000".
std::string format_double(double x);

// CSV: '#'-prefixed metadata lines, one header line, RFC-4180 quoting.
// JSON lines: a metadata object, then one object per row.
std::string emit(const ResultTable& table, Format format);

}  // namespace schedrate::cli
