#include "schedrate/cli/result_table.hpp"

#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "schedrate/errors.hpp"

namespace schedrate::cli {

using nlohmann::ordered_json;

void ResultTable::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) {
    throw DomainError("row has " + std::to_string(row.size()) + " cells, table has " +
                      std::to_string(columns.size()) + " columns");
  }
  rows.push_back(std::move(row));
}

void ResultTable::set_metadata(const std::string& key, std::string value) {
  for (auto& [k, v] : metadata) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  metadata.emplace_back(key, std::move(value));
}

Format parse_format(const std::string& name) {
  if (name == "csv") return Format::Csv;
  if (name == "jsonl" || name == "json-lines") return Format::JsonLines;
  throw DomainError("unknown output format '" + name + "' (expected csv or jsonl)");
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%#.12g", x);
  return buf;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string cell_text(const Cell& cell) {
  struct {
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(const Rational& v) const { return to_string(v); }
    std::string operator()(double v) const { return format_double(v); }
    std::string operator()(bool v) const { return v ? "true" : "false"; }
    std::string operator()(const std::string& v) const { return v; }
  } visitor;
  return std::visit(visitor, cell);
}

ordered_json cell_json(const Cell& cell) {
  struct {
    ordered_json operator()(std::int64_t v) const { return v; }
    ordered_json operator()(const Rational& v) const {
      return ordered_json{{"num", v.numerator()}, {"den", v.denominator()}};
    }
    // Same digits as CSV, kept numeric.
    ordered_json operator()(double v) const {
      if (!std::isfinite(v)) return format_double(v);
      return std::stod(format_double(v));
    }
    ordered_json operator()(bool v) const { return v; }
    ordered_json operator()(const std::string& v) const { return v; }
  } visitor;
  return std::visit(visitor, cell);
}

}  // namespace

std::string emit(const ResultTable& table, Format format) {
  std::string out;
  if (format == Format::Csv) {
    for (const auto& [k, v] : table.metadata) out += "# " + k + ": " + v + "\n";
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
      if (i) out += ',';
      out += csv_field(table.columns[i]);
    }
    out += "\n";
    for (const auto& row : table.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out += ',';
        out += csv_field(cell_text(row[i]));
      }
      out += "\n";
    }
    return out;
  }

  ordered_json meta = ordered_json::object();
  for (const auto& [k, v] : table.metadata) meta[k] = v;
  meta["columns"] = table.columns;
  out += ordered_json{{"metadata", meta}}.dump() + "\n";
  for (const auto& row : table.rows) {
    ordered_json obj = ordered_json::object();
    for (std::size_t i = 0; i < row.size(); ++i) obj[table.columns[i]] = cell_json(row[i]);
    out += obj.dump() + "\n";
  }
  return out;
}

}  // namespace schedrate::cli
