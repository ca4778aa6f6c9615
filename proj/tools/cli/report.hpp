#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace rankone::cli {

using ordered_json = nlohmann::ordered_json;

enum class Format { Csv, Json };

Format parse_format(const std::string& name);

/// A table plus everything needed to trace it back to its inputs.
struct Report {
  std::string command;
  ordered_json params = ordered_json::object();
  std::optional<std::string> spec_hash;
  std::vector<std::string> columns;
  /// Columns holding exact "num/den" values; these get *_approx twins on request.
  std::vector<bool> rational;
  std::vector<std::vector<std::string>> rows;
  ordered_json summary = ordered_json::object();

  void add_column(std::string name, bool is_rational = false);
  void add_row(std::vector<std::string> cells);
};

struct WriteOptions {
  Format format = Format::Csv;
  bool decimal = false;
};

/// CSV: one "# {meta}" line, optional "# summary {...}", header, rows.
/// JSON: {"meta", "summary", "columns", "rows"}.  No timestamps, so equal
/// inputs give equal bytes.
void write_report(const Report& report, const WriteOptions& options, std::ostream& out);

}  // namespace rankone::cli
