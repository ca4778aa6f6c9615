#include "report.hpp"

#include <ostream>
#include <stdexcept>

#include "rankone/rational.hpp"
#include "rankone/version.hpp"

namespace rankone::cli {

Format parse_format(const std::string& name) {
  if (name == "csv") return Format::Csv;
  if (name == "json") return Format::Json;
  throw std::invalid_argument("unknown format '" + name + "' (expected csv or json)");
}

void Report::add_column(std::string name, bool is_rational) {
  columns.push_back(std::move(name));
  rational.push_back(is_rational);
}

void Report::add_row(std::vector<std::string> cells) {
  if (cells.size() != columns.size()) throw std::logic_error("row width does not match the header");
  rows.push_back(std::move(cells));
}

namespace {

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

ordered_json meta_of(const Report& r, const WriteOptions& o) {
  ordered_json m;
  m["tool"] = "rankone";
  m["version"] = rankone::version;
  m["command"] = r.command;
  m["spec_hash"] = r.spec_hash ? ordered_json(*r.spec_hash) : ordered_json(nullptr);
  m["params"] = r.params;
  if (o.decimal)
    m["approximate_columns"] = "*_approx columns are decimal approximations (round-half-even, 12 significant "
                               "digits); exact num/den columns are authoritative";
  return m;
}

}  // namespace

void write_report(const Report& r, const WriteOptions& o, std::ostream& out) {
  std::vector<std::string> header = r.columns;
  std::vector<std::size_t> twins;
  if (o.decimal)
    for (std::size_t i = 0; i < r.columns.size(); ++i)
      if (r.rational[i]) {
        header.push_back(r.columns[i] + "_approx");
        twins.push_back(i);
      }
  auto widen = [&](const std::vector<std::string>& row) {
    std::vector<std::string> cells = row;
    for (auto i : twins) cells.push_back(approx_decimal(parse_rational(row[i])));
    return cells;
  };

  const auto meta = meta_of(r, o);
  if (o.format == Format::Csv) {
    out << "# " << meta.dump() << '\n';
    if (!r.summary.empty()) out << "# summary " << r.summary.dump() << '\n';
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << csv_cell(header[i]);
    out << '\n';
    for (const auto& row : r.rows) {
      const auto cells = widen(row);
      for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << csv_cell(cells[i]);
      out << '\n';
    }
    return;
  }
  ordered_json doc;
  doc["meta"] = meta;
  doc["summary"] = r.summary;
  doc["columns"] = header;
  auto rows = ordered_json::array();
  for (const auto& row : r.rows) rows.push_back(widen(row));
  doc["rows"] = rows;
  out << doc.dump(2) << '\n';
}

}  // namespace rankone::cli
