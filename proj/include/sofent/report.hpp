#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace sofent {

// Report cells carry raw integers next to any decimal rendering so that
// downstream checks can recompute exactly.

using Cell = std::variant<std::int64_t, std::uint64_t, double, bool,
                          std::string>;

inline std::string render_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string cell_text(const Cell& c) {
  struct visitor {
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(std::uint64_t v) const { return std::to_string(v); }
    std::string operator()(double v) const { return render_double(v); }
    std::string operator()(bool v) const { return v ? "true" : "false"; }
    std::string operator()(const std::string& v) const { return v; }
  };
  return std::visit(visitor{}, c);
}

struct ReportTable {
  std::string schema_version = "1";
  std::string command;
  std::vector<std::pair<std::string, std::string>> params;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::pair<std::string, std::string>> summary;
  bool pass = true;

  void param(const std::string& k, const std::string& v) {
    params.emplace_back(k, v);
  }
  void note(const std::string& k, const std::string& v) {
    summary.emplace_back(k, v);
  }
};

inline std::string csv_escape(const std::string& s) {
  bool needs = false;
  for (char c : s)
    if (c == ',' || c == '"' || c == '\n') needs = true;
  if (!needs) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string render_csv(const ReportTable& t) {
  std::string out;
  out += "# schema_version=" + t.schema_version + "\n";
  out += "# command=" + t.command + "\n";
  for (const auto& [k, v] : t.params) out += "# param " + k + "=" + v + "\n";
  for (std::size_t j = 0; j < t.columns.size(); ++j) {
    if (j) out += ',';
    out += csv_escape(t.columns[j]);
  }
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out += ',';
      out += csv_escape(cell_text(row[j]));
    }
    out += '\n';
  }
  for (const auto& [k, v] : t.summary) out += "# " + k + "=" + v + "\n";
  out += std::string("# pass=") + (t.pass ? "true" : "false") + "\n";
  return out;
}

}  // namespace sofent
