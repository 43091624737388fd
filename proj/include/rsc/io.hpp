#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "rsc/complex.hpp"
#include "rsc/components.hpp"
#include "rsc/errors.hpp"

namespace rsc::io {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Complexes as JSON Lines: one {"dim": k, "vertices": [...]} per maximal simplex.

inline void write_complex(std::ostream& os, const ComplexD& x) {
  for (const auto& s : x.maximal_simplices()) {
    json rec;
    rec["dim"] = s.dim();
    rec["vertices"] = std::vector<Vertex>(s.begin(), s.end());
    os << rec.dump() << '\n';
  }
}

/// Reads maximal simplices and closes them downward. n defaults to the
/// largest vertex + 1 and d to the largest dimension seen.
inline ComplexD read_complex(std::istream& is, std::optional<std::uint32_t> n = {}, std::optional<int> d = {}) {
  std::vector<Simplex> gens;
  std::string line;
  std::size_t lineno = 0;
  std::uint32_t max_v = 0;
  int max_d = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw config_error("line " + std::to_string(lineno) + ": " + e.what());
    }
    if (!rec.contains("vertices") || !rec["vertices"].is_array())
      throw config_error("line " + std::to_string(lineno) + ": missing \"vertices\" array");
    auto vs = rec["vertices"].get<std::vector<Vertex>>();
    Simplex s(vs);
    if (rec.contains("dim") && rec["dim"].get<int>() != s.dim())
      throw config_error("line " + std::to_string(lineno) + ": \"dim\" does not match the vertex count");
    max_v = std::max(max_v, s.back());
    max_d = std::max(max_d, s.dim());
    gens.push_back(s);
  }
  const std::uint32_t nn = n.value_or(gens.empty() ? 0 : max_v + 1);
  const int dd = d.value_or(max_d);
  if (!gens.empty() && max_v >= nn) throw config_error("vertex " + std::to_string(max_v) + " outside [n]");
  return ComplexD::from_simplices(nn, dd, gens);
}

inline ComplexD read_complex_file(const std::string& path, std::optional<std::uint32_t> n = {},
                                  std::optional<int> d = {}) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open " + path);
  return read_complex(in, n, d);
}

// ---------------------------------------------------------------------------
// Component reports

inline json report_json(const ComponentReport& rep, bool with_labels = false) {
  json j;
  j["n_components"] = rep.n_components();
  j["sizes"] = rep.sizes();
  j["s0_cmax"] = rep.s0_cmax();
  if (with_labels) j["labels"] = rep.labels;
  return j;
}

// ---------------------------------------------------------------------------
// Tables written as CSV (RFC 4180) or as JSON Lines with the same fields.

using Cell = std::variant<std::monostate, std::int64_t, double, std::string, bool>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw error("row has " + std::to_string(row.size()) + " cells, table has " +
                                                  std::to_string(columns.size()) + " columns");
    rows.push_back(std::move(row));
  }

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return i;
    throw error("no column " + name);
  }
};

enum class Format { csv, jsonl };

inline Format parse_format(const std::string& s) {
  if (s == "csv") return Format::csv;
  if (s == "jsonl") return Format::jsonl;
  throw config_error("unknown format '" + s + "' (expected csv or jsonl)");
}

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string cell_text(const Cell& c) {
  struct V {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(double v) const { return format_double(v); }
    std::string operator()(const std::string& v) const { return v; }
    std::string operator()(bool v) const { return v ? "true" : "false"; }
  };
  return std::visit(V{}, c);
}

inline json cell_json(const Cell& c) {
  struct V {
    json operator()(std::monostate) const { return nullptr; }
    json operator()(std::int64_t v) const { return v; }
    json operator()(double v) const {
      if (!std::isfinite(v)) return format_double(v);
      return v;
    }
    json operator()(const std::string& v) const { return v; }
    json operator()(bool v) const { return v; }
  };
  return std::visit(V{}, c);
}

inline void write_table(std::ostream& os, const Table& t, Format f) {
  if (f == Format::csv) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << csv_quote(t.columns[i]);
    os << "\r\n";
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_quote(cell_text(row[i]));
      os << "\r\n";
    }
    return;
  }
  for (const auto& row : t.rows) {
    json j = json::object();
    for (std::size_t i = 0; i < row.size(); ++i) j[t.columns[i]] = cell_json(row[i]);
    os << j.dump() << '\n';
  }
}

/// Splits one RFC 4180 record list into rows of fields.
inline std::vector<std::vector<std::string>> parse_csv(std::istream& is) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, any = false;
  char c;
  while (is.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (is.peek() == '"') {
          is.get(c);
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && is.peek() == '\n') is.get(c);
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
      any = false;
    } else {
      field += c;
    }
  }
  if (any) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Config files: a JSON object whose keys mirror the long CLI flag names.

inline json read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config " + path);
  try {
    auto j = json::parse(in);
    if (!j.is_object()) throw config_error("config " + path + " must be a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    throw config_error("config " + path + ": " + e.what());
  }
}

}  // namespace rsc::io
