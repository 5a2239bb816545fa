#pragma once

// Experiment reports: CSV (schema=1), a JSON mirror, and a run manifest.
//
// CSV layout, one record per line:
//   schema=1
//   experiment,<id>
//   tag,<tag>
//   param,<key>,<value>            (zero or more)
//   columns,tag,<name>,...         (row header)
//   row,<tag>,<value>,...          (zero or more)
//   footer,<key>,<value>           (slope, constant, ...)
//   check,<name>,<value>,<relation>,<limit>,<pass|fail>
//   note,<text>
// Numbers are written with 17 significant digits so files round-trip and
// compare bytewise across runs.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace zoll {

inline constexpr const char* kToolVersion = "0.1.0";

struct Check {
  std::string name;
  double value = 0.0;
  std::string relation;  ///< "<=", "<", ">=" or "=="
  double limit = 0.0;
  bool pass = false;
};

inline Check make_check(std::string name, double value, std::string relation, double limit) {
  bool ok = false;
  if (relation == "<=") ok = value <= limit;
  else if (relation == "<") ok = value < limit;
  else if (relation == ">=") ok = value >= limit;
  else if (relation == "==") ok = value == limit;
  else throw std::invalid_argument("make_check: unknown relation " + relation);
  return {std::move(name), value, std::move(relation), limit, ok};
}

struct ReportRow {
  std::string tag;
  std::vector<double> values;
};

struct Report {
  std::string id;
  std::string tag;
  std::vector<std::pair<std::string, std::string>> params;
  std::vector<std::string> columns;
  std::vector<ReportRow> rows;
  std::vector<std::pair<std::string, double>> footer;
  std::vector<Check> checks;
  std::vector<std::string> notes;

  void add_row(std::string row_tag, std::vector<double> values) {
    if (values.size() != columns.size()) throw std::logic_error("Report: row width differs from columns");
    rows.push_back({std::move(row_tag), std::move(values)});
  }
  void param(std::string key, std::string value) { params.emplace_back(std::move(key), std::move(value)); }
  void param(std::string key, double value);
  [[nodiscard]] bool pass() const {
    for (const auto& c : checks) {
      if (!c.pass) return false;
    }
    return true;
  }
  [[nodiscard]] const Check* find_check(const std::string& name) const {
    for (const auto& c : checks) {
      if (c.name == name) return &c;
    }
    return nullptr;
  }
  [[nodiscard]] double footer_value(const std::string& key) const {
    for (const auto& [k, v] : footer) {
      if (k == key) return v;
    }
    throw std::out_of_range("Report: no footer entry " + key);
  }
};

inline std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void Report::param(std::string key, double value) { param(std::move(key), format_number(value)); }

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

inline std::string to_csv(const Report& r) {
  std::ostringstream os;
  os << "schema=1\n";
  os << "experiment," << csv_field(r.id) << '\n';
  os << "tag," << csv_field(r.tag) << '\n';
  for (const auto& [k, v] : r.params) os << "param," << csv_field(k) << ',' << csv_field(v) << '\n';
  os << "columns,tag";
  for (const auto& c : r.columns) os << ',' << csv_field(c);
  os << '\n';
  for (const auto& row : r.rows) {
    os << "row," << csv_field(row.tag);
    for (double v : row.values) os << ',' << format_number(v);
    os << '\n';
  }
  for (const auto& [k, v] : r.footer) os << "footer," << csv_field(k) << ',' << format_number(v) << '\n';
  for (const auto& c : r.checks) {
    os << "check," << csv_field(c.name) << ',' << format_number(c.value) << ',' << c.relation << ','
       << format_number(c.limit) << ',' << (c.pass ? "pass" : "fail") << '\n';
  }
  for (const auto& n : r.notes) os << "note," << csv_field(n) << '\n';
  return os.str();
}

// Non-finite numbers become strings in JSON.
inline nlohmann::json json_number(double x) {
  if (std::isfinite(x)) return x;
  return format_number(x);
}

inline nlohmann::json to_json(const Report& r) {
  nlohmann::json j;
  j["schema"] = 1;
  j["experiment"] = r.id;
  j["tag"] = r.tag;
  j["params"] = nlohmann::json::object();
  for (const auto& [k, v] : r.params) j["params"][k] = v;
  j["columns"] = r.columns;
  j["rows"] = nlohmann::json::array();
  for (const auto& row : r.rows) {
    nlohmann::json values = nlohmann::json::array();
    for (double v : row.values) values.push_back(json_number(v));
    j["rows"].push_back({{"tag", row.tag}, {"values", values}});
  }
  j["footer"] = nlohmann::json::object();
  for (const auto& [k, v] : r.footer) j["footer"][k] = json_number(v);
  j["checks"] = nlohmann::json::array();
  for (const auto& c : r.checks) {
    j["checks"].push_back({{"name", c.name},
                           {"value", json_number(c.value)},
                           {"relation", c.relation},
                           {"limit", json_number(c.limit)},
                           {"pass", c.pass}});
  }
  j["notes"] = r.notes;
  j["pass"] = r.pass();
  return j;
}

inline void write_text_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + p.string() + " for writing");
  os << text;
  if (!os) throw std::runtime_error("write failed: " + p.string());
}

/// Writes <dir>/<stem>.csv and <dir>/<stem>.json; returns both paths.
inline std::vector<std::filesystem::path> write_report(const std::filesystem::path& dir, const std::string& stem,
                                                       const Report& r) {
  std::filesystem::create_directories(dir);
  const auto csv = dir / (stem + ".csv");
  const auto json = dir / (stem + ".json");
  write_text_file(csv, to_csv(r));
  write_text_file(json, to_json(r).dump(2) + "\n");
  return {csv, json};
}

inline std::string utc_timestamp(std::chrono::system_clock::time_point tp) {
  const std::time_t t = std::chrono::system_clock::to_time_t(tp);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Manifest {
  std::string id;
  std::string tag;
  std::vector<std::pair<std::string, std::string>> params;
  std::uint64_t seed = 0;
  std::string started;
  std::string finished;
  double wall_seconds = 0.0;
  std::vector<std::string> outputs;
  int exit_status = 0;
};

inline nlohmann::json to_json(const Manifest& m) {
  nlohmann::json j;
  j["schema"] = 1;
  j["experiment"] = m.id;
  j["tag"] = m.tag;
  j["params"] = nlohmann::json::object();
  for (const auto& [k, v] : m.params) j["params"][k] = v;
  j["seed"] = m.seed;
  j["version"] = kToolVersion;
  j["started"] = m.started;
  j["finished"] = m.finished;
  j["wall_seconds"] = m.wall_seconds;
  j["outputs"] = m.outputs;
  j["exit_status"] = m.exit_status;
  return j;
}

}  // namespace zoll
