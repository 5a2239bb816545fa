#pragma once

// Experiment configuration.
//
// Plain-text form, one setting per line:
//   # comment
//   [section]
//   key = value        # trailing comment
// Keys before the first section header belong to section "". The JSON form is
// an object whose members are either sections (objects) or top-level keys.
// Every key is checked against a schema; unknown keys are errors.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

namespace zoll {

/// Error carrying a "where: what" message (where = file:line:col when known).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ConfigEntry {
  std::string key;
  std::string value;
  std::string where;  ///< location of the value
};

struct ConfigSection {
  std::string name;
  std::string where;
  std::vector<ConfigEntry> entries;
};

struct ConfigFile {
  std::vector<ConfigSection> sections;

  [[nodiscard]] const ConfigSection* find(const std::string& name) const {
    for (const auto& s : sections) {
      if (s.name == name) return &s;
    }
    return nullptr;
  }
  ConfigSection& get_or_add(const std::string& name, const std::string& where) {
    for (auto& s : sections) {
      if (s.name == name) return s;
    }
    sections.push_back({name, where, {}});
    return sections.back();
  }
};

namespace detail {

inline std::string location(const std::string& file, std::size_t line, std::size_t col) {
  return file + ":" + std::to_string(line) + ":" + std::to_string(col);
}

inline bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
}

inline std::size_t skip_space(std::string_view s, std::size_t i) {
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
  return i;
}

inline std::string_view rtrim(std::string_view s) {
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline void add_entry(ConfigSection& sec, ConfigEntry e) {
  for (const auto& old : sec.entries) {
    if (old.key == e.key) {
      throw ConfigError(e.where + ": duplicate key '" + e.key + "' (first set at " + old.where + ")");
    }
  }
  sec.entries.push_back(std::move(e));
}

}  // namespace detail

inline ConfigFile parse_ini(const std::string& text, const std::string& file = "<config>") {
  ConfigFile cfg;
  ConfigSection* current = &cfg.get_or_add("", file);
  std::istringstream is(text);
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(is, raw)) {
    ++lineno;
    const std::string_view line(raw);
    std::size_t i = detail::skip_space(line, 0);
    if (i == line.size() || line[i] == '#' || line[i] == ';') continue;
    if (line[i] == '[') {
      const auto close = line.find(']', i);
      if (close == std::string_view::npos) {
        throw ConfigError(detail::location(file, lineno, i + 1) + ": unterminated section header");
      }
      const auto name = line.substr(i + 1, close - i - 1);
      if (!detail::is_identifier(name)) {
        throw ConfigError(detail::location(file, lineno, i + 2) + ": bad section name '" + std::string(name) + "'");
      }
      const std::size_t after = detail::skip_space(line, close + 1);
      if (after < line.size() && line[after] != '#' && line[after] != ';') {
        throw ConfigError(detail::location(file, lineno, after + 1) + ": unexpected text after section header");
      }
      if (cfg.find(std::string(name)) != nullptr && !std::string(name).empty()) {
        throw ConfigError(detail::location(file, lineno, i + 1) + ": section [" + std::string(name) + "] repeated");
      }
      current = &cfg.get_or_add(std::string(name), detail::location(file, lineno, i + 1));
      continue;
    }
    const auto eq = line.find('=', i);
    if (eq == std::string_view::npos) {
      throw ConfigError(detail::location(file, lineno, i + 1) + ": expected 'key = value'");
    }
    const auto key = detail::rtrim(line.substr(i, eq - i));
    if (!detail::is_identifier(key)) {
      throw ConfigError(detail::location(file, lineno, i + 1) + ": bad key '" + std::string(key) + "'");
    }
    const std::size_t v0 = detail::skip_space(line, eq + 1);
    auto value = line.substr(v0);
    const auto hash = value.find('#');
    if (hash != std::string_view::npos) value = value.substr(0, hash);
    value = detail::rtrim(value);
    if (value.empty()) {
      throw ConfigError(detail::location(file, lineno, v0 + 1) + ": missing value for '" + std::string(key) + "'");
    }
    detail::add_entry(*current, {std::string(key), std::string(value), detail::location(file, lineno, v0 + 1)});
  }
  return cfg;
}

namespace detail {

inline std::string json_scalar_text(const nlohmann::json& v, const std::string& where) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean() || v.is_number()) return v.dump();
  throw ConfigError(where + ": expected a scalar");
}

inline std::string json_value_text(const nlohmann::json& v, const std::string& where) {
  if (!v.is_array()) return json_scalar_text(v, where);
  std::string out;
  for (const auto& x : v) {
    if (!out.empty()) out += ',';
    out += json_scalar_text(x, where);
  }
  return out;
}

inline std::pair<std::size_t, std::size_t> line_col_of_byte(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace detail

inline ConfigFile parse_json_config(const std::string& text, const std::string& file = "<config>") {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, col] = detail::line_col_of_byte(text, e.byte);
    std::string what = e.what();
    const auto colon = what.find(": ");
    if (colon != std::string::npos) what = what.substr(colon + 2);
    throw ConfigError(detail::location(file, line, col) + ": " + what);
  }
  if (!j.is_object()) throw ConfigError(file + ": top level must be an object");
  ConfigFile cfg;
  cfg.get_or_add("", file);
  for (const auto& [name, v] : j.items()) {
    const std::string where = file + ": " + name;
    if (v.is_object()) {
      if (!detail::is_identifier(name)) throw ConfigError(where + ": bad section name");
      auto& sec = cfg.get_or_add(name, where);
      for (const auto& [key, x] : v.items()) {
        const std::string w = file + ": " + name + "." + key;
        if (!detail::is_identifier(key)) throw ConfigError(w + ": bad key");
        detail::add_entry(sec, {key, detail::json_value_text(x, w), w});
      }
    } else {
      if (!detail::is_identifier(name)) throw ConfigError(where + ": bad key");
      detail::add_entry(cfg.get_or_add("", file), {name, detail::json_value_text(v, where), where});
    }
  }
  return cfg;
}

/// JSON when the first non-blank character is '{', plain text otherwise.
inline ConfigFile parse_config(const std::string& text, const std::string& file = "<config>") {
  const auto i = text.find_first_not_of(" \t\r\n");
  if (i != std::string::npos && text[i] == '{') return parse_json_config(text, file);
  return parse_ini(text, file);
}

inline ConfigFile load_config(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError(path + ": cannot open");
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str(), path);
}

// ---------------------------------------------------------------------------
// Typed values

namespace detail {

inline std::string trim_copy(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    out.push_back(trim_copy(std::string_view(s).substr(start, comma == std::string::npos ? std::string::npos
                                                                                          : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace detail

inline std::optional<std::int64_t> parse_int(const std::string& s) {
  std::int64_t v = 0;
  const auto t = detail::trim_copy(s);
  const auto* end = t.data() + t.size();
  const auto r = std::from_chars(t.data(), end, v);
  if (t.empty() || r.ec != std::errc() || r.ptr != end) return std::nullopt;
  return v;
}

inline std::optional<double> parse_real(const std::string& s) {
  const auto t = detail::trim_copy(s);
  if (t.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

inline std::optional<bool> parse_bool(const std::string& s) {
  const auto t = detail::trim_copy(s);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  return std::nullopt;
}

/// Comma-separated integers. "a,b,...,z" continues the progression set by a
/// and b up to z: geometric when b/a is a whole ratio >= 2 that lands on z,
/// otherwise arithmetic with step b - a.
inline std::vector<std::int64_t> parse_int_list(const std::string& s) {
  const auto parts = detail::split_list(s);
  std::vector<std::int64_t> out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i] == "...") {
      if (out.size() < 2 || i + 1 != parts.size() - 1) {
        throw std::invalid_argument("'...' needs two values before it and exactly one after it");
      }
      const auto end = parse_int(parts[i + 1]);
      if (!end) throw std::invalid_argument("bad integer '" + parts[i + 1] + "'");
      const std::int64_t a = out[out.size() - 2], b = out.back();
      bool done = false;
      if (a > 0 && b > a && b % a == 0 && b / a >= 2) {
        const std::int64_t r = b / a;
        std::int64_t x = b;
        while (x < *end && x <= INT64_MAX / r) x *= r;
        if (x == *end) {
          for (x = b * r; x <= *end; x *= r) out.push_back(x);
          done = true;
        }
      }
      if (!done) {
        const std::int64_t d = b - a;
        if (d == 0 || (*end - b) % d != 0 || (*end - b) / d < 0) {
          throw std::invalid_argument("'" + s + "': the progression does not reach " + parts[i + 1]);
        }
        for (std::int64_t x = b + d; d > 0 ? x <= *end : x >= *end; x += d) out.push_back(x);
      }
      return out;
    }
    const auto v = parse_int(parts[i]);
    if (!v) throw std::invalid_argument("bad integer '" + parts[i] + "'");
    out.push_back(*v);
  }
  return out;
}

inline std::vector<double> parse_real_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& p : detail::split_list(s)) {
    const auto v = parse_real(p);
    if (!v) throw std::invalid_argument("bad number '" + p + "'");
    out.push_back(*v);
  }
  return out;
}

enum class ParamType { integer, real, boolean, text, int_list, real_list, text_list };

inline const char* describe(ParamType t) {
  switch (t) {
    case ParamType::integer: return "an integer";
    case ParamType::real: return "a finite number";
    case ParamType::boolean: return "true or false";
    case ParamType::text: return "text";
    case ParamType::int_list: return "a comma-separated integer list";
    case ParamType::real_list: return "a comma-separated number list";
    case ParamType::text_list: return "a comma-separated list";
  }
  return "?";
}

struct ParamSpec {
  std::string key;
  ParamType type;
  std::string default_value;
  std::string help;
};

/// Schema-checked settings for one experiment. Values are kept as canonical
/// text and converted on access.
class ParamSet {
 public:
  explicit ParamSet(std::vector<ParamSpec> schema) : schema_(std::move(schema)) {
    for (const auto& s : schema_) set(s.key, s.default_value, "default");
  }

  [[nodiscard]] const std::vector<ParamSpec>& schema() const { return schema_; }

  [[nodiscard]] bool known(const std::string& key) const { return spec(key) != nullptr; }

  /// Validates and stores; `where` prefixes any error.
  void set(const std::string& key, const std::string& value, const std::string& where) {
    const ParamSpec* s = spec(key);
    if (s == nullptr) throw ConfigError(where + ": unknown key '" + key + "'");
    try {
      check(*s, value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(where + ": '" + key + "' must be " + describe(s->type) + " (" + e.what() + ")");
    }
    values_[key] = {detail::trim_copy(value), where};
  }

  void apply(const ConfigSection& sec) {
    for (const auto& e : sec.entries) set(e.key, e.value, e.where);
  }

  [[nodiscard]] std::int64_t integer(const std::string& key) const { return *parse_int(raw(key)); }
  [[nodiscard]] double real(const std::string& key) const { return *parse_real(raw(key)); }
  [[nodiscard]] bool boolean(const std::string& key) const { return *parse_bool(raw(key)); }
  [[nodiscard]] std::string text(const std::string& key) const { return raw(key); }
  [[nodiscard]] std::vector<std::int64_t> int_list(const std::string& key) const {
    return parse_int_list(raw(key));
  }
  [[nodiscard]] std::vector<double> real_list(const std::string& key) const { return parse_real_list(raw(key)); }
  [[nodiscard]] std::vector<std::string> text_list(const std::string& key) const {
    const auto r = raw(key);
    return r.empty() ? std::vector<std::string>{} : detail::split_list(r);
  }
  [[nodiscard]] const std::string& where(const std::string& key) const { return entry(key).where; }

  /// (key, canonical text) in schema order.
  [[nodiscard]] std::vector<std::pair<std::string, std::string>> items() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& s : schema_) out.emplace_back(s.key, raw(s.key));
    return out;
  }

 private:
  struct Value {
    std::string text;
    std::string where;
  };

  [[nodiscard]] const ParamSpec* spec(const std::string& key) const {
    for (const auto& s : schema_) {
      if (s.key == key) return &s;
    }
    return nullptr;
  }
  [[nodiscard]] const Value& entry(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw std::logic_error("ParamSet: no key " + key);
    return it->second;
  }
  [[nodiscard]] const std::string& raw(const std::string& key) const { return entry(key).text; }

  static void check(const ParamSpec& s, const std::string& v) {
    switch (s.type) {
      case ParamType::integer:
        if (!parse_int(v)) throw std::invalid_argument("got '" + v + "'");
        break;
      case ParamType::real:
        if (!parse_real(v)) throw std::invalid_argument("got '" + v + "'");
        break;
      case ParamType::boolean:
        if (!parse_bool(v)) throw std::invalid_argument("got '" + v + "'");
        break;
      case ParamType::text:
      case ParamType::text_list:
        break;
      case ParamType::int_list:
        (void)parse_int_list(v);
        break;
      case ParamType::real_list:
        (void)parse_real_list(v);
        break;
    }
  }

  std::vector<ParamSpec> schema_;
  std::map<std::string, Value> values_;
};

}  // namespace zoll
