#pragma once

// Minimal TOML subset used by the CLI: top-level key/value pairs, [tables],
// [[arrays of tables]], strings, numbers, booleans, flat arrays, comments.
// Nothing here aims at full TOML; anything outside the subset is rejected
// loudly rather than misread silently.

#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "io_util.hpp"

namespace skna::toml {

struct Value {
  std::variant<std::string, double, bool, std::vector<Value>> data;

  bool is_string() const { return std::holds_alternative<std::string>(data); }
  bool is_number() const { return std::holds_alternative<double>(data); }
  bool is_bool() const { return std::holds_alternative<bool>(data); }
  bool is_array() const { return std::holds_alternative<std::vector<Value>>(data); }

  const std::string& as_string() const {
    if (!is_string()) throw FormatError("toml: expected a string value");
    return std::get<std::string>(data);
  }
  double as_number() const {
    if (!is_number()) throw FormatError("toml: expected a numeric value");
    return std::get<double>(data);
  }
  bool as_bool() const {
    if (!is_bool()) throw FormatError("toml: expected a boolean value");
    return std::get<bool>(data);
  }
  const std::vector<Value>& as_array() const {
    if (!is_array()) throw FormatError("toml: expected an array value");
    return std::get<std::vector<Value>>(data);
  }
};

using Table = std::map<std::string, Value>;

struct Document {
  Table root;                                        // keys are "key" or "section.key"
  std::map<std::string, std::vector<Table>> arrays;  // [[name]] entries in file order

  bool has(const std::string& key) const { return root.count(key) != 0; }

  double number_or(const std::string& key, double fallback) const {
    auto it = root.find(key);
    return it == root.end() ? fallback : it->second.as_number();
  }
  bool bool_or(const std::string& key, bool fallback) const {
    auto it = root.find(key);
    return it == root.end() ? fallback : it->second.as_bool();
  }
  std::string string_or(const std::string& key, const std::string& fallback) const {
    auto it = root.find(key);
    return it == root.end() ? fallback : it->second.as_string();
  }
};

namespace toml_detail {

inline bool is_bare_key_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
         c == '_' || c == '-';
}

// Strips a trailing comment, honoring quoted strings.
inline std::string_view strip_comment(std::string_view line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

inline Value parse_value(std::string_view text, int line_no);

inline std::vector<Value> parse_array(std::string_view inner, int line_no) {
  std::vector<Value> out;
  std::size_t pos = 0;
  while (pos < inner.size()) {
    // find the next comma at depth 0, outside strings
    int depth = 0;
    bool in_string = false;
    std::size_t end = pos;
    for (; end < inner.size(); ++end) {
      const char c = inner[end];
      if (c == '"') in_string = !in_string;
      if (in_string) continue;
      if (c == '[') ++depth;
      if (c == ']') --depth;
      if (c == ',' && depth == 0) break;
    }
    auto item = trim_view(inner.substr(pos, end - pos));
    if (!item.empty()) out.push_back(parse_value(item, line_no));
    pos = end + 1;
  }
  return out;
}

inline Value parse_value(std::string_view text, int line_no) {
  const std::string where = " on line " + std::to_string(line_no);
  if (text.empty()) throw FormatError("toml: missing value" + where);
  if (text.front() == '"') {
    if (text.size() < 2 || text.back() != '"') {
      throw FormatError("toml: unterminated string" + where);
    }
    std::string s;
    for (std::size_t i = 1; i + 1 < text.size(); ++i) {
      char c = text[i];
      if (c == '\\') {
        if (i + 2 >= text.size()) throw FormatError("toml: bad escape" + where);
        const char e = text[++i];
        switch (e) {
          case 'n': c = '\n'; break;
          case 't': c = '\t'; break;
          case '"': c = '"'; break;
          case '\\': c = '\\'; break;
          default: throw FormatError("toml: unsupported escape" + where);
        }
      } else if (c == '"') {
        throw FormatError("toml: stray quote inside string" + where);
      }
      s.push_back(c);
    }
    return Value{s};
  }
  if (text == "true") return Value{true};
  if (text == "false") return Value{false};
  if (text.front() == '[') {
    if (text.back() != ']') throw FormatError("toml: unterminated array" + where);
    return Value{parse_array(text.substr(1, text.size() - 2), line_no)};
  }
  try {
    return Value{parse_double_strict(text, "toml value")};
  } catch (const Error&) {
    throw FormatError("toml: unrecognized value '" + std::string(text) + "'" + where);
  }
}

}  // namespace toml_detail

inline Document parse(std::string_view text) {
  Document doc;
  std::string section;      // current [section] prefix (empty at top level)
  Table* array_entry = nullptr;  // current [[name]] entry, if any

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view raw = text.substr(pos, eol == std::string_view::npos ? text.size() - pos
                                                                          : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    auto line = trim_view(toml_detail::strip_comment(raw));
    if (line.empty()) continue;

    const std::string where = " on line " + std::to_string(line_no);
    if (line.front() == '[') {
      const bool is_array = line.size() > 1 && line[1] == '[';
      const std::string_view close = is_array ? "]]" : "]";
      if (line.substr(line.size() - close.size()) != close) {
        throw FormatError("toml: unterminated table header" + where);
      }
      auto name = trim_view(line.substr(is_array ? 2 : 1,
                                        line.size() - 2 * (is_array ? 2 : 1)));
      if (name.empty()) throw FormatError("toml: empty table name" + where);
      for (char c : name) {
        if (!toml_detail::is_bare_key_char(c) && c != '.') {
          throw FormatError("toml: invalid table name" + where);
        }
      }
      if (is_array) {
        doc.arrays[std::string(name)].emplace_back();
        array_entry = &doc.arrays[std::string(name)].back();
        section.clear();
      } else {
        section = std::string(name);
        array_entry = nullptr;
      }
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw FormatError("toml: expected 'key = value'" + where);
    }
    auto key = trim_view(line.substr(0, eq));
    if (key.empty()) throw FormatError("toml: empty key" + where);
    for (char c : key) {
      if (!toml_detail::is_bare_key_char(c)) {
        throw FormatError("toml: invalid key '" + std::string(key) + "'" + where);
      }
    }
    Value value = toml_detail::parse_value(trim_view(line.substr(eq + 1)), line_no);
    if (array_entry != nullptr) {
      if (!array_entry->emplace(std::string(key), std::move(value)).second) {
        throw FormatError("toml: duplicate key '" + std::string(key) + "'" + where);
      }
    } else {
      std::string full = section.empty() ? std::string(key) : section + "." + std::string(key);
      if (!doc.root.emplace(std::move(full), std::move(value)).second) {
        throw FormatError("toml: duplicate key '" + std::string(key) + "'" + where);
      }
    }
  }
  return doc;
}

inline Document parse_file(const std::string& path) { return parse(read_text_file(path)); }

}  // namespace skna::toml
