#pragma once

// Tabular data ingestion: CSV reading, schema inference, schema facts.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "draco/error.hpp"
#include "draco/facts.hpp"

namespace draco {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// RFC 4180: comma separated, double-quoted fields may contain commas, quotes
// (doubled) and line breaks. CRLF and LF line ends are both accepted.
inline Table parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false, field_started = false;
  std::size_t line = 1;
  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    if (!(record.size() == 1 && record[0].empty())) records.push_back(std::move(record));
    record.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    if (c == '"' && !field_started) {
      quoted = true;
      field_started = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
      // handled by the following '\n'
    } else if (c == '\n') {
      end_record();
      ++line;
    } else {
      if (c == '"') throw DataError("line " + std::to_string(line) + ": stray quote in unquoted field");
      field += c;
      field_started = true;
    }
  }
  if (quoted) throw DataError("unterminated quoted field");
  if (field_started || !record.empty()) end_record();

  if (records.empty()) throw DataError("empty CSV: a header row is required");
  Table t;
  t.header = std::move(records.front());
  std::set<std::string> seen;
  for (const auto& h : t.header) {
    if (!seen.insert(h).second) throw DataError("duplicate column '" + h + "'");
  }
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != t.header.size()) {
      throw DataError("row " + std::to_string(r) + " has " + std::to_string(records[r].size()) + " fields, expected " +
                      std::to_string(t.header.size()));
    }
    t.rows.push_back(std::move(records[r]));
  }
  return t;
}

enum class FieldType { number, string, boolean, datetime };

inline std::string type_name(FieldType t) {
  switch (t) {
    case FieldType::number: return "number";
    case FieldType::string: return "string";
    case FieldType::boolean: return "boolean";
    case FieldType::datetime: return "datetime";
  }
  return "";
}

inline FieldType parse_type_name(const std::string& s) {
  for (auto t : {FieldType::number, FieldType::string, FieldType::boolean, FieldType::datetime}) {
    if (type_name(t) == s) return t;
  }
  throw DataError("unknown field type '" + s + "'");
}

struct FieldSchema {
  std::string name;
  FieldType type = FieldType::string;
  std::int64_t unique = 0;
  std::optional<std::int64_t> min, max, std;  // number fields only
  std::int64_t freq_most_common = 0;

  bool operator==(const FieldSchema&) const = default;
};

struct DataSchema {
  std::int64_t number_rows = 0;
  std::vector<FieldSchema> fields;

  bool operator==(const DataSchema&) const = default;
};

namespace detail {

inline bool is_boolean(std::string_view s) {
  std::string l(s);
  std::transform(l.begin(), l.end(), l.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return l == "true" || l == "false";
}

inline std::optional<double> as_number(std::string_view s) {
  if (s.empty()) return std::nullopt;
  std::size_t i = 0;
  if (s[i] == '+' || s[i] == '-') ++i;
  std::size_t digits = 0, frac = 0;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i, ++digits;
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i, ++frac;
  }
  if (digits + frac == 0) return std::nullopt;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
    std::size_t exp = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i, ++exp;
    if (exp == 0) return std::nullopt;
  }
  if (i != s.size()) return std::nullopt;
  return std::stod(std::string(s));
}

inline bool digits_at(std::string_view s, std::size_t pos, std::size_t n) {
  if (pos + n > s.size()) return false;
  for (std::size_t i = pos; i < pos + n; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

// YYYY-MM-DD, optionally followed by T or space, HH:MM, optional :SS and
// fraction, optional Z or +HH:MM.
inline bool is_iso_datetime(std::string_view s) {
  if (!digits_at(s, 0, 4) || s.size() < 10 || s[4] != '-' || !digits_at(s, 5, 2) || s[7] != '-' || !digits_at(s, 8, 2)) {
    return false;
  }
  int month = std::stoi(std::string(s.substr(5, 2)));
  int day = std::stoi(std::string(s.substr(8, 2)));
  if (month < 1 || month > 12 || day < 1 || day > 31) return false;
  if (s.size() == 10) return true;
  if (s[10] != 'T' && s[10] != ' ') return false;
  if (!digits_at(s, 11, 2) || s.size() < 16 || s[13] != ':' || !digits_at(s, 14, 2)) return false;
  std::size_t i = 16;
  if (i < s.size() && s[i] == ':') {
    if (!digits_at(s, i + 1, 2)) return false;
    i += 3;
    if (i < s.size() && s[i] == '.') {
      ++i;
      std::size_t start = i;
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      if (i == start) return false;
    }
  }
  if (i == s.size()) return true;
  if (s[i] == 'Z') return i + 1 == s.size();
  if (s[i] == '+' || s[i] == '-') return digits_at(s, i + 1, 2) && s.size() == i + 6 && s[i + 3] == ':' && digits_at(s, i + 4, 2);
  return false;
}

// Round half away from zero, so 2.5 -> 3 and -2.5 -> -3.
inline std::int64_t round_half_up(double x) { return static_cast<std::int64_t>(std::llround(x)); }

}  // namespace detail

// Empty cells are missing values: skipped for typing and statistics.
inline FieldSchema infer_field(const std::string& name, const std::vector<std::string>& values) {
  FieldSchema f;
  f.name = name;
  std::vector<std::string_view> present;
  for (const auto& v : values) {
    if (!v.empty()) present.push_back(v);
  }
  auto all = [&](auto pred) { return !present.empty() && std::all_of(present.begin(), present.end(), pred); };
  if (all([](std::string_view v) { return detail::is_boolean(v); })) {
    f.type = FieldType::boolean;
  } else if (all([](std::string_view v) { return detail::as_number(v).has_value(); })) {
    f.type = FieldType::number;
  } else if (all([](std::string_view v) { return detail::is_iso_datetime(v); })) {
    f.type = FieldType::datetime;
  } else {
    f.type = FieldType::string;
  }

  std::map<std::string, std::int64_t> freq;
  for (auto v : present) {
    std::string key(v);
    if (f.type == FieldType::boolean) {
      std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    } else if (f.type == FieldType::number) {
      key = std::to_string(*detail::as_number(v));
    }
    ++freq[key];
  }
  f.unique = static_cast<std::int64_t>(freq.size());
  for (const auto& [k, n] : freq) f.freq_most_common = std::max(f.freq_most_common, n);

  if (f.type == FieldType::number) {
    double lo = 0, hi = 0, sum = 0;
    std::vector<double> xs;
    for (auto v : present) xs.push_back(*detail::as_number(v));
    lo = *std::min_element(xs.begin(), xs.end());
    hi = *std::max_element(xs.begin(), xs.end());
    for (double x : xs) sum += x;
    double mean = sum / static_cast<double>(xs.size());
    double ss = 0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    f.min = detail::round_half_up(lo);
    f.max = detail::round_half_up(hi);
    f.std = detail::round_half_up(std::sqrt(ss / static_cast<double>(xs.size())));
  }
  return f;
}

inline DataSchema infer_schema(const Table& table) {
  DataSchema s;
  s.number_rows = static_cast<std::int64_t>(table.rows.size());
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    std::vector<std::string> column;
    column.reserve(table.rows.size());
    for (const auto& r : table.rows) column.push_back(r[c]);
    s.fields.push_back(infer_field(table.header[c], column));
  }
  return s;
}

inline DataSchema infer_schema(std::string_view csv) { return infer_schema(parse_csv(csv)); }

// number_rows on the root, then per field an entity with name, type, unique,
// and min/max/std for numbers.
inline Facts schema_to_facts(const DataSchema& schema) {
  Facts out;
  out.push_back(Fact::attribute({"", "number_rows"}, root_id(), schema.number_rows));
  for (std::size_t i = 0; i < schema.fields.size(); ++i) {
    const auto& f = schema.fields[i];
    EntityId id = Symbol{"f" + std::to_string(i)};
    out.push_back(Fact::entity("field", root_id(), id));
    out.push_back(Fact::attribute({"field", "name"}, id, f.name));
    out.push_back(Fact::attribute({"field", "type"}, id, Symbol{type_name(f.type)}));
    out.push_back(Fact::attribute({"field", "unique"}, id, f.unique));
    if (f.min) out.push_back(Fact::attribute({"field", "min"}, id, *f.min));
    if (f.max) out.push_back(Fact::attribute({"field", "max"}, id, *f.max));
    if (f.std) out.push_back(Fact::attribute({"field", "std"}, id, *f.std));
  }
  return out;
}

inline nlohmann::json schema_to_json(const DataSchema& s) {
  nlohmann::json fields = nlohmann::json::array();
  for (const auto& f : s.fields) {
    nlohmann::json j{{"name", f.name}, {"type", type_name(f.type)}, {"unique", f.unique}, {"freq_most_common", f.freq_most_common}};
    if (f.min) j["min"] = *f.min;
    if (f.max) j["max"] = *f.max;
    if (f.std) j["std"] = *f.std;
    fields.push_back(std::move(j));
  }
  return nlohmann::json{{"number_rows", s.number_rows}, {"fields", fields}};
}

inline DataSchema schema_from_json(const nlohmann::json& j) {
  try {
    DataSchema s;
    s.number_rows = j.at("number_rows").get<std::int64_t>();
    std::set<std::string> names;
    for (const auto& f : j.at("fields")) {
      FieldSchema fs;
      fs.name = f.at("name").get<std::string>();
      if (!names.insert(fs.name).second) throw DataError("duplicate field '" + fs.name + "'");
      fs.type = parse_type_name(f.at("type").get<std::string>());
      fs.unique = f.at("unique").get<std::int64_t>();
      fs.freq_most_common = f.value("freq_most_common", std::int64_t{0});
      if (f.contains("min")) fs.min = f["min"].get<std::int64_t>();
      if (f.contains("max")) fs.max = f["max"].get<std::int64_t>();
      if (f.contains("std")) fs.std = f["std"].get<std::int64_t>();
      s.fields.push_back(std::move(fs));
    }
    if (s.number_rows < 0) throw DataError("number_rows must not be negative");
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed schema: ") + e.what());
  }
}

}  // namespace draco
