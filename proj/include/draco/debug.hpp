#pragma once

// Which soft constraints fire, how often, on a collection of charts.

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "draco/render.hpp"
#include "draco/solver.hpp"

namespace draco {

struct LabeledSpec {
  std::string label;
  Facts facts;
};

// Rows are specs, columns are every soft constraint of the KB.
struct DebugMatrix {
  std::vector<std::string> spec_labels;
  std::vector<std::string> constraint_names;
  std::vector<std::vector<std::int64_t>> counts;
  std::vector<std::int64_t> weights;
  std::vector<std::int64_t> costs;
  std::vector<std::pair<std::string, std::string>> rejected;  // label, reason

  bool operator==(const DebugMatrix&) const = default;
};

// Incomplete or hard-violating specs are left out and listed in `rejected`.
inline DebugMatrix build_matrix(const KnowledgeBase& kb, const std::vector<LabeledSpec>& specs) {
  DebugMatrix m;
  for (const auto& n : kb.soft_names()) {
    if (n.empty()) continue;  // helper rules without a header
    m.constraint_names.push_back(n);
    auto w = kb.weights.find(n);
    m.weights.push_back(w == kb.weights.end() ? 0 : w->second);
  }
  detail::Checker checker(kb, {});
  for (const auto& s : specs) {
    Assessment a = detail::assess_with(checker, s.facts);
    if (!a.missing.empty()) {
      m.rejected.emplace_back(s.label, "missing " + a.missing.front());
      continue;
    }
    if (!a.hard.empty()) {
      std::string reason = "violates";
      for (const auto& h : a.hard) reason += " " + h;
      m.rejected.emplace_back(s.label, reason);
      continue;
    }
    std::vector<std::int64_t> row;
    for (const auto& n : m.constraint_names) row.push_back(a.soft.at(n));
    m.spec_labels.push_back(s.label);
    m.counts.push_back(std::move(row));
    m.costs.push_back(a.cost);
  }
  return m;
}

// Soft constraints no spec in the matrix violates.
inline std::vector<std::string> unactivated(const DebugMatrix& m) {
  std::vector<std::string> out;
  for (std::size_t j = 0; j < m.constraint_names.size(); ++j) {
    bool any = std::any_of(m.counts.begin(), m.counts.end(), [&](const auto& row) { return row[j] != 0; });
    if (!any) out.push_back(m.constraint_names[j]);
  }
  return out;
}

enum class ChartSize { small, medium, large };

inline ChartSize parse_chart_size(const std::string& s) {
  if (s == "small") return ChartSize::small;
  if (s == "medium") return ChartSize::medium;
  if (s == "large") return ChartSize::large;
  throw Error("unknown chart size '" + s + "', expected small, medium or large");
}

// Weights as a bar chart next to a heatmap of violation counts. Constraints
// run down a shared y axis, heaviest first.
inline nlohmann::json emit_debug_chart(const DebugMatrix& m, ChartSize size = ChartSize::medium) {
  if (m.spec_labels.empty() || m.constraint_names.empty()) throw Error("cannot chart an empty violation matrix");
  int step = size == ChartSize::small ? 12 : size == ChartSize::medium ? 16 : 22;
  int bar_width = size == ChartSize::small ? 120 : size == ChartSize::medium ? 180 : 260;

  std::vector<std::size_t> order(m.constraint_names.size());
  for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (m.weights[a] != m.weights[b]) return m.weights[a] > m.weights[b];
    return m.constraint_names[a] < m.constraint_names[b];
  });
  nlohmann::json sort = nlohmann::json::array();
  for (auto j : order) sort.push_back(m.constraint_names[j]);

  nlohmann::json weights = nlohmann::json::array();
  nlohmann::json cells = nlohmann::json::array();
  for (auto j : order) {
    weights.push_back({{"constraint", m.constraint_names[j]}, {"weight", m.weights[j]}});
    for (std::size_t i = 0; i < m.spec_labels.size(); ++i) {
      cells.push_back({{"constraint", m.constraint_names[j]}, {"spec", m.spec_labels[i]}, {"count", m.counts[i][j]}});
    }
  }
  nlohmann::json y{{"field", "constraint"}, {"type", "nominal"}, {"sort", sort}, {"title", "constraint"}};
  nlohmann::json bars{
      {"data", {{"values", weights}}},
      {"mark", "bar"},
      {"width", bar_width},
      {"height", nlohmann::json{{"step", step}}},
      {"encoding", {{"y", y}, {"x", {{"field", "weight"}, {"type", "quantitative"}, {"title", "weight"}}}}},
  };
  nlohmann::json spec_sort = m.spec_labels;
  nlohmann::json heat{
      {"data", {{"values", cells}}},
      {"mark", "rect"},
      {"width", nlohmann::json{{"step", step}}},
      {"height", nlohmann::json{{"step", step}}},
      {"encoding",
       {{"y", y},
        {"x", {{"field", "spec"}, {"type", "nominal"}, {"sort", spec_sort}, {"title", "spec"}}},
        {"color", {{"field", "count"}, {"type", "quantitative"}, {"title", "violations"}}}}},
  };
  return nlohmann::json{
      {"$schema", kVegaLiteSchema},
      {"hconcat", {bars, heat}},
      {"resolve", {{"scale", {{"y", "shared"}}}}},
  };
}

namespace detail {

inline std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace detail

// Specs as rows, constraints as columns, total cost last.
inline std::string matrix_to_csv(const DebugMatrix& m) {
  std::string out = "spec";
  for (const auto& n : m.constraint_names) out += "," + detail::csv_cell(n);
  out += ",cost\n";
  for (std::size_t i = 0; i < m.spec_labels.size(); ++i) {
    out += detail::csv_cell(m.spec_labels[i]);
    for (auto c : m.counts[i]) out += "," + std::to_string(c);
    out += "," + std::to_string(m.costs[i]) + "\n";
  }
  return out;
}

inline nlohmann::json matrix_to_json(const DebugMatrix& m) {
  nlohmann::json rejected = nlohmann::json::array();
  for (const auto& [label, reason] : m.rejected) rejected.push_back({{"spec", label}, {"reason", reason}});
  return nlohmann::json{
      {"specs", m.spec_labels}, {"constraints", m.constraint_names}, {"weights", m.weights},
      {"counts", m.counts},     {"costs", m.costs},                  {"rejected", rejected},
  };
}

}  // namespace draco
