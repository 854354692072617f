#pragma once

// Glue shared by the command line tool and the HTTP service: reading specs in
// either form, attaching a data schema, and the JSON shape of results.

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "draco/data.hpp"
#include "draco/debug.hpp"
#include "draco/facts.hpp"
#include "draco/kb.hpp"
#include "draco/render.hpp"
#include "draco/solver.hpp"

namespace draco {

// Fact text when `fact_text`, otherwise nested JSON.
inline ChartSpec read_spec(std::string_view text, bool fact_text) {
  if (fact_text) return nest_facts(parse_facts(text));
  return parse_spec(text);
}

inline nlohmann::json parse_json_text(std::string_view text, const std::string& what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ModelError(what + ": malformed JSON: " + e.what());
  }
}

// Puts the schema's fields and row count on the spec. A spec that already
// describes fields keeps them only when no schema is given.
inline ChartSpec with_schema(ChartSpec spec, const DataSchema& schema) {
  if (spec.children.count("field")) throw ModelError("the spec already has fields; drop them or the schema");
  ChartSpec data = nest_facts(schema_to_facts(schema));
  spec.children["field"] = data.children["field"];
  if (!spec.attributes.count("number_rows")) spec.attributes["number_rows"] = data.attributes.at("number_rows");
  return spec;
}

// Soft counts worth showing: the nonzero ones.
inline nlohmann::json violations_to_json(const Violations& v) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [name, n] : v) {
    if (n != 0) j[name] = n;
  }
  return j;
}

inline nlohmann::json model_to_json(const CandidateModel& m) {
  return nlohmann::json{
      {"spec", spec_to_json(nest_facts(m.facts))}, {"cost", m.cost}, {"violations", violations_to_json(m.violations)}};
}

inline nlohmann::json models_to_json(const std::vector<CandidateModel>& models) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& m : models) arr.push_back(model_to_json(m));
  return arr;
}

// The solver fills marks but never invents views, so a spec without any gets
// one view holding one empty mark.
inline Query make_query(ChartSpec partial, std::string_view hints, std::size_t k) {
  if (!partial.children.count("view")) {
    ChartSpec view;
    view.children["mark"].push_back(ChartSpec{});
    partial.children["view"].push_back(view);
  }
  Query q;
  q.base = flatten_spec(partial);
  if (!hints.empty()) q.extra_rules = asp::parse_program(hints);
  q.k = k;
  return q;
}

inline nlohmann::json debug_to_json(const DebugMatrix& m, ChartSize size = ChartSize::medium) {
  nlohmann::json out{{"matrix", matrix_to_json(m)}, {"unactivated", unactivated(m)}};
  out["chart"] = m.spec_labels.empty() ? nlohmann::json(nullptr) : emit_debug_chart(m, size);
  return out;
}

}  // namespace draco
