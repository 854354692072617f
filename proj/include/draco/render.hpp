#pragma once

// Vega-Lite output for complete chart specifications.
//
// One view with one mark is a unit spec, several marks in a view become a
// layer, several views are stacked vertically. Task and data statistics do
// not show up in the output.

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "draco/data.hpp"
#include "draco/error.hpp"
#include "draco/facts.hpp"

namespace draco {

inline constexpr const char* kVegaLiteSchema = "https://vega.github.io/schema/vega-lite/v5.json";
inline constexpr const char* kDataName = "data";

// quantitative, temporal, ordinal or nominal.
inline std::string infer_encoding_type(const std::string& field_type, const std::string& scale_type) {
  if (scale_type == "ordinal") return "ordinal";
  if (scale_type == "categorical") return "nominal";
  if (scale_type == "linear" || scale_type == "log") {
    if (field_type == "number") return "quantitative";
    if (field_type == "datetime" && scale_type == "linear") return "temporal";
    throw RenderError("a " + field_type + " field cannot use a " + scale_type + " scale");
  }
  throw RenderError("unknown scale type '" + scale_type + "'");
}

namespace detail {

// Attributes the renderer understands, per entity kind ("" is the root).
inline const std::map<std::string, std::set<std::string>>& known_attributes() {
  static const std::map<std::string, std::set<std::string>> known{
      {"", {"number_rows", "task"}},
      {"field", {"name", "type", "unique", "min", "max", "std", "freq_most_common"}},
      {"view", {"coordinates"}},
      {"mark", {"type"}},
      {"encoding", {"channel", "field", "aggregate", "binning", "stack"}},
      {"scale", {"channel", "type"}},
      {"facet", {"channel", "field"}},
      {"task", {"type"}},
  };
  return known;
}

inline void check_known(const ChartSpec& node, const std::string& kind, const std::string& where,
                        std::vector<std::string>& unknown) {
  const auto& known = known_attributes();
  auto it = known.find(kind);
  if (it == known.end()) {
    unknown.push_back(where);
    return;
  }
  for (const auto& [attr, value] : node.attributes) {
    if (!it->second.count(attr)) unknown.push_back(where + "." + attr);
  }
  for (const auto& [child_kind, list] : node.children) {
    for (std::size_t i = 0; i < list.size(); ++i) {
      check_known(list[i], child_kind, (where.empty() ? "" : where + ".") + child_kind + "[" + std::to_string(i) + "]",
                  unknown);
    }
  }
}

// Attribute as text; nullopt when absent or `none`.
inline std::optional<std::string> text_of(const ChartSpec& node, const std::string& attr) {
  auto it = node.attributes.find(attr);
  if (it == node.attributes.end()) return std::nullopt;
  if (const auto* s = std::get_if<Symbol>(&it->second)) {
    if (s->name == "none") return std::nullopt;
    return s->name;
  }
  if (const auto* s = std::get_if<std::string>(&it->second)) return *s;
  return std::to_string(std::get<std::int64_t>(it->second));
}

inline std::string required_text(const ChartSpec& node, const std::string& attr, const std::string& where) {
  auto v = text_of(node, attr);
  if (!v) throw RenderError("incomplete spec: " + where + " has no " + attr);
  return *v;
}

inline const std::vector<ChartSpec>& children_of(const ChartSpec& node, const std::string& kind) {
  static const std::vector<ChartSpec> empty;
  auto it = node.children.find(kind);
  return it == node.children.end() ? empty : it->second;
}

inline nlohmann::json data_values(const Table& table) {
  DataSchema schema = infer_schema(table);
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : table.rows) {
    nlohmann::json row = nlohmann::json::object();
    for (std::size_t c = 0; c < table.header.size(); ++c) {
      const std::string& cell = r[c];
      if (cell.empty()) {
        row[table.header[c]] = nullptr;
        continue;
      }
      switch (schema.fields[c].type) {
        case FieldType::number: {
          double x = std::stod(cell);
          auto i = static_cast<std::int64_t>(x);
          if (static_cast<double>(i) == x && cell.find_first_of(".eE") == std::string::npos) {
            row[table.header[c]] = i;
          } else {
            row[table.header[c]] = x;
          }
          break;
        }
        case FieldType::boolean: row[table.header[c]] = (cell == "true" || cell == "TRUE" || cell == "True"); break;
        default: row[table.header[c]] = cell;
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

class VegaLiteBuilder {
 public:
  explicit VegaLiteBuilder(const ChartSpec& spec) : spec_{spec} {
    std::vector<std::string> unknown;
    check_known(spec, "", "", unknown);
    if (!unknown.empty()) {
      std::string msg = "unknown attributes:";
      for (const auto& u : unknown) msg += " " + (u.empty() ? std::string("<root>") : u);
      throw RenderError(msg);
    }
    const auto& fields = children_of(spec, "field");
    for (std::size_t i = 0; i < fields.size(); ++i) {
      std::string where = "field[" + std::to_string(i) + "]";
      field_types_[required_text(fields[i], "name", where)] = required_text(fields[i], "type", where);
    }
  }

  nlohmann::json build() const {
    const auto& views = children_of(spec_, "view");
    if (views.empty()) throw RenderError("incomplete spec: no view");
    nlohmann::json doc;
    if (views.size() == 1) {
      doc = view(views[0], "view[0]");
    } else {
      nlohmann::json list = nlohmann::json::array();
      for (std::size_t i = 0; i < views.size(); ++i) list.push_back(view(views[i], "view[" + std::to_string(i) + "]"));
      doc = nlohmann::json{{"vconcat", std::move(list)}};
    }
    doc["$schema"] = kVegaLiteSchema;
    return doc;
  }

 private:
  std::string field_type(const std::string& name, const std::string& where) const {
    auto it = field_types_.find(name);
    if (it == field_types_.end()) throw RenderError(where + " refers to unknown field '" + name + "'");
    return it->second;
  }

  nlohmann::json view(const ChartSpec& v, const std::string& where) const {
    bool polar = text_of(v, "coordinates") == std::optional<std::string>("polar");
    std::map<std::string, std::string> scale_types;
    const auto& scales = children_of(v, "scale");
    for (std::size_t i = 0; i < scales.size(); ++i) {
      std::string w = where + ".scale[" + std::to_string(i) + "]";
      scale_types[required_text(scales[i], "channel", w)] = required_text(scales[i], "type", w);
    }
    const auto& marks = children_of(v, "mark");
    if (marks.empty()) throw RenderError("incomplete spec: " + where + " has no mark");

    std::vector<nlohmann::json> units;
    std::map<std::string, int> channel_uses;
    for (std::size_t i = 0; i < marks.size(); ++i) {
      std::string w = where + ".mark[" + std::to_string(i) + "]";
      units.push_back(unit(marks[i], w, scale_types, polar));
      for (const auto& [ch, e] : units.back()["encoding"].items()) ++channel_uses[ch];
    }

    nlohmann::json facet_channels = nlohmann::json::object();
    const auto& facets = children_of(v, "facet");
    for (std::size_t i = 0; i < facets.size(); ++i) {
      std::string w = where + ".facet[" + std::to_string(i) + "]";
      std::string ch = required_text(facets[i], "channel", w);
      std::string field = required_text(facets[i], "field", w);
      std::string vl_channel = ch == "col" ? "column" : ch == "row" ? "row" : "";
      if (vl_channel.empty()) throw RenderError(w + ": unknown facet channel '" + ch + "'");
      std::string type = field_type(field, w) == "number" ? "ordinal" : "nominal";
      facet_channels[vl_channel] = nlohmann::json{{"field", field}, {"type", type}};
    }

    if (units.size() == 1) {
      nlohmann::json out = std::move(units[0]);
      for (const auto& [ch, def] : facet_channels.items()) out["encoding"][ch] = def;
      return out;
    }
    nlohmann::json layered{{"layer", units}};
    nlohmann::json shared = nlohmann::json::object();
    for (const auto& [ch, n] : channel_uses) {
      if (n > 1) shared[ch] = "shared";
    }
    if (!shared.empty()) layered["resolve"] = nlohmann::json{{"scale", shared}};
    if (facet_channels.empty()) return layered;
    return nlohmann::json{{"facet", facet_channels}, {"spec", layered}};
  }

  nlohmann::json unit(const ChartSpec& m, const std::string& where, const std::map<std::string, std::string>& scale_types,
                      bool polar) const {
    std::string type = required_text(m, "type", where);
    std::string vl_mark = type;
    if (polar) {
      if (type != "bar") throw RenderError(where + ": polar coordinates are only supported for bar marks");
      vl_mark = "arc";
    }
    nlohmann::json encoding = nlohmann::json::object();
    const auto& encodings = children_of(m, "encoding");
    for (std::size_t i = 0; i < encodings.size(); ++i) {
      std::string w = where + ".encoding[" + std::to_string(i) + "]";
      const auto& e = encodings[i];
      std::string channel = required_text(e, "channel", w);
      auto scale = scale_types.find(channel);
      if (scale == scale_types.end()) throw RenderError("incomplete spec: no scale for channel " + channel + " in " + w);
      nlohmann::json def = nlohmann::json::object();
      auto field = text_of(e, "field");
      auto aggregate = text_of(e, "aggregate");
      std::string ftype = "number";
      if (field) {
        def["field"] = *field;
        ftype = field_type(*field, w);
      } else if (aggregate != std::optional<std::string>("count")) {
        throw RenderError(w + " has neither a field nor a count aggregate");
      }
      if (aggregate) def["aggregate"] = *aggregate;
      if (auto bins = text_of(e, "binning")) def["bin"] = nlohmann::json{{"maxbins", std::stoll(*bins)}};
      if (auto stack = text_of(e, "stack")) def["stack"] = *stack;
      def["type"] = infer_encoding_type(ftype, scale->second);
      if (scale->second == "log") def["scale"] = nlohmann::json{{"type", "log"}};
      std::string vl_channel = channel;
      if (polar && channel == "x") vl_channel = "theta";
      if (polar && channel == "y") vl_channel = "radius";
      if (encoding.contains(vl_channel)) throw RenderError(w + ": channel " + channel + " used twice on one mark");
      encoding[vl_channel] = std::move(def);
    }
    return nlohmann::json{{"mark", vl_mark}, {"encoding", std::move(encoding)}};
  }

  const ChartSpec& spec_;
  std::map<std::string, std::string> field_types_;
};

}  // namespace detail

// Backends turn a complete spec into a chart document.
class Renderer {
 public:
  virtual ~Renderer() = default;
  virtual nlohmann::json render(const ChartSpec& spec, const Table* data) const = 0;
};

class VegaLiteRenderer : public Renderer {
 public:
  nlohmann::json render(const ChartSpec& spec, const Table* data) const override {
    nlohmann::json doc = detail::VegaLiteBuilder(spec).build();
    // Without inline rows the document points at a named source, bound by the viewer.
    doc["data"] = data ? nlohmann::json{{"values", detail::data_values(*data)}} : nlohmann::json{{"name", kDataName}};
    return doc;
  }
};

inline nlohmann::json render(const ChartSpec& spec, const Table* data = nullptr) {
  return VegaLiteRenderer().render(spec, data);
}

inline nlohmann::json render(const Facts& facts, const Table* data = nullptr) { return render(nest_facts(facts), data); }

// Renders each spec; failures are collected and reported together by index.
inline std::vector<nlohmann::json> render_many(const std::vector<ChartSpec>& specs, const Renderer& renderer,
                                               const Table* data = nullptr) {
  std::vector<nlohmann::json> out;
  std::string errors;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    try {
      out.push_back(renderer.render(specs[i], data));
    } catch (const Error& e) {
      errors += (errors.empty() ? "" : "; ") + std::string("spec ") + std::to_string(i) + ": " + e.what();
    }
  }
  if (!errors.empty()) throw RenderError(errors);
  return out;
}

inline std::vector<nlohmann::json> render_many(const std::vector<ChartSpec>& specs, const Table* data = nullptr) {
  return render_many(specs, VegaLiteRenderer(), data);
}

}  // namespace draco
