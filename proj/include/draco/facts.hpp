#pragma once

// Chart specifications in two shapes: the nested tree users write and the flat
// entity/attribute facts the rule engine consumes.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "draco/asp/ast.hpp"
#include "draco/asp/parser.hpp"
#include "draco/error.hpp"

namespace draco {

struct Symbol {
  std::string name;
  auto operator<=>(const Symbol&) const = default;
};

// Scalar attribute value. Floats are deliberately absent.
using Value = std::variant<std::int64_t, Symbol, std::string>;

inline Value sym(std::string name) { return Symbol{std::move(name)}; }

inline asp::Term to_term(const Value& v) {
  if (auto* i = std::get_if<std::int64_t>(&v)) return asp::Term::integer(*i);
  if (auto* s = std::get_if<Symbol>(&v)) return asp::Term::symbol(s->name);
  return asp::Term::string(std::get<std::string>(v));
}

inline std::string to_string(const Value& v) { return asp::to_string(to_term(v)); }

// Entity ids are symbols, or integers when facts come from elsewhere.
using EntityId = Value;

inline const EntityId& root_id() {
  static const EntityId root = Symbol{"root"};
  return root;
}

// `kind` is empty for attributes of the root, printed as a bare name.
struct AttributePath {
  std::string kind;
  std::string attr;
  auto operator<=>(const AttributePath&) const = default;
};

struct Fact {
  enum class Kind { entity, attribute };

  Kind kind = Kind::entity;
  std::string entity_kind;  // entity facts
  EntityId parent;          // entity facts
  AttributePath path;       // attribute facts
  EntityId id;              // the entity introduced or described
  Value value;              // attribute facts

  static Fact entity(std::string kind, EntityId parent, EntityId id) {
    Fact f;
    f.kind = Kind::entity;
    f.entity_kind = std::move(kind);
    f.parent = std::move(parent);
    f.id = std::move(id);
    return f;
  }
  static Fact attribute(AttributePath path, EntityId id, Value value) {
    Fact f;
    f.kind = Kind::attribute;
    f.path = std::move(path);
    f.id = std::move(id);
    f.value = std::move(value);
    return f;
  }

  bool is_entity() const { return kind == Kind::entity; }
  bool is_attribute() const { return kind == Kind::attribute; }

  bool operator==(const Fact& o) const {
    if (kind != o.kind || id != o.id) return false;
    if (is_entity()) return entity_kind == o.entity_kind && parent == o.parent;
    return path == o.path && value == o.value;
  }
};

using Facts = std::vector<Fact>;

// ---------------------------------------------------------------------------
// Conversion to and from rule-language atoms.

inline asp::Atom to_atom(const Fact& f) {
  using asp::Term;
  if (f.is_entity()) return asp::Atom{"entity", {Term::symbol(f.entity_kind), to_term(f.parent), to_term(f.id)}};
  Term path = f.path.kind.empty() ? Term::symbol(f.path.attr)
                                  : Term::tuple({Term::symbol(f.path.kind), Term::symbol(f.path.attr)});
  return asp::Atom{"attribute", {path, to_term(f.id), to_term(f.value)}};
}

inline std::vector<asp::Atom> to_atoms(const Facts& facts) {
  std::vector<asp::Atom> out;
  out.reserve(facts.size());
  for (const auto& f : facts) out.push_back(to_atom(f));
  return out;
}

namespace detail {

inline std::optional<Value> value_of(const asp::Term& t) {
  switch (t.kind) {
    case asp::Term::Kind::integer: return Value{t.number};
    case asp::Term::Kind::symbol: return Value{Symbol{t.text}};
    case asp::Term::Kind::string: return Value{t.text};
    default: return std::nullopt;
  }
}

inline bool is_symbol_term(const asp::Term& t) { return t.kind == asp::Term::Kind::symbol; }

}  // namespace detail

// Nullopt when the atom is not a well-formed entity or attribute fact.
inline std::optional<Fact> from_atom(const asp::Atom& a) {
  if (a.args.size() != 3) return std::nullopt;
  if (a.predicate == "entity") {
    auto parent = detail::value_of(a.args[1]);
    auto self = detail::value_of(a.args[2]);
    if (!detail::is_symbol_term(a.args[0]) || !parent || !self || std::holds_alternative<std::string>(*parent) ||
        std::holds_alternative<std::string>(*self)) {
      return std::nullopt;
    }
    return Fact::entity(a.args[0].text, *parent, *self);
  }
  if (a.predicate == "attribute") {
    AttributePath path;
    const auto& p = a.args[0];
    if (detail::is_symbol_term(p)) {
      path.attr = p.text;
    } else if (p.kind == asp::Term::Kind::tuple && p.args.size() == 2 && detail::is_symbol_term(p.args[0]) &&
               detail::is_symbol_term(p.args[1])) {
      path = {p.args[0].text, p.args[1].text};
    } else if (p.kind == asp::Term::Kind::tuple && p.args.size() == 1 && detail::is_symbol_term(p.args[0])) {
      path.attr = p.args[0].text;
    } else {
      return std::nullopt;
    }
    auto id = detail::value_of(a.args[1]);
    auto value = detail::value_of(a.args[2]);
    if (!id || !value || std::holds_alternative<std::string>(*id)) return std::nullopt;
    return Fact::attribute(std::move(path), *id, *value);
  }
  return std::nullopt;
}

// Keeps entity and attribute atoms, drops everything else.
inline Facts from_atoms(const std::vector<asp::Atom>& atoms) {
  Facts out;
  for (const auto& a : atoms) {
    if (auto f = from_atom(a)) out.push_back(std::move(*f));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Text form.

inline Facts parse_facts(std::string_view text) {
  Facts out;
  for (const auto& rule : asp::parse_rules(text)) {
    if (!rule.is_fact()) throw ModelError("expected a fact, found rule: " + asp::to_string(rule));
    auto f = from_atom(*rule.head_atom());
    if (!f) throw ModelError("not an entity or attribute fact: " + asp::to_string(rule));
    out.push_back(std::move(*f));
  }
  return out;
}

inline std::string to_string(const Fact& f) { return asp::to_string(to_atom(f)) + "."; }

inline std::string print_facts(const Facts& facts) {
  std::string out;
  for (const auto& f : facts) {
    out += to_string(f);
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Nested form.

struct ChartSpec {
  std::map<std::string, Value> attributes;
  std::map<std::string, std::vector<ChartSpec>> children;

  bool operator==(const ChartSpec&) const = default;
  bool empty() const { return attributes.empty() && children.empty(); }
};

namespace detail {

class IdAllocator {
 public:
  EntityId next(const std::string& kind) {
    auto it = prefix_.find(kind);
    if (it == prefix_.end()) {
      std::string initial = kind.substr(0, 1);
      bool taken = false;
      for (const auto& [k, p] : prefix_) taken = taken || p == initial;
      it = prefix_.emplace(kind, taken ? kind : initial).first;
    }
    return Symbol{it->second + std::to_string(counter_[kind]++)};
  }

 private:
  std::map<std::string, std::string> prefix_;
  std::map<std::string, std::int64_t> counter_;
};

inline void check_node(const ChartSpec& node) {
  for (const auto& [kind, list] : node.children) {
    if (node.attributes.count(kind)) throw ModelError("'" + kind + "' is both an attribute and an entity kind");
    if (!asp::is_symbol_text(kind)) throw ModelError("invalid entity kind '" + kind + "'");
  }
  for (const auto& [name, v] : node.attributes) {
    if (!asp::is_symbol_text(name)) throw ModelError("invalid attribute name '" + name + "'");
  }
}

inline void flatten_into(const ChartSpec& node, const std::string& kind, const EntityId& id, IdAllocator& ids,
                         Facts& out) {
  check_node(node);
  for (const auto& [name, value] : node.attributes) out.push_back(Fact::attribute({kind, name}, id, value));
  for (const auto& [child_kind, list] : node.children) {
    for (const auto& child : list) {
      EntityId child_id = ids.next(child_kind);
      out.push_back(Fact::entity(child_kind, id, child_id));
      flatten_into(child, child_kind, child_id, ids, out);
    }
  }
}

}  // namespace detail

// Depth first: a node's attributes, then its children by kind.
inline Facts flatten_spec(const ChartSpec& spec) {
  Facts out;
  detail::IdAllocator ids;
  detail::flatten_into(spec, "", root_id(), ids, out);
  return out;
}

inline ChartSpec nest_facts(const Facts& facts) {
  struct Node {
    std::string kind;
    ChartSpec spec;
    std::vector<std::pair<std::string, std::size_t>> kids;  // kind, node index
  };
  std::vector<Node> nodes(1);
  std::map<EntityId, std::size_t> index{{root_id(), 0}};

  for (const auto& f : facts) {
    if (!f.is_entity()) continue;
    if (f.id == root_id()) throw ModelError("entity id 'root' is reserved");
    if (index.count(f.id)) throw ModelError("entity " + to_string(f.id) + " is declared twice");
    index.emplace(f.id, nodes.size());
    nodes.push_back(Node{f.entity_kind, {}, {}});
  }
  for (const auto& f : facts) {
    if (f.is_entity()) {
      auto parent = index.find(f.parent);
      if (parent == index.end()) {
        throw ModelError("entity " + to_string(f.id) + " refers to unknown parent " + to_string(f.parent));
      }
      nodes[parent->second].kids.emplace_back(f.entity_kind, index.at(f.id));
      continue;
    }
    auto it = index.find(f.id);
    if (it == index.end()) throw ModelError("attribute " + to_string(f) + " refers to unknown entity " + to_string(f.id));
    Node& n = nodes[it->second];
    if (n.kind != f.path.kind) {
      throw ModelError("attribute " + to_string(f) + " does not match entity kind '" + n.kind + "'");
    }
    if (!n.spec.attributes.emplace(f.path.attr, f.value).second) {
      throw ModelError("attribute " + to_string(f) + " assigned twice");
    }
  }

  // Assemble bottom up, guarding against parent cycles.
  std::vector<int> state(nodes.size(), 0);
  std::function<ChartSpec(std::size_t)> build = [&](std::size_t i) -> ChartSpec {
    if (state[i] == 1) throw ModelError("entity parents form a cycle");
    state[i] = 1;
    ChartSpec out = nodes[i].spec;
    for (const auto& [kind, child] : nodes[i].kids) {
      if (out.attributes.count(kind)) throw ModelError("'" + kind + "' is both an attribute and an entity kind");
      out.children[kind].push_back(build(child));
    }
    state[i] = 2;
    return out;
  };
  ChartSpec root = build(0);
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    if (state[i] == 0) throw ModelError("entity parents form a cycle");
  }
  return root;
}

// The id-independent text of a fact list: flatten after nesting.
inline std::string canonical_text(const Facts& facts) { return print_facts(flatten_spec(nest_facts(facts))); }

// ---------------------------------------------------------------------------
// JSON form. Objects are nodes, arrays of objects are entity lists, scalars
// are attributes.

namespace detail {

// Attributes whose values are data column names, never symbols.
inline bool names_a_column(std::string_view attr) { return attr == "name" || attr == "field"; }

inline Value json_to_value(const std::string& attr, const nlohmann::json& j) {
  if (j.is_boolean()) return Symbol{j.get<bool>() ? "true" : "false"};
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number_unsigned()) return static_cast<std::int64_t>(j.get<std::uint64_t>());
  if (j.is_number_float()) throw ModelError("attribute '" + attr + "': floating point values are not supported");
  if (j.is_string()) {
    auto s = j.get<std::string>();
    if (!names_a_column(attr) && asp::is_symbol_text(s)) return Symbol{s};
    return s;
  }
  throw ModelError("attribute '" + attr + "' has unsupported value " + j.dump());
}

inline nlohmann::json value_to_json(const Value& v) {
  if (auto* i = std::get_if<std::int64_t>(&v)) return *i;
  if (auto* s = std::get_if<Symbol>(&v)) {
    if (s->name == "true") return true;
    if (s->name == "false") return false;
    return s->name;
  }
  return std::get<std::string>(v);
}

}  // namespace detail

inline ChartSpec spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ModelError("specification node must be a JSON object");
  ChartSpec out;
  for (const auto& [key, v] : j.items()) {
    if (v.is_array()) {
      auto& list = out.children[key];
      for (const auto& child : v) list.push_back(spec_from_json(child));
    } else if (v.is_object()) {
      throw ModelError("'" + key + "' must be an array of objects");
    } else {
      out.attributes.emplace(key, detail::json_to_value(key, v));
    }
  }
  detail::check_node(out);
  return out;
}

inline nlohmann::json spec_to_json(const ChartSpec& spec) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [name, v] : spec.attributes) j[name] = detail::value_to_json(v);
  for (const auto& [kind, list] : spec.children) {
    auto arr = nlohmann::json::array();
    for (const auto& c : list) arr.push_back(spec_to_json(c));
    j[kind] = std::move(arr);
  }
  return j;
}

inline ChartSpec parse_spec(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ModelError(std::string("malformed JSON: ") + e.what());
  }
  return spec_from_json(j);
}

inline std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

}  // namespace draco
