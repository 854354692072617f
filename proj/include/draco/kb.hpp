#pragma once

// Knowledge base: the five rule programs plus the soft-constraint weights.

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "draco/asp/ast.hpp"
#include "draco/asp/parser.hpp"
#include "draco/asp/stratify.hpp"
#include "draco/error.hpp"
#include "draco/kb_default.hpp"

namespace draco {

enum class Role { definitions, generate, constraints, hard, soft };

inline constexpr std::array<Role, 5> kRoles{Role::definitions, Role::generate, Role::constraints, Role::hard,
                                            Role::soft};

inline std::string role_name(Role r) {
  switch (r) {
    case Role::definitions: return "definitions";
    case Role::generate: return "generate";
    case Role::constraints: return "constraints";
    case Role::hard: return "hard";
    case Role::soft: return "soft";
  }
  return "";
}

using Weights = std::map<std::string, std::int64_t>;

struct KnowledgeBase {
  std::map<Role, asp::Program> programs;
  Weights weights;

  const asp::Program& program(Role r) const {
    static const asp::Program empty;
    auto it = programs.find(r);
    return it == programs.end() ? empty : it->second;
  }

  std::vector<std::string> block_names(Role r) const {
    std::vector<std::string> out;
    for (const auto& b : program(r).blocks) out.push_back(b.name);
    return out;
  }
  std::vector<std::string> hard_names() const { return block_names(Role::hard); }
  std::vector<std::string> soft_names() const { return block_names(Role::soft); }

  bool operator==(const KnowledgeBase&) const = default;
};

struct BlockInfo {
  Role role;
  std::string name;
  std::string description;
  std::optional<std::int64_t> weight;
  std::string source;  // the block printed in canonical form
};

namespace detail {

inline bool heads_predicate(const asp::Rule& r, const std::string& name) {
  const asp::Atom* h = r.head_atom();
  return h && h->predicate == name;
}

inline bool uses_predicate(const asp::Rule& r, const std::string& name) {
  if (heads_predicate(r, name)) return true;
  if (r.is_choice()) {
    const auto& c = std::get<asp::ChoiceHead>(r.head);
    if (c.element.predicate == name || c.condition.predicate == name) return true;
  }
  return false;
}

// Ground first argument of a `domain` head, if any.
inline std::optional<asp::Term> domain_property(const asp::Rule& r) {
  const asp::Atom* h = r.head_atom();
  if (!h || h->predicate != "domain" || h->args.size() != 2 || !h->args[0].is_ground()) return std::nullopt;
  return h->args[0];
}

inline void check_violation_heads(const asp::Block& b, bool hard, std::vector<std::string>& problems) {
  bool any = false;
  for (const auto& r : b.rules) {
    const asp::Atom* h = r.head_atom();
    if (!h || h->predicate != "violation") continue;
    any = true;
    const std::string where = (hard ? "hard block '" : "soft block '") + b.name + "'";
    if (h->args.empty() || h->args[0] != asp::Term::symbol(b.name)) {
      problems.push_back(where + " derives " + asp::to_string(*h) + ", expected violation(" + b.name +
                         (hard ? ")" : ",...)"));
    } else if (hard && h->args.size() != 1) {
      problems.push_back(where + " must derive violation(" + b.name + ") without a witness");
    } else if (!hard && h->args.size() < 2) {
      problems.push_back(where + " must derive violation(" + b.name + ",Witness)");
    }
  }
  if (!any) problems.push_back((hard ? "hard block '" : "soft block '") + b.name + "' derives no violation");
}

}  // namespace detail

// Every invariant violation at once, empty when the knowledge base is sound.
inline std::vector<std::string> check_kb(const KnowledgeBase& kb) {
  std::vector<std::string> problems;
  for (Role r : kRoles) {
    if (!kb.programs.count(r)) problems.push_back("missing program '" + role_name(r) + "'");
  }

  std::map<std::string, Role> seen;
  for (const auto& [role, program] : kb.programs) {
    for (const auto& b : program.blocks) {
      if (b.name.empty()) continue;
      auto [it, inserted] = seen.emplace(b.name, role);
      if (!inserted) {
        problems.push_back("block '" + b.name + "' appears in both " + role_name(it->second) + " and " + role_name(role));
      }
      for (const auto& rule : b.rules) {
        if (role != Role::definitions && (detail::heads_predicate(rule, "domain") || detail::heads_predicate(rule, "required"))) {
          problems.push_back("block '" + b.name + "' in " + role_name(role) + " declares " + asp::to_string(*rule.head_atom()) +
                             "; domains and required properties belong in definitions");
        }
        if (role != Role::generate && rule.is_choice()) {
          problems.push_back("block '" + b.name + "' in " + role_name(role) + " has a choice rule; those belong in generate");
        }
        if ((role != Role::hard && role != Role::soft) && detail::heads_predicate(rule, "violation")) {
          problems.push_back("block '" + b.name + "' in " + role_name(role) + " derives violations");
        }
      }
      if (role == Role::hard) detail::check_violation_heads(b, true, problems);
      if (role == Role::soft) detail::check_violation_heads(b, false, problems);
    }
  }

  // Domains: non-empty, no duplicates, and one for every required property.
  std::set<std::string> declared;
  for (const auto& b : kb.program(Role::definitions).blocks) {
    for (const auto& rule : b.rules) {
      auto prop = detail::domain_property(rule);
      if (!prop) continue;
      declared.insert(asp::to_string(*prop));
      const asp::Term& values = rule.head_atom()->args[1];
      if (values.kind == asp::Term::Kind::pool) {
        std::set<std::string> distinct;
        for (const auto& v : values.args) {
          if (!distinct.insert(asp::to_string(v)).second) {
            problems.push_back("domain of " + asp::to_string(*prop) + " lists " + asp::to_string(v) + " twice");
          }
        }
      }
    }
  }
  for (const auto& b : kb.program(Role::definitions).blocks) {
    for (const auto& rule : b.rules) {
      if (!rule.is_fact() || !detail::heads_predicate(rule, "required")) continue;
      const auto& h = *rule.head_atom();
      if (h.args.size() == 1 && !declared.count(asp::to_string(h.args[0]))) {
        problems.push_back("required property " + asp::to_string(h.args[0]) + " has no domain");
      }
    }
  }

  // Weights match soft blocks exactly.
  std::set<std::string> soft;
  for (const auto& n : kb.soft_names()) soft.insert(n);
  for (const auto& n : soft) {
    if (!kb.weights.count(n)) problems.push_back("soft block '" + n + "' has no weight");
  }
  for (const auto& [n, w] : kb.weights) {
    if (!soft.count(n)) {
      bool is_hard = seen.count(n) && seen.at(n) == Role::hard;
      problems.push_back(is_hard ? "hard block '" + n + "' must not have a weight"
                                 : "weight '" + n + "' has no soft block");
    }
    if (w < 0) problems.push_back("weight '" + n + "' is negative");
  }

  // The checking programs together must stratify.
  asp::Program all;
  for (Role r : {Role::definitions, Role::constraints, Role::hard, Role::soft}) all.append(kb.program(r));
  try {
    asp::stratify(all);
  } catch (const ProgramError& e) {
    problems.push_back(e.what());
  }
  return problems;
}

inline void validate_kb(const KnowledgeBase& kb) {
  auto problems = check_kb(kb);
  if (!problems.empty()) throw KbError(std::move(problems));
}

inline Weights parse_weights(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw KbError({std::string("weights: malformed JSON: ") + e.what()});
  }
  if (!j.is_object()) throw KbError({"weights: expected an object of name to integer"});
  Weights w;
  std::vector<std::string> problems;
  for (const auto& [k, v] : j.items()) {
    if (!v.is_number_integer()) {
      problems.push_back("weights: '" + k + "' is not an integer");
      continue;
    }
    w[k] = v.get<std::int64_t>();
  }
  if (!problems.empty()) throw KbError(std::move(problems));
  return w;
}

inline std::string weights_to_json(const Weights& w) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : w) j[k] = v;
  return j.dump(2) + "\n";
}

// Builds and validates a knowledge base from file contents keyed by role name
// ("definitions", ...) plus "weights".
inline KnowledgeBase kb_from_sources(const std::map<std::string, std::string>& sources) {
  KnowledgeBase kb;
  std::vector<std::string> problems;
  for (Role r : kRoles) {
    auto it = sources.find(role_name(r));
    if (it == sources.end()) {
      problems.push_back("missing program '" + role_name(r) + "'");
      continue;
    }
    try {
      kb.programs[r] = asp::parse_program(it->second);
    } catch (const Error& e) {
      problems.push_back(role_name(r) + ".lp: " + e.what());
    }
  }
  auto w = sources.find("weights");
  if (w == sources.end()) {
    problems.push_back("missing weights");
  } else {
    try {
      kb.weights = parse_weights(w->second);
    } catch (const KbError& e) {
      problems.insert(problems.end(), e.problems().begin(), e.problems().end());
    }
  }
  if (!problems.empty()) throw KbError(std::move(problems));
  validate_kb(kb);
  return kb;
}

inline const KnowledgeBase& default_knowledge_base() {
  static const KnowledgeBase kb = kb_from_sources({{"definitions", default_kb::definitions},
                                                   {"generate", default_kb::generate},
                                                   {"constraints", default_kb::constraints},
                                                   {"hard", default_kb::hard},
                                                   {"soft", default_kb::soft},
                                                   {"weights", default_kb::weights}});
  return kb;
}

// Reads `<role>.lp` files and `weights.json` from a directory.
inline KnowledgeBase load_kb(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw KbError({"not a knowledge base directory: " + dir.string()});
  std::map<std::string, std::string> sources;
  auto read = [&](const std::string& key, const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return;
    std::ostringstream ss;
    ss << in.rdbuf();
    sources[key] = ss.str();
  };
  for (Role r : kRoles) read(role_name(r), dir / (role_name(r) + ".lp"));
  read("weights", dir / "weights.json");
  return kb_from_sources(sources);
}

// File contents of a knowledge base, keyed like kb_from_sources expects.
inline std::map<std::string, std::string> kb_sources(const KnowledgeBase& kb) {
  std::map<std::string, std::string> out;
  for (Role r : kRoles) {
    std::ostringstream os;
    asp::print_program(os, kb.program(r));
    out[role_name(r)] = os.str();
  }
  out["weights"] = weights_to_json(kb.weights);
  return out;
}

inline void save_kb(const KnowledgeBase& kb, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& [key, text] : kb_sources(kb)) {
    std::ofstream out(dir / (key == "weights" ? "weights.json" : key + ".lp"), std::ios::binary);
    out << text;
  }
}

// Keeps only the named hard and soft blocks. Other roles are kept whole.
inline KnowledgeBase filter_blocks(const KnowledgeBase& kb, const std::set<std::string>& names) {
  std::set<std::string> known;
  for (const auto& n : kb.hard_names()) known.insert(n);
  for (const auto& n : kb.soft_names()) known.insert(n);
  std::vector<std::string> unknown;
  for (const auto& n : names) {
    if (!known.count(n)) unknown.push_back("unknown block '" + n + "'");
  }
  if (!unknown.empty()) throw KbError(std::move(unknown));

  KnowledgeBase out = kb;
  for (Role r : {Role::hard, Role::soft}) {
    auto& blocks = out.programs[r].blocks;
    std::erase_if(blocks, [&](const asp::Block& b) { return !names.count(b.name); });
  }
  std::erase_if(out.weights, [&](const auto& kv) { return !names.count(kv.first); });
  return out;
}

inline KnowledgeBase set_weight(const KnowledgeBase& kb, const std::string& name, std::int64_t w) {
  if (!kb.weights.count(name)) throw KbError({"no soft block named '" + name + "'"});
  if (w < 0) throw KbError({"weight for '" + name + "' must not be negative"});
  KnowledgeBase out = kb;
  out.weights[name] = w;
  return out;
}

// Applies every entry of `overrides` through set_weight.
inline KnowledgeBase with_weights(const KnowledgeBase& kb, const Weights& overrides) {
  KnowledgeBase out = kb;
  for (const auto& [name, w] : overrides) out = set_weight(out, name, w);
  return out;
}

inline std::vector<BlockInfo> list_blocks(const KnowledgeBase& kb) {
  std::vector<BlockInfo> out;
  for (Role r : kRoles) {
    for (const auto& b : kb.program(r).blocks) {
      BlockInfo info{r, b.name, b.description, std::nullopt, {}};
      if (r == Role::soft) {
        auto it = kb.weights.find(b.name);
        if (it != kb.weights.end()) info.weight = it->second;
      }
      std::ostringstream os;
      asp::print_block(os, b);
      info.source = os.str();
      out.push_back(std::move(info));
    }
  }
  return out;
}

inline nlohmann::json blocks_to_json(const std::vector<BlockInfo>& blocks) {
  auto arr = nlohmann::json::array();
  for (const auto& b : blocks) {
    nlohmann::json j{{"role", role_name(b.role)}, {"name", b.name}, {"description", b.description}};
    if (b.weight) j["weight"] = *b.weight;
    arr.push_back(std::move(j));
  }
  return arr;
}

}  // namespace draco
