#pragma once

// Checking complete specifications and completing partial ones.
//
// Completion enumerates skeletons (how many encodings to add per mark), then
// channels for the new encodings, then one scale per used (view, channel),
// and finally runs a depth-first branch and bound over the remaining choice
// slots. Each search node is evaluated three-valued: assigned facts are
// certain, the candidates of open slots are merely possible. Certain hard
// violations prune the node; certain soft violations give an admissible lower
// bound on its cost.

#include <algorithm>
#include <functional>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "draco/asp/eval.hpp"
#include "draco/facts.hpp"
#include "draco/kb.hpp"

namespace draco {

using Violations = std::map<std::string, std::int64_t>;

inline std::int64_t cost(const Weights& weights, const Violations& violations) {
  std::int64_t total = 0;
  for (const auto& [name, count] : violations) {
    auto it = weights.find(name);
    if (it == weights.end()) throw Error("no weight for constraint '" + name + "'");
    total += it->second * count;
  }
  return total;
}

// Everything the checking programs say about one fact list.
struct Assessment {
  std::vector<std::string> missing;  // "(kind,attr) of id" for absent required properties
  std::vector<std::string> hard;     // hard block names, KB order, plus "inconsistent"
  Violations soft;                   // every soft block, zeros included
  std::int64_t cost = 0;

  bool valid() const { return missing.empty() && hard.empty(); }
};

struct Caps {
  int max_added_encodings = 3;
  bool allow_new_entities = true;
};

struct Query {
  Facts base;
  asp::Program extra_rules;  // hints: choice-free rules, usually integrity constraints
  Caps caps;
  std::size_t k = 1;
};

struct CandidateModel {
  Facts facts;  // canonical ids, `none` values dropped
  Violations violations;
  std::vector<std::string> hard_violations;
  std::int64_t cost = 0;
};

// Search effort of the last completion, for tests and curiosity.
struct SearchStats {
  std::size_t skeletons = 0;
  std::size_t nodes = 0;
  std::size_t pruned_hard = 0;
  std::size_t pruned_bound = 0;
  std::size_t leaves = 0;
};

namespace detail {

inline const asp::Term& none_term() {
  static const asp::Term t = asp::Term::symbol("none");
  return t;
}

// Compiled checking program (definitions, constraints, hard, soft, hints)
// with the ids needed to read violations back out of an evaluation.
class Checker {
 public:
  Checker(const KnowledgeBase& kb, const asp::Program& extra) : hard_names_{kb.hard_names()}, soft_names_{kb.soft_names()} {
    for (const auto& r : extra.blocks) {
      for (const auto& rule : r.rules) {
        if (rule.is_choice()) throw ProgramError("query hints must not contain choice rules");
      }
    }
    asp::Program p;
    for (Role r : {Role::definitions, Role::constraints, Role::hard, Role::soft}) p.append(kb.program(r));
    p.append(extra);
    program_ = asp::CompiledProgram::compile(p);
    for (const auto& n : soft_names_) weights_.push_back(kb.weights.at(n));
  }

  const std::shared_ptr<const asp::CompiledProgram>& program() const { return program_; }
  const std::vector<std::string>& soft_names() const { return soft_names_; }
  const std::vector<std::int64_t>& weights() const { return weights_; }

  struct Reading {
    bool inconsistent = false;
    std::vector<std::string> hard;
    std::vector<std::int64_t> soft;  // aligned with soft_names()
    std::int64_t cost = 0;
    std::vector<std::string> missing;
  };

  // Certain atoms only. With `stop_at_hard`, returns early on the first hard
  // violation without reading soft counts.
  Reading read(const asp::Evaluation& ev, bool stop_at_hard = false, bool want_missing = false) const {
    Reading out;
    out.inconsistent = ev.inconsistent();
    auto v1 = ev.find_predicate("violation", 1);
    for (const auto& name : hard_names_) {
      if (!v1) break;
      auto id = ev.terms().find(asp::Term::symbol(name));
      if (!id) continue;
      const asp::TermId row[1] = {*id};
      if (ev.certain(*v1).contains(row)) {
        out.hard.push_back(name);
        if (stop_at_hard) return out;
      }
    }
    if (stop_at_hard && out.inconsistent) return out;
    out.soft.assign(soft_names_.size(), 0);
    for (std::size_t i = 0; i < soft_names_.size(); ++i) {
      std::size_t n = ev.count_derivations("violation", asp::Term::symbol(soft_names_[i]));
      // violation(name) without witness is a hard-style atom; soft blocks never derive it.
      out.soft[i] = static_cast<std::int64_t>(n);
      out.cost += weights_[i] * out.soft[i];
    }
    if (want_missing) {
      if (auto m = ev.find_predicate("missing", 2)) {
        const auto& rel = ev.certain(*m);
        std::vector<std::string> missing;
        for (std::size_t i = 0; i < rel.size(); ++i) {
          auto a = ev.to_atom(*m, rel.row(i));
          missing.push_back(asp::to_string(a.args[0]) + " of " + asp::to_string(a.args[1]));
        }
        std::sort(missing.begin(), missing.end());
        out.missing = std::move(missing);
      }
    }
    return out;
  }

 private:
  std::vector<std::string> hard_names_;
  std::vector<std::string> soft_names_;
  std::vector<std::int64_t> weights_;
  std::shared_ptr<const asp::CompiledProgram> program_;
};

inline Assessment assess_with(const Checker& checker, const Facts& facts) {
  asp::Evaluation ev(checker.program());
  for (const auto& f : facts) ev.add_fact(to_atom(f));
  ev.run();
  auto r = checker.read(ev, false, true);
  Assessment out;
  out.missing = std::move(r.missing);
  out.hard = std::move(r.hard);
  if (r.inconsistent) out.hard.push_back("inconsistent");
  for (std::size_t i = 0; i < checker.soft_names().size(); ++i) out.soft[checker.soft_names()[i]] = r.soft[i];
  out.cost = r.cost;
  return out;
}

}  // namespace detail

inline Assessment assess(const KnowledgeBase& kb, const Facts& facts, const asp::Program& extra = {}) {
  return detail::assess_with(detail::Checker(kb, extra), facts);
}

// Names of violated hard blocks; "inconsistent" when an integrity constraint
// fires. Throws IncompleteSpecError when a required property is missing.
inline std::vector<std::string> validate(const KnowledgeBase& kb, const Facts& facts) {
  Assessment a = assess(kb, facts);
  if (!a.missing.empty()) throw IncompleteSpecError(a.missing);
  return a.hard;
}

inline Violations count_violations(const KnowledgeBase& kb, const Facts& facts) {
  Assessment a = assess(kb, facts);
  if (!a.missing.empty()) throw IncompleteSpecError(a.missing);
  return a.soft;
}

// Ranking order: cost, then entity count, then canonical text.
struct RankKey {
  std::int64_t cost;
  std::size_t entities;
  std::string text;
  auto operator<=>(const RankKey&) const = default;
};

inline std::size_t entity_count(const Facts& facts) {
  return static_cast<std::size_t>(std::count_if(facts.begin(), facts.end(), [](const Fact& f) { return f.is_entity(); }));
}

// Drops `none` attributes and renames ids canonically.
inline Facts finish_facts(const Facts& facts) {
  Facts kept;
  for (const auto& f : facts) {
    if (f.is_attribute() && f.value == Value{Symbol{"none"}}) continue;
    kept.push_back(f);
  }
  return flatten_spec(nest_facts(kept));
}

namespace detail {

struct Slot {
  AttributePath path;
  EntityId entity;
  std::vector<Fact> candidates;
};

inline int slot_priority(const AttributePath& p) {
  static const std::vector<AttributePath> order{
      {"mark", "type"},       {"encoding", "field"}, {"encoding", "aggregate"}, {"scale", "type"},
      {"encoding", "binning"}, {"encoding", "stack"}, {"facet", "channel"},      {"facet", "field"},
  };
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (order[i] == p) return static_cast<int>(i);
  }
  return static_cast<int>(order.size());
}

class Completer {
 public:
  Completer(const KnowledgeBase& kb, const Query& query)
      : query_{query}, checker_{kb, query.extra_rules} {
    asp::Program gen;
    gen.append(kb.program(Role::definitions));
    gen.append(kb.program(Role::generate));
    generator_ = asp::CompiledProgram::compile(gen);
    if (query_.k == 0) throw Error("k must be at least 1");
    // Shape problems in the query surface before the search starts.
    nest_facts(query_.base);
  }

  std::vector<CandidateModel> run() {
    collect_structure();
    for (const auto& added : skeletons()) {
      ++stats_.skeletons;
      std::set<std::string> saved = used_ids_;
      Facts facts = query_.base;
      std::vector<std::vector<EntityId>> new_encodings(marks_.size());
      std::size_t next_id = 0;
      for (std::size_t m = 0; m < marks_.size(); ++m) {
        for (int i = 0; i < added[m]; ++i) {
          EntityId id = fresh("e", next_id);
          facts.push_back(Fact::entity("encoding", marks_[m].id, id));
          new_encodings[m].push_back(id);
        }
      }
      assign_channels(facts, new_encodings);
      used_ids_ = std::move(saved);
    }
    std::vector<CandidateModel> out;
    for (const auto& [key, model] : best_) out.push_back(model);
    return out;
  }

  const SearchStats& stats() const { return stats_; }

 private:
  struct Mark {
    EntityId id;
    EntityId view;
  };

  void collect_structure() {
    for (const auto& f : query_.base) {
      if (f.is_entity()) used_ids_.insert(to_string(f.id));
      if (f.is_entity() && f.entity_kind == "mark") marks_.push_back(Mark{f.id, f.parent});
      if (f.is_attribute()) assigned_.insert({f.path, to_string(f.id)});
    }
  }

  EntityId fresh(const std::string& prefix, std::size_t& counter) {
    while (true) {
      std::string id = prefix + std::to_string(counter++);
      if (used_ids_.insert(id).second) return Symbol{id};
    }
  }

  // Added-encoding counts per mark, fewest entities first.
  std::vector<std::vector<int>> skeletons() const {
    int cap = query_.caps.allow_new_entities ? std::max(0, query_.caps.max_added_encodings) : 0;
    std::vector<std::vector<int>> out{{}};
    for (std::size_t m = 0; m < marks_.size(); ++m) {
      std::vector<std::vector<int>> next;
      for (const auto& prefix : out) {
        for (int n = 0; n <= cap; ++n) {
          auto p = prefix;
          p.push_back(n);
          next.push_back(std::move(p));
        }
      }
      out = std::move(next);
    }
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
      int sa = 0, sb = 0;
      for (int x : a) sa += x;
      for (int x : b) sb += x;
      return sa < sb;
    });
    return out;
  }

  std::vector<Slot> open_slots(const Facts& facts) const {
    asp::Evaluation ev(generator_);
    for (const auto& f : facts) ev.add_fact(to_atom(f));
    ev.run();
    std::set<std::pair<AttributePath, std::string>> have;
    for (const auto& f : facts) {
      if (f.is_attribute()) have.insert({f.path, to_string(f.id)});
    }
    std::vector<Slot> out;
    for (const auto& cs : ev.choices()) {
      if (cs.candidates.empty()) continue;
      auto first = from_atom(cs.candidates.front());
      if (!first || !first->is_attribute()) throw ProgramError("generator produced a non-attribute choice");
      if (have.count({first->path, to_string(first->id)})) continue;
      Slot s{first->path, first->id, {}};
      for (const auto& c : cs.candidates) s.candidates.push_back(*from_atom(c));
      out.push_back(std::move(s));
    }
    return out;
  }

  void assign_channels(Facts facts, const std::vector<std::vector<EntityId>>& new_encodings) {
    std::vector<Slot> slots = open_slots(facts);
    std::vector<Slot> channel_slots;
    for (auto& s : slots) {
      if (s.path == AttributePath{"encoding", "channel"}) channel_slots.push_back(s);
    }
    // For each channel slot, the previous added encoding of the same mark, if any.
    std::vector<int> previous(channel_slots.size(), -1);
    for (const auto& list : new_encodings) {
      int last = -1;
      for (const auto& id : list) {
        for (std::size_t i = 0; i < channel_slots.size(); ++i) {
          if (channel_slots[i].entity == id) {
            previous[i] = last;
            last = static_cast<int>(i);
          }
        }
      }
    }
    std::vector<std::size_t> choice(channel_slots.size(), 0);
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
      if (i == channel_slots.size()) {
        Facts with = facts;
        for (std::size_t j = 0; j < channel_slots.size(); ++j) with.push_back(channel_slots[j].candidates[choice[j]]);
        add_scales(with);
        return;
      }
      std::size_t start = previous[i] >= 0 ? choice[static_cast<std::size_t>(previous[i])] : 0;
      for (std::size_t c = start; c < channel_slots[i].candidates.size(); ++c) {
        choice[i] = c;
        rec(i + 1);
      }
    };
    rec(0);
  }

  void add_scales(Facts facts) {
    std::map<std::string, EntityId> view_of_mark;
    for (const auto& m : marks_) view_of_mark[to_string(m.id)] = m.view;
    std::map<std::string, EntityId> mark_of_encoding;
    std::set<std::pair<std::string, std::string>> have;
    std::map<std::string, std::string> scale_channel;
    for (const auto& f : facts) {
      if (f.is_entity() && f.entity_kind == "encoding") mark_of_encoding[to_string(f.id)] = f.parent;
      if (f.is_attribute() && f.path == AttributePath{"scale", "channel"}) scale_channel[to_string(f.id)] = to_string(f.value);
    }
    for (const auto& f : facts) {
      if (f.is_entity() && f.entity_kind == "scale" && scale_channel.count(to_string(f.id))) {
        have.insert({to_string(f.parent), scale_channel[to_string(f.id)]});
      }
    }
    std::vector<std::pair<EntityId, Value>> needed;
    std::set<std::pair<std::string, std::string>> planned;
    for (const auto& f : facts) {
      if (!f.is_attribute() || f.path != AttributePath{"encoding", "channel"}) continue;
      auto m = mark_of_encoding.find(to_string(f.id));
      if (m == mark_of_encoding.end()) continue;
      auto v = view_of_mark.find(to_string(m->second));
      if (v == view_of_mark.end()) continue;
      std::pair<std::string, std::string> key{to_string(v->second), to_string(f.value)};
      if (have.count(key) || !planned.insert(key).second) continue;
      needed.emplace_back(v->second, f.value);
    }
    std::size_t counter = 0;
    std::set<std::string> saved = used_ids_;
    for (const auto& [view, channel] : needed) {
      EntityId id = fresh("s", counter);
      facts.push_back(Fact::entity("scale", view, id));
      facts.push_back(Fact::attribute({"scale", "channel"}, id, channel));
    }
    used_ids_ = saved;
    search(facts);
  }

  struct NodeResult {
    bool feasible = false;
    std::int64_t bound = 0;
    Checker::Reading reading;
  };

  NodeResult evaluate(const std::vector<std::size_t>& chosen, std::size_t open_from) {
    ++stats_.nodes;
    asp::Evaluation ev(seed_, open_from < slots_.size());
    for (std::size_t i = 0; i < chosen.size(); ++i) {
      const auto& row = rows_[i][chosen[i]];
      ev.add_fact(row.predicate, row.args, true);
    }
    for (std::size_t i = open_from; i < slots_.size(); ++i) {
      for (const auto& row : rows_[i]) ev.add_fact(row.predicate, row.args, false);
    }
    ev.run();
    NodeResult r;
    r.reading = checker_.read(ev, true);
    if (r.reading.inconsistent || !r.reading.hard.empty()) {
      ++stats_.pruned_hard;
      return r;
    }
    r.feasible = true;
    r.bound = r.reading.cost;
    return r;
  }

  bool hopeless(std::int64_t bound) const {
    if (best_.size() < query_.k) return false;
    const RankKey& worst = std::prev(best_.end())->first;
    return std::make_pair(bound, entities_) > std::make_pair(worst.cost, worst.entities);
  }

  void search(const Facts& facts) {
    slots_.clear();
    for (auto& s : open_slots(facts)) slots_.push_back(std::move(s));
    std::stable_sort(slots_.begin(), slots_.end(),
                     [](const Slot& a, const Slot& b) { return slot_priority(a.path) < slot_priority(b.path); });
    auto seed = std::make_shared<asp::Seed>(checker_.program());
    for (const auto& f : facts) seed->add_fact(to_atom(f));
    rows_.clear();
    for (const auto& slot : slots_) {
      std::vector<asp::Seed::Row> rows;
      for (const auto& c : slot.candidates) {
        auto row = seed->intern(to_atom(c));
        if (!row) throw ProgramError("candidate fact unknown to the checking program: " + to_string(c));
        rows.push_back(std::move(*row));
      }
      rows_.push_back(std::move(rows));
    }
    seed_ = std::move(seed);
    entities_ = entity_count(facts);
    fixed_ = facts;

    std::vector<std::size_t> chosen;
    NodeResult root = evaluate(chosen, 0);
    if (!root.feasible) return;
    if (slots_.empty()) {
      accept(chosen, root.reading);
      return;
    }
    if (hopeless(root.bound)) {
      ++stats_.pruned_bound;
      return;
    }
    expand(chosen);
  }

  void expand(std::vector<std::size_t>& chosen) {
    std::size_t depth = chosen.size();
    const Slot& slot = slots_[depth];
    struct Child {
      std::int64_t bound;
      std::size_t index;
      Checker::Reading reading;
    };
    std::vector<Child> children;
    for (std::size_t c = 0; c < slot.candidates.size(); ++c) {
      chosen.push_back(c);
      NodeResult r = evaluate(chosen, depth + 1);
      chosen.pop_back();
      if (r.feasible) children.push_back(Child{r.bound, c, std::move(r.reading)});
    }
    std::stable_sort(children.begin(), children.end(), [](const Child& a, const Child& b) { return a.bound < b.bound; });
    for (auto& child : children) {
      if (hopeless(child.bound)) {
        ++stats_.pruned_bound;
        continue;
      }
      chosen.push_back(child.index);
      if (depth + 1 == slots_.size()) {
        accept(chosen, child.reading);
      } else {
        expand(chosen);
      }
      chosen.pop_back();
    }
  }

  void accept(const std::vector<std::size_t>& chosen, const Checker::Reading& reading) {
    ++stats_.leaves;
    Facts all = fixed_;
    for (std::size_t i = 0; i < chosen.size(); ++i) all.push_back(slots_[i].candidates[chosen[i]]);
    CandidateModel m;
    m.facts = finish_facts(all);
    m.cost = reading.cost;
    for (std::size_t i = 0; i < checker_.soft_names().size(); ++i) m.violations[checker_.soft_names()[i]] = reading.soft[i];
    RankKey key{m.cost, entity_count(m.facts), print_facts(m.facts)};
    if (best_.size() >= query_.k && !(key < std::prev(best_.end())->first)) return;
    if (best_.count(key)) return;
    best_.emplace(std::move(key), std::move(m));
    if (best_.size() > query_.k) best_.erase(std::prev(best_.end()));
  }

  const Query& query_;
  Checker checker_;
  std::shared_ptr<const asp::CompiledProgram> generator_;
  std::vector<Mark> marks_;
  std::set<std::string> used_ids_;
  std::set<std::pair<AttributePath, std::string>> assigned_;

  // Current skeleton.
  std::vector<Slot> slots_;
  std::shared_ptr<const asp::Seed> seed_;
  std::vector<std::vector<asp::Seed::Row>> rows_;  // aligned with slots_ candidates
  Facts fixed_;
  std::size_t entities_ = 0;

  std::map<RankKey, CandidateModel> best_;
  SearchStats stats_;
};

}  // namespace detail

// The k cheapest valid completions of the query, best first.
inline std::vector<CandidateModel> complete_spec(const KnowledgeBase& kb, const Query& query,
                                                 SearchStats* stats = nullptr) {
  detail::Completer c(kb, query);
  auto out = c.run();
  if (stats) *stats = c.stats();
  return out;
}

}  // namespace draco
