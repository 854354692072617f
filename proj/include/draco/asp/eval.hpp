#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "draco/asp/ast.hpp"
#include "draco/asp/relation.hpp"
#include "draco/asp/stratify.hpp"
#include "draco/asp/terms.hpp"
#include "draco/error.hpp"

namespace draco::asp {

namespace detail {

// A term pattern with variables resolved to binding slots.
struct Pattern {
  enum class Kind { constant, bind, check, wildcard, tuple };
  Kind kind = Kind::constant;
  TermId id = 0;
  std::uint32_t slot = 0;
  std::vector<Pattern> elems;

  // True when the value is known before matching (constant or bound vars).
  bool ground() const {
    switch (kind) {
      case Kind::constant:
      case Kind::check: return true;
      case Kind::tuple:
        for (const auto& e : elems) {
          if (!e.ground()) return false;
        }
        return true;
      default: return false;
    }
  }
};

struct CompiledAtom {
  std::size_t predicate = 0;
  std::vector<Pattern> args;
  int key_column = -1;  // column used for index lookup, -1 = full scan
};

struct CompiledLiteral {
  BodyLiteral::Kind kind = BodyLiteral::Kind::positive;
  CompiledAtom atom;  // positive, negated, cardinality pattern
  CompareOp op = CompareOp::eq;
  Pattern lhs, rhs;  // comparison
  std::int64_t bound = 0;
};

struct CompiledRule {
  enum class Kind { normal, constraint, choice };
  Kind kind = Kind::normal;
  CompiledAtom head;
  // Choice rules: condition matched after the body, element built from the
  // full binding, probe = element with condition-local variables wildcarded.
  CompiledAtom condition;
  CompiledAtom probe;
  std::vector<CompiledLiteral> plan;
  std::size_t slots = 0;
  std::string text;
};

struct Stratum {
  std::vector<std::size_t> rules;
  bool recursive = false;
};

}  // namespace detail

// A program lowered for evaluation: predicates numbered, constants interned,
// rule bodies reordered for joins, and rules grouped into strata.
class CompiledProgram {
 public:
  const TermStore& terms() const { return terms_; }
  const std::vector<PredicateKey>& predicates() const { return predicates_; }
  std::optional<std::size_t> predicate(const std::string& name, std::size_t arity) const {
    auto it = pred_index_.find(PredicateKey{name, arity});
    if (it == pred_index_.end()) return std::nullopt;
    return it->second;
  }
  bool has_choice_rules() const { return !choice_rules_.empty(); }

  static std::shared_ptr<const CompiledProgram> compile(const Program& program) {
    auto out = std::shared_ptr<CompiledProgram>(new CompiledProgram());
    out->build(program);
    return out;
  }

 private:
  friend class Evaluation;

  CompiledProgram() = default;

  std::size_t pred_id(const Atom& a) {
    auto [it, inserted] = pred_index_.try_emplace(key_of(a), predicates_.size());
    if (inserted) predicates_.push_back(key_of(a));
    return it->second;
  }

  void build(const Program& program) {
    auto graph = detail::build_graph(program);
    auto comps = detail::checked_components(graph);

    // Predicate ids follow the dependency order, which keeps ids stable.
    for (const auto& comp : comps) {
      for (auto v : comp) {
        auto [it, inserted] = pred_index_.try_emplace(graph.nodes[v], predicates_.size());
        if (inserted) predicates_.push_back(graph.nodes[v]);
      }
    }
    std::vector<std::size_t> comp_of_pred(predicates_.size());
    for (std::size_t c = 0; c < comps.size(); ++c) {
      for (auto v : comps[c]) comp_of_pred[pred_index_.at(graph.nodes[v])] = c;
    }
    strata_.resize(comps.size());
    for (std::size_t c = 0; c < comps.size(); ++c) {
      const auto& comp = comps[c];
      bool recursive = comp.size() > 1;
      if (!recursive) {
        for (auto [w, neg] : graph.edges[comp.front()]) recursive = recursive || w == comp.front();
      }
      strata_[c].recursive = recursive;
    }

    for (const auto& block : program.blocks) {
      for (const auto& rule : block.rules) {
        if (rule.is_fact()) {
          add_fact(*rule.head_atom());
          continue;
        }
        detail::CompiledRule cr = compile_rule(rule);
        std::size_t index = rules_.size();
        switch (cr.kind) {
          case detail::CompiledRule::Kind::normal:
            strata_[comp_of_pred[cr.head.predicate]].rules.push_back(index);
            break;
          case detail::CompiledRule::Kind::constraint: constraints_.push_back(index); break;
          case detail::CompiledRule::Kind::choice: choice_rules_.push_back(index); break;
        }
        rules_.push_back(std::move(cr));
      }
    }
  }

  static void expand_pools(const Term& t, std::vector<Term>& out) {
    if (t.kind == Term::Kind::pool) {
      for (const auto& alt : t.args) expand_pools(alt, out);
      return;
    }
    if (t.kind == Term::Kind::tuple) {
      std::vector<std::vector<Term>> options(1);
      for (const auto& e : t.args) {
        std::vector<Term> alts;
        expand_pools(e, alts);
        std::vector<std::vector<Term>> next;
        for (const auto& prefix : options) {
          for (const auto& a : alts) {
            auto p = prefix;
            p.push_back(a);
            next.push_back(std::move(p));
          }
        }
        options = std::move(next);
      }
      for (auto& o : options) out.push_back(Term::tuple(std::move(o)));
      return;
    }
    out.push_back(t);
  }

  void add_fact(const Atom& atom) {
    if (!atom.is_ground()) throw ProgramError("fact is not ground: " + to_string(atom));
    std::vector<std::vector<TermId>> rows(1);
    for (const auto& arg : atom.args) {
      std::vector<Term> alts;
      expand_pools(arg, alts);
      std::vector<std::vector<TermId>> next;
      for (const auto& prefix : rows) {
        for (const auto& a : alts) {
          auto r = prefix;
          r.push_back(terms_.intern(a));
          next.push_back(std::move(r));
        }
      }
      rows = std::move(next);
    }
    std::size_t p = pred_id(atom);
    if (facts_.size() <= p) facts_.resize(p + 1);
    for (auto& r : rows) facts_[p].push_back(std::move(r));
  }

  struct SlotMap {
    std::map<std::string, std::uint32_t> slots;
    std::set<std::string> bound;
  };

  detail::Pattern pattern(const Term& t, SlotMap& vars, bool binding) {
    detail::Pattern p;
    switch (t.kind) {
      case Term::Kind::variable: {
        auto [it, inserted] = vars.slots.try_emplace(t.text, static_cast<std::uint32_t>(vars.slots.size()));
        p.slot = it->second;
        if (vars.bound.count(t.text)) {
          p.kind = detail::Pattern::Kind::check;
        } else if (binding) {
          p.kind = detail::Pattern::Kind::bind;
          vars.bound.insert(t.text);
        } else {
          p.kind = detail::Pattern::Kind::wildcard;
        }
        return p;
      }
      case Term::Kind::anonymous: p.kind = detail::Pattern::Kind::wildcard; return p;
      case Term::Kind::tuple: {
        p.kind = detail::Pattern::Kind::tuple;
        bool all_const = true;
        for (const auto& e : t.args) {
          p.elems.push_back(pattern(e, vars, binding));
          all_const = all_const && p.elems.back().kind == detail::Pattern::Kind::constant;
        }
        if (all_const) {
          p.kind = detail::Pattern::Kind::constant;
          p.id = terms_.intern(t);
          p.elems.clear();
        }
        return p;
      }
      case Term::Kind::pool: throw ProgramError("pools are only allowed in facts");
      default:
        p.kind = detail::Pattern::Kind::constant;
        p.id = terms_.intern(t);
        return p;
    }
  }

  detail::CompiledAtom compile_atom(const Atom& a, SlotMap& vars, bool binding) {
    detail::CompiledAtom ca;
    ca.predicate = pred_id(a);
    // Key column is chosen before this atom binds anything.
    for (std::size_t i = 0; i < a.args.size() && ca.key_column < 0; ++i) {
      SlotMap probe = vars;
      if (pattern(a.args[i], probe, false).ground()) ca.key_column = static_cast<int>(i);
    }
    for (const auto& t : a.args) ca.args.push_back(pattern(t, vars, binding));
    return ca;
  }

  static std::set<std::string> vars_of(const Atom& a) {
    std::set<std::string> v;
    collect_variables(a, v);
    return v;
  }

  detail::CompiledRule compile_rule(const Rule& rule) {
    detail::CompiledRule cr;
    cr.text = to_string(rule);
    SlotMap vars;

    std::set<std::string> positive_vars;
    for (const auto& lit : rule.body) {
      if (lit.kind == BodyLiteral::Kind::positive) collect_variables(lit.atom, positive_vars);
    }

    std::vector<bool> placed(rule.body.size(), false);
    auto ready = [&](const BodyLiteral& lit) {
      std::set<std::string> need;
      switch (lit.kind) {
        case BodyLiteral::Kind::negated: collect_variables(lit.atom, need); break;
        case BodyLiteral::Kind::comparison:
          collect_variables(lit.comparison.lhs, need);
          collect_variables(lit.comparison.rhs, need);
          break;
        case BodyLiteral::Kind::cardinality:
          // Only variables shared with positive atoms are global.
          for (const auto& v : vars_of(lit.cardinality.pattern)) {
            if (positive_vars.count(v)) need.insert(v);
          }
          break;
        default: return false;
      }
      for (const auto& v : need) {
        if (!vars.bound.count(v)) return false;
      }
      return true;
    };
    auto place_ready = [&] {
      for (std::size_t i = 0; i < rule.body.size(); ++i) {
        if (placed[i] || rule.body[i].kind == BodyLiteral::Kind::positive || !ready(rule.body[i])) continue;
        placed[i] = true;
        const auto& lit = rule.body[i];
        detail::CompiledLiteral cl;
        cl.kind = lit.kind;
        if (lit.kind == BodyLiteral::Kind::negated) {
          cl.atom = compile_atom(lit.atom, vars, false);
        } else if (lit.kind == BodyLiteral::Kind::comparison) {
          cl.op = lit.comparison.op;
          cl.lhs = pattern(lit.comparison.lhs, vars, false);
          cl.rhs = pattern(lit.comparison.rhs, vars, false);
          if (!cl.lhs.ground() || !cl.rhs.ground()) {
            throw EvalError("non-ground comparison in rule " + cr.text);
          }
        } else {
          // Local variables bind inside the count and are forgotten after.
          SlotMap local = vars;
          cl.atom = compile_atom(lit.cardinality.pattern, local, true);
          vars.slots = local.slots;
          cl.op = lit.cardinality.op;
          cl.bound = lit.cardinality.bound;
        }
        cr.plan.push_back(std::move(cl));
      }
    };

    place_ready();
    while (true) {
      int best = -1;
      int best_score = -1;
      for (std::size_t i = 0; i < rule.body.size(); ++i) {
        if (placed[i] || rule.body[i].kind != BodyLiteral::Kind::positive) continue;
        int score = 0;
        for (const auto& t : rule.body[i].atom.args) {
          SlotMap probe = vars;
          if (pattern(t, probe, false).ground()) ++score;
        }
        if (score > best_score) {
          best_score = score;
          best = static_cast<int>(i);
        }
      }
      if (best < 0) break;
      placed[best] = true;
      detail::CompiledLiteral cl;
      cl.kind = BodyLiteral::Kind::positive;
      cl.atom = compile_atom(rule.body[best].atom, vars, true);
      cr.plan.push_back(std::move(cl));
      place_ready();
    }
    for (std::size_t i = 0; i < rule.body.size(); ++i) {
      if (!placed[i]) throw ProgramError("unsafe rule: " + cr.text);
    }

    if (const auto* head = rule.head_atom()) {
      cr.kind = detail::CompiledRule::Kind::normal;
      cr.head = compile_atom(*head, vars, false);
    } else if (const auto* choice = std::get_if<ChoiceHead>(&rule.head)) {
      cr.kind = detail::CompiledRule::Kind::choice;
      SlotMap probe_vars = vars;
      cr.probe = compile_atom(choice->element, probe_vars, false);
      cr.condition = compile_atom(choice->condition, vars, true);
      cr.head = compile_atom(choice->element, vars, false);
    } else {
      cr.kind = detail::CompiledRule::Kind::constraint;
    }
    cr.slots = vars.slots.size();
    return cr;
  }

  TermStore terms_;
  std::vector<PredicateKey> predicates_;
  std::map<PredicateKey, std::size_t> pred_index_;
  std::vector<std::vector<std::vector<TermId>>> facts_;  // per predicate
  std::vector<detail::CompiledRule> rules_;
  std::vector<detail::Stratum> strata_;
  std::vector<std::size_t> constraints_;
  std::vector<std::size_t> choice_rules_;
};

// One ground instance of a choice rule: exactly one of `candidates` must be
// chosen. `satisfied` is set when the facts already contain an atom matching
// the element, in which case the generator leaves the slot alone.
struct ChoiceSlot {
  Atom element;  // the element with condition-local variables as `_`
  std::vector<Atom> candidates;
  bool satisfied = false;
};

// Base facts and their terms, interned once and shared by many evaluations
// of the same program. Intern everything before the first evaluation is
// created: evaluations number their own terms after the seed's.
class Seed {
 public:
  struct Row {
    std::size_t predicate;
    std::vector<TermId> args;
  };

  explicit Seed(std::shared_ptr<const CompiledProgram> program)
      : program_{std::move(program)}, store_{&program_->terms()} {}

  const std::shared_ptr<const CompiledProgram>& program() const { return program_; }
  const TermStore& terms() const { return store_; }
  const std::vector<Row>& facts() const { return facts_; }

  // Nullopt when no rule of the program mentions the predicate.
  std::optional<Row> intern(const Atom& atom) {
    if (!atom.is_ground()) throw EvalError("base fact is not ground: " + to_string(atom));
    auto pred = program_->predicate(atom.predicate, atom.args.size());
    if (!pred) return std::nullopt;
    Row row{*pred, {}};
    for (const auto& t : atom.args) {
      if (t.has_pool()) throw EvalError("base fact contains a pool: " + to_string(atom));
      row.args.push_back(store_.intern(t));
    }
    return row;
  }

  void add_fact(const Atom& atom) {
    if (auto row = intern(atom)) facts_.push_back(std::move(*row));
  }

 private:
  std::shared_ptr<const CompiledProgram> program_;
  TermStore store_;
  std::vector<Row> facts_;
};

// Bottom-up evaluation of a compiled program over a set of base facts.
//
// In three-valued mode every base fact is either certain or merely possible.
// Two models are computed: `certain` holds atoms true in every completion,
// `possible` atoms true in at least one. Negation and counting read the
// opposite bound of the lower stratum, so certain is a subset of the model of
// any completion, which in turn is a subset of possible.
class Evaluation {
 public:
  explicit Evaluation(std::shared_ptr<const CompiledProgram> program, bool three_valued = false)
      : Evaluation(std::move(program), nullptr, three_valued) {}

 private:
  Evaluation(std::shared_ptr<const CompiledProgram> program, const TermStore* parent, bool three_valued)
      : program_{std::move(program)}, store_{parent ? parent : &program_->terms()}, three_valued_{three_valued} {
    lower_.reserve(program_->predicates().size());
    for (const auto& p : program_->predicates()) lower_.emplace_back(p.arity);
    if (three_valued_) {
      upper_.reserve(program_->predicates().size());
      for (const auto& p : program_->predicates()) upper_.emplace_back(p.arity);
    }
  }

 public:

  // Starts from a seed's facts, which are certain.
  explicit Evaluation(std::shared_ptr<const Seed> seed, bool three_valued = false)
      : Evaluation(seed->program(), &seed->terms(), three_valued) {
    seed_ = std::move(seed);
  }

  TermStore& terms() { return store_; }
  const TermStore& terms() const { return store_; }
  const CompiledProgram& program() const { return *program_; }

  // Predicate id, creating a data-only predicate when the program has none.
  std::size_t predicate(const std::string& name, std::size_t arity) {
    if (auto id = find_predicate(name, arity)) return *id;
    std::size_t id = lower_.size();
    extra_preds_.emplace(PredicateKey{name, arity}, id);
    extra_keys_.push_back(PredicateKey{name, arity});
    lower_.emplace_back(arity);
    if (three_valued_) upper_.emplace_back(arity);
    return id;
  }

  std::optional<std::size_t> find_predicate(const std::string& name, std::size_t arity) const {
    if (auto id = program_->predicate(name, arity)) return id;
    auto it = extra_preds_.find(PredicateKey{name, arity});
    if (it == extra_preds_.end()) return std::nullopt;
    return it->second;
  }

  const PredicateKey& predicate_key(std::size_t pred) const {
    std::size_t n = program_->predicates().size();
    return pred < n ? program_->predicates()[pred] : extra_keys_[pred - n];
  }

  std::size_t predicate_count() const { return lower_.size(); }

  void add_fact(std::size_t pred, std::span<const TermId> row, bool certain = true) {
    if (certain) lower_[pred].insert(row);
    if (three_valued_) upper_[pred].insert(row);
  }

  void add_fact(const Atom& atom, bool certain = true) {
    if (!atom.is_ground()) throw EvalError("base fact is not ground: " + to_string(atom));
    std::vector<TermId> row;
    row.reserve(atom.args.size());
    for (const auto& t : atom.args) {
      if (t.has_pool()) throw EvalError("base fact contains a pool: " + to_string(atom));
      row.push_back(store_.intern(t));
    }
    add_fact(predicate(atom.predicate, atom.args.size()), row, certain);
  }

  void run() {
    for (std::size_t p = 0; p < program_->facts_.size(); ++p) {
      for (const auto& row : program_->facts_[p]) add_fact(p, row, true);
    }
    if (seed_) {
      for (const auto& row : seed_->facts()) add_fact(row.predicate, row.args, true);
    }
    for (const auto& stratum : program_->strata_) {
      solve_stratum(stratum, Mode::lower);
      if (three_valued_) solve_stratum(stratum, Mode::upper);
    }
    inconsistent_ = false;
    for (std::size_t r : program_->constraints_) {
      const auto& rule = program_->rules_[r];
      std::vector<TermId> binding(rule.slots);
      bool hit = false;
      join(rule, 0, binding, Mode::lower, [&] {
        hit = true;
        return false;
      });
      if (hit) {
        inconsistent_ = true;
        break;
      }
    }
    ran_ = true;
  }

  // Integrity constraint violated (certainly, in three-valued mode).
  bool inconsistent() const { return inconsistent_; }

  const Relation& certain(std::size_t pred) const { return lower_[pred]; }
  const Relation& possible(std::size_t pred) const { return three_valued_ ? upper_[pred] : lower_[pred]; }

  bool contains(const Atom& atom) const {
    auto pred = find_predicate(atom.predicate, atom.args.size());
    if (!pred) return false;
    std::vector<TermId> row;
    for (const auto& t : atom.args) {
      auto id = store_.find(t);
      if (!id) return false;
      row.push_back(*id);
    }
    return lower_[*pred].contains(row);
  }

  Atom to_atom(std::size_t pred, std::span<const TermId> row) const {
    Atom a;
    a.predicate = predicate_key(pred).name;
    for (TermId id : row) a.args.push_back(store_.to_term(id));
    return a;
  }

  // Every certain atom, sorted.
  std::vector<Atom> atoms() const {
    std::vector<Atom> out;
    for (std::size_t p = 0; p < lower_.size(); ++p) {
      for (std::size_t i = 0; i < lower_[p].size(); ++i) out.push_back(to_atom(p, lower_[p].row(i)));
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  // Distinct certain atoms `predicate(name, ...)` of any arity >= 1.
  std::size_t count_derivations(const std::string& predicate, const Term& name) const {
    auto id = store_.find(name);
    if (!id) return 0;
    std::size_t n = 0;
    for (std::size_t p = 0; p < lower_.size(); ++p) {
      const auto& key = predicate_key(p);
      if (key.name != predicate || key.arity == 0) continue;
      n += lower_[p].count(0, *id);
    }
    return n;
  }

  // Ground instances of the program's choice rules over the certain model.
  std::vector<ChoiceSlot> choices() const {
    std::vector<ChoiceSlot> out;
    std::set<std::string> seen;
    auto& self = const_cast<Evaluation&>(*this);
    for (std::size_t r : program_->choice_rules_) {
      const auto& rule = program_->rules_[r];
      std::vector<TermId> binding(rule.slots);
      self.join(rule, 0, binding, Mode::lower, [&] {
        ChoiceSlot slot;
        slot.element = probe_atom(rule.probe, binding);
        std::string key = std::to_string(r) + ":" + to_string(slot.element);
        if (!seen.insert(key).second) return true;
        slot.satisfied = self.any_match(rule.probe, binding, Mode::lower);
        std::set<std::vector<TermId>> rows;
        self.for_each_match(rule.condition, binding, Mode::lower, [&] {
          std::vector<TermId> row;
          for (const auto& p : rule.head.args) row.push_back(self.build(p, binding));
          rows.insert(std::move(row));
          return true;
        });
        for (const auto& row : rows) {
          Atom a;
          a.predicate = program_->predicates()[rule.head.predicate].name;
          for (TermId id : row) a.args.push_back(store_.to_term(id));
          slot.candidates.push_back(std::move(a));
        }
        std::sort(slot.candidates.begin(), slot.candidates.end(), [&](const Atom& x, const Atom& y) {
          return x < y;
        });
        out.push_back(std::move(slot));
        return true;
      });
    }
    return out;
  }

 private:
  enum class Mode { lower, upper };

  std::vector<Relation>& db(Mode m) { return (m == Mode::lower || !three_valued_) ? lower_ : upper_; }
  std::vector<Relation>& other(Mode m) { return (m == Mode::lower && three_valued_) ? upper_ : lower_; }

  Atom probe_atom(const detail::CompiledAtom& atom, const std::vector<TermId>& binding) const {
    Atom a;
    a.predicate = program_->predicates()[atom.predicate].name;
    for (const auto& p : atom.args) a.args.push_back(probe_term(p, binding));
    return a;
  }

  Term probe_term(const detail::Pattern& p, const std::vector<TermId>& binding) const {
    switch (p.kind) {
      case detail::Pattern::Kind::constant: return store_.to_term(p.id);
      case detail::Pattern::Kind::check: return store_.to_term(binding[p.slot]);
      case detail::Pattern::Kind::tuple: {
        std::vector<Term> elems;
        for (const auto& e : p.elems) elems.push_back(probe_term(e, binding));
        return Term::tuple(std::move(elems));
      }
      default: return Term::anonymous();
    }
  }

  void solve_stratum(const detail::Stratum& stratum, Mode mode) {
    // Derived rows are buffered flat and inserted after the join finishes.
    std::vector<TermId> pending;
    std::vector<TermId> binding;
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t r : stratum.rules) {
        const auto& rule = program_->rules_[r];
        binding.assign(rule.slots, 0);
        pending.clear();
        std::size_t derived = 0;
        join(rule, 0, binding, mode, [&] {
          for (const auto& p : rule.head.args) pending.push_back(build(p, binding));
          ++derived;
          return true;
        });
        std::size_t arity = rule.head.args.size();
        Relation& rel = db(mode)[rule.head.predicate];
        if (arity == 0) {
          if (derived > 0 && rel.insert({})) changed = true;
          continue;
        }
        for (std::size_t i = 0; i < pending.size(); i += arity) {
          if (rel.insert(std::span<const TermId>(pending.data() + i, arity))) changed = true;
        }
      }
      if (!stratum.recursive) break;
    }
  }

  TermId build(const detail::Pattern& p, const std::vector<TermId>& binding) {
    switch (p.kind) {
      case detail::Pattern::Kind::constant: return p.id;
      case detail::Pattern::Kind::check:
      case detail::Pattern::Kind::bind: return binding[p.slot];
      case detail::Pattern::Kind::tuple: {
        std::vector<TermId> elems;
        elems.reserve(p.elems.size());
        for (const auto& e : p.elems) elems.push_back(build(e, binding));
        return store_.tuple(std::move(elems));
      }
      default: throw EvalError("cannot build a wildcard term");
    }
  }

  // Value of a ground pattern without interning; nullopt if the tuple is unknown.
  std::optional<TermId> value_of(const detail::Pattern& p, const std::vector<TermId>& binding) const {
    switch (p.kind) {
      case detail::Pattern::Kind::constant: return p.id;
      case detail::Pattern::Kind::check:
      case detail::Pattern::Kind::bind: return binding[p.slot];
      case detail::Pattern::Kind::tuple: {
        std::vector<TermId> elems;
        elems.reserve(p.elems.size());
        for (const auto& e : p.elems) {
          auto v = value_of(e, binding);
          if (!v) return std::nullopt;
          elems.push_back(*v);
        }
        return store_.find_tuple(elems);
      }
      default: return std::nullopt;
    }
  }

  bool match(const detail::Pattern& p, TermId value, std::vector<TermId>& binding) const {
    switch (p.kind) {
      case detail::Pattern::Kind::constant: return p.id == value;
      case detail::Pattern::Kind::check: return binding[p.slot] == value;
      case detail::Pattern::Kind::bind: binding[p.slot] = value; return true;
      case detail::Pattern::Kind::wildcard: return true;
      case detail::Pattern::Kind::tuple: {
        const auto& e = store_.get(value);
        if (e.kind != Term::Kind::tuple || e.elems.size() != p.elems.size()) return false;
        for (std::size_t i = 0; i < p.elems.size(); ++i) {
          if (!match(p.elems[i], e.elems[i], binding)) return false;
        }
        return true;
      }
    }
    return false;
  }

  bool match_row(const detail::CompiledAtom& atom, std::span<const TermId> row, std::vector<TermId>& binding) const {
    for (std::size_t i = 0; i < atom.args.size(); ++i) {
      if (!match(atom.args[i], row[i], binding)) return false;
    }
    return true;
  }

  // Calls `f` for every row of `atom` in the given model that matches;
  // `f` returns false to stop. Returns false if stopped.
  template <typename F>
  bool for_each_match(const detail::CompiledAtom& atom, std::vector<TermId>& binding, Mode mode, F&& f) {
    const Relation& rel = db(mode)[atom.predicate];
    if (rel.empty()) return true;
    if (atom.key_column >= 0) {
      auto key = value_of(atom.args[atom.key_column], binding);
      if (!key) return true;
      return rel.for_each_row(static_cast<std::size_t>(atom.key_column), *key,
                              [&](std::uint32_t i) { return !match_row(atom, rel.row(i), binding) || f(); });
    }
    for (std::size_t i = 0; i < rel.size(); ++i) {
      if (match_row(atom, rel.row(i), binding) && !f()) return false;
    }
    return true;
  }

  bool any_match(const detail::CompiledAtom& atom, std::vector<TermId>& binding, Mode mode) {
    bool found = false;
    for_each_match(atom, binding, mode, [&] {
      found = true;
      return false;
    });
    return found;
  }

  std::size_t count_matches(const detail::CompiledAtom& atom, std::vector<TermId>& binding, Mode mode) {
    std::size_t n = 0;
    for_each_match(atom, binding, mode, [&] {
      ++n;
      return true;
    });
    return n;
  }

  static bool holds(CompareOp op, std::size_t count, std::int64_t bound) {
    return apply_op(op, static_cast<std::int64_t>(count), bound);
  }

  // Cardinality literal under interval counts [lo, hi].
  static bool card_certain(CompareOp op, std::int64_t lo, std::int64_t hi, std::int64_t b) {
    switch (op) {
      case CompareOp::le: return hi <= b;
      case CompareOp::lt: return hi < b;
      case CompareOp::ge: return lo >= b;
      case CompareOp::gt: return lo > b;
      case CompareOp::eq: return lo == b && hi == b;
      case CompareOp::ne: return b < lo || b > hi;
    }
    return false;
  }
  static bool card_possible(CompareOp op, std::int64_t lo, std::int64_t hi, std::int64_t b) {
    switch (op) {
      case CompareOp::le: return lo <= b;
      case CompareOp::lt: return lo < b;
      case CompareOp::ge: return hi >= b;
      case CompareOp::gt: return hi > b;
      case CompareOp::eq: return lo <= b && b <= hi;
      case CompareOp::ne: return !(lo == b && hi == b);
    }
    return false;
  }

  template <typename F>
  bool join(const detail::CompiledRule& rule, std::size_t step, std::vector<TermId>& binding, Mode mode, F&& emit) {
    if (step == rule.plan.size()) return emit();
    const auto& lit = rule.plan[step];
    switch (lit.kind) {
      case BodyLiteral::Kind::positive:
        return for_each_match(lit.atom, binding, mode, [&] { return join(rule, step + 1, binding, mode, emit); });
      case BodyLiteral::Kind::negated: {
        // Certain: absent even from the possible model; possible: not certain.
        Mode against = (mode == Mode::lower) ? Mode::upper : Mode::lower;
        if (any_match(lit.atom, binding, against)) return true;
        return join(rule, step + 1, binding, mode, emit);
      }
      case BodyLiteral::Kind::comparison: {
        TermId l = build(lit.lhs, binding);
        TermId r = build(lit.rhs, binding);
        if (!apply_op(lit.op, store_.compare(l, r), 0)) return true;
        return join(rule, step + 1, binding, mode, emit);
      }
      case BodyLiteral::Kind::cardinality: {
        std::int64_t lo = static_cast<std::int64_t>(count_matches(lit.atom, binding, Mode::lower));
        std::int64_t hi = three_valued_ ? static_cast<std::int64_t>(count_matches(lit.atom, binding, Mode::upper)) : lo;
        bool ok = (mode == Mode::lower) ? card_certain(lit.op, lo, hi, lit.bound)
                                        : card_possible(lit.op, lo, hi, lit.bound);
        if (!ok) return true;
        return join(rule, step + 1, binding, mode, emit);
      }
    }
    return true;
  }

  std::shared_ptr<const CompiledProgram> program_;
  std::shared_ptr<const Seed> seed_;
  TermStore store_;
  bool three_valued_;
  std::vector<Relation> lower_;
  std::vector<Relation> upper_;
  std::map<PredicateKey, std::size_t> extra_preds_;
  std::vector<PredicateKey> extra_keys_;
  bool inconsistent_ = false;
  bool ran_ = false;
};

struct DerivedModel {
  std::vector<Atom> atoms;  // sorted, distinct
  bool inconsistent = false;

  bool contains(const Atom& a) const { return std::binary_search(atoms.begin(), atoms.end(), a); }
};

// Least model of a stratified, choice-free program over `base_facts`.
inline DerivedModel evaluate(const std::shared_ptr<const CompiledProgram>& program, const std::vector<Atom>& base_facts) {
  if (program->has_choice_rules()) {
    throw EvalError("choice rules cannot be evaluated directly; they belong to the generator");
  }
  Evaluation ev(program);
  for (const auto& f : base_facts) ev.add_fact(f);
  ev.run();
  return DerivedModel{ev.atoms(), ev.inconsistent()};
}

inline DerivedModel evaluate(const Program& program, const std::vector<Atom>& base_facts) {
  return evaluate(CompiledProgram::compile(program), base_facts);
}

// Number of distinct `predicate(name, ...)` atoms in the model, where
// `predicate(name)` itself counts as one.
inline std::size_t count_derivations(const DerivedModel& model, const std::string& predicate, const Term& name) {
  std::size_t n = 0;
  for (const auto& a : model.atoms) {
    if (a.predicate == predicate && !a.args.empty() && a.args.front() == name) ++n;
  }
  return n;
}

}  // namespace draco::asp
