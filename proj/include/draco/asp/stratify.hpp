#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "draco/asp/ast.hpp"
#include "draco/error.hpp"

namespace draco::asp {

// Predicates are identified by name and arity.
struct PredicateKey {
  std::string name;
  std::size_t arity = 0;

  std::string str() const { return name + "/" + std::to_string(arity); }
  friend auto operator<=>(const PredicateKey&, const PredicateKey&) = default;
};

inline PredicateKey key_of(const Atom& a) { return {a.predicate, a.args.size()}; }

namespace detail {

struct DependencyGraph {
  std::vector<PredicateKey> nodes;
  std::map<PredicateKey, std::size_t> index;
  // edges[from] = (to, negative): `from` depends on `to`.
  std::vector<std::vector<std::pair<std::size_t, bool>>> edges;

  std::size_t node(const PredicateKey& k) {
    auto [it, inserted] = index.try_emplace(k, nodes.size());
    if (inserted) {
      nodes.push_back(k);
      edges.emplace_back();
    }
    return it->second;
  }
};

inline DependencyGraph build_graph(const Program& program) {
  DependencyGraph g;
  for (const auto& block : program.blocks) {
    for (const auto& rule : block.rules) {
      std::vector<std::size_t> heads;
      if (const auto* h = rule.head_atom()) {
        heads.push_back(g.node(key_of(*h)));
      } else if (const auto* c = std::get_if<ChoiceHead>(&rule.head)) {
        heads.push_back(g.node(key_of(c->element)));
        std::size_t cond = g.node(key_of(c->condition));
        g.edges[heads.back()].emplace_back(cond, false);
      }
      for (const auto& lit : rule.body) {
        std::size_t dep = 0;
        bool negative = false;
        switch (lit.kind) {
          case BodyLiteral::Kind::positive: dep = g.node(key_of(lit.atom)); break;
          case BodyLiteral::Kind::negated:
            dep = g.node(key_of(lit.atom));
            negative = true;
            break;
          case BodyLiteral::Kind::cardinality:
            dep = g.node(key_of(lit.cardinality.pattern));
            negative = true;
            break;
          case BodyLiteral::Kind::comparison: continue;
        }
        for (std::size_t h : heads) g.edges[h].emplace_back(dep, negative);
      }
    }
  }
  return g;
}

// Tarjan's algorithm. Components come out dependencies-first.
inline std::vector<std::vector<std::size_t>> components(const DependencyGraph& g) {
  const std::size_t n = g.nodes.size();
  std::vector<std::size_t> order(n, SIZE_MAX), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> out;
  std::size_t counter = 0;

  // Iterative DFS frames: (node, next edge position).
  std::vector<std::pair<std::size_t, std::size_t>> frames;
  for (std::size_t root = 0; root < n; ++root) {
    if (order[root] != SIZE_MAX) continue;
    frames.emplace_back(root, 0);
    order[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!frames.empty()) {
      auto& [v, pos] = frames.back();
      if (pos < g.edges[v].size()) {
        std::size_t w = g.edges[v][pos++].first;
        if (order[w] == SIZE_MAX) {
          order[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          frames.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], order[w]);
        }
        continue;
      }
      if (low[v] == order[v]) {
        std::vector<std::size_t> comp;
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp.push_back(w);
        } while (w != v);
        std::sort(comp.begin(), comp.end(), [&](auto a, auto b) { return g.nodes[a] < g.nodes[b]; });
        out.push_back(std::move(comp));
      }
      std::size_t finished = v;
      frames.pop_back();
      if (!frames.empty()) {
        std::size_t parent = frames.back().first;
        low[parent] = std::min(low[parent], low[finished]);
      }
    }
  }
  return out;
}

// Path from `from` to `to` inside one component, for error messages.
inline std::vector<std::size_t> path_within(const DependencyGraph& g, const std::vector<std::size_t>& comp,
                                            std::size_t from, std::size_t to) {
  std::map<std::size_t, std::size_t> parent;
  std::vector<std::size_t> queue{from};
  parent[from] = from;
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    std::size_t v = queue[qi];
    if (v == to) break;
    for (auto [w, neg] : g.edges[v]) {
      if (std::find(comp.begin(), comp.end(), w) == comp.end() || parent.count(w)) continue;
      parent[w] = v;
      queue.push_back(w);
    }
  }
  std::vector<std::size_t> path;
  if (!parent.count(to)) return path;
  for (std::size_t v = to; v != from; v = parent[v]) path.push_back(v);
  path.push_back(from);
  std::reverse(path.begin(), path.end());
  return path;
}

// Components in evaluation order, rejecting negation/counting inside a cycle.
inline std::vector<std::vector<std::size_t>> checked_components(const DependencyGraph& g) {
  auto comps = components(g);
  std::vector<std::size_t> comp_of(g.nodes.size());
  for (std::size_t c = 0; c < comps.size(); ++c) {
    for (auto v : comps[c]) comp_of[v] = c;
  }
  for (std::size_t v = 0; v < g.nodes.size(); ++v) {
    for (auto [w, negative] : g.edges[v]) {
      if (!negative || comp_of[v] != comp_of[w]) continue;
      // v depends negatively on w; close the cycle w -> ... -> v.
      auto path = path_within(g, comps[comp_of[v]], w, v);
      std::string cycle = g.nodes[v].str() + " -not-> ";
      for (std::size_t i = 0; i < path.size(); ++i) {
        if (i) cycle += " -> ";
        cycle += g.nodes[path[i]].str();
      }
      throw ProgramError("program is not stratifiable: cycle through negation or counting: " + cycle);
    }
  }
  return comps;
}

}  // namespace detail

// Layers predicates so that negative and counting dependencies always point
// to a strictly lower layer. Predicates within a layer are sorted.
inline std::vector<std::vector<PredicateKey>> stratify(const Program& program) {
  auto g = detail::build_graph(program);
  auto comps = detail::checked_components(g);

  std::vector<std::size_t> level(g.nodes.size(), 0);
  std::size_t top = 0;
  for (const auto& comp : comps) {
    std::size_t lvl = 0;
    for (auto v : comp) {
      for (auto [w, negative] : g.edges[v]) {
        if (std::find(comp.begin(), comp.end(), w) != comp.end()) continue;
        lvl = std::max(lvl, level[w] + (negative ? 1 : 0));
      }
    }
    for (auto v : comp) level[v] = lvl;
    top = std::max(top, lvl);
  }

  std::vector<std::vector<PredicateKey>> strata;
  if (g.nodes.empty()) return strata;
  strata.resize(top + 1);
  for (std::size_t v = 0; v < g.nodes.size(); ++v) strata[level[v]].push_back(g.nodes[v]);
  for (auto& s : strata) std::sort(s.begin(), s.end());
  return strata;
}

}  // namespace draco::asp
