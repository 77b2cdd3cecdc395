#pragma once

// Reference algorithms used by the tests. They share no evaluation code with
// the library: only the input containers (Graph, Database, Program) are reused.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "provcirc/datalog.hpp"
#include "provcirc/grammar.hpp"
#include "provcirc/graph.hpp"
#include "provcirc/provenance.hpp"

namespace oracle {

using provcirc::Database;
using provcirc::FactVar;
using provcirc::Graph;

inline std::uint64_t edge_weight(const Database& db, const provcirc::Edge& e) {
  const auto& w = db.fact(e.var).weight;
  return w ? std::stoull(*w) : 0;
}

/// Cheapest s→t walk of length ≥ 1 (Dijkstra from the out-neighbours of s).
inline std::optional<std::uint64_t> shortest_walk(const Graph& g, const Database& db, std::size_t s, std::size_t t) {
  constexpr auto kInf = std::numeric_limits<std::uint64_t>::max();
  std::vector<std::uint64_t> dist(g.num_vertices(), kInf);
  using Item = std::pair<std::uint64_t, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  for (std::size_t e : g.out_edges(s)) {
    const auto& edge = g.edge(e);
    std::uint64_t w = edge_weight(db, edge);
    if (w < dist[edge.dst]) {
      dist[edge.dst] = w;
      pq.emplace(w, edge.dst);
    }
  }
  while (!pq.empty()) {
    auto [d, v] = pq.top();
    pq.pop();
    if (d != dist[v]) continue;
    for (std::size_t e : g.out_edges(v)) {
      const auto& edge = g.edge(e);
      std::uint64_t nd = d + edge_weight(db, edge);
      if (nd < dist[edge.dst]) {
        dist[edge.dst] = nd;
        pq.emplace(nd, edge.dst);
      }
    }
  }
  if (dist[t] == kInf) return std::nullopt;
  return dist[t];
}

/// Is there an s→t walk of length ≥ 1 (BFS)?
inline bool reachable(const Graph& g, std::size_t s, std::size_t t) {
  std::vector<bool> seen(g.num_vertices(), false);
  std::queue<std::size_t> q;
  for (std::size_t e : g.out_edges(s)) {
    std::size_t w = g.edge(e).dst;
    if (!seen[w]) {
      seen[w] = true;
      q.push(w);
    }
  }
  while (!q.empty()) {
    std::size_t v = q.front();
    q.pop();
    for (std::size_t e : g.out_edges(v)) {
      std::size_t w = g.edge(e).dst;
      if (!seen[w]) {
        seen[w] = true;
        q.push(w);
      }
    }
  }
  return seen[t];
}

/// Edge-variable sets of all simple s→t paths (simple cycles through s when
/// s = t), as a sorted list of sorted sets.
inline std::vector<std::vector<FactVar>> simple_paths(const Graph& g, std::size_t s, std::size_t t) {
  std::set<std::vector<FactVar>> out;
  std::vector<bool> on_path(g.num_vertices(), false);
  std::vector<FactVar> vars;
  std::function<void(std::size_t)> dfs = [&](std::size_t v) {
    for (std::size_t e : g.out_edges(v)) {
      const auto& edge = g.edge(e);
      vars.push_back(edge.var);
      if (edge.dst == t) {
        std::vector<FactVar> sorted = vars;
        std::sort(sorted.begin(), sorted.end());
        out.insert(sorted);
      } else if (!on_path[edge.dst] && edge.dst != s) {
        on_path[edge.dst] = true;
        dfs(edge.dst);
        on_path[edge.dst] = false;
      }
      vars.pop_back();
    }
  };
  on_path[s] = true;
  dfs(s);
  return {out.begin(), out.end()};
}

/// Monomial sets of a polynomial with all exponents 1, for comparison with
/// simple_paths; nullopt if some exponent exceeds 1.
inline std::optional<std::vector<std::vector<FactVar>>> as_sets(const provcirc::Polynomial& p) {
  std::vector<std::vector<FactVar>> out;
  for (const auto& m : p.monomials) {
    std::vector<FactVar> vars;
    for (auto [v, e] : m) {
      if (e != 1) return std::nullopt;
      vars.push_back(v);
    }
    out.push_back(vars);
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Naive evaluation by brute force: every rule is instantiated with every
/// assignment of its variables to active-domain constants, with no grounding
/// step. Values are kept in a map keyed by the printed fact. Returns the
/// valuation and the number of ICO applications until nothing changed.
struct BruteForceResult {
  std::map<std::string, provcirc::Element> values;
  std::size_t iterations = 0;
};

inline BruteForceResult brute_force_ico(const provcirc::Program& p, const Database& db,
                                        const provcirc::SemiringSpec& spec, const provcirc::Assignment& weights,
                                        std::size_t max_applications = 1000) {
  std::set<std::string> domain_set = db.constants();
  for (const auto& r : p.rules()) {
    for (const auto& a : r.body)
      for (const auto& t : a.args)
        if (!t.is_var()) domain_set.insert(t.name);
    for (const auto& t : r.head.args)
      if (!t.is_var()) domain_set.insert(t.name);
  }
  std::vector<std::string> domain(domain_set.begin(), domain_set.end());
  auto edb_value = [&](const provcirc::GroundAtom& a) -> provcirc::Element {
    auto v = db.find(a);
    return v ? weights.at(*v) : spec.zero;
  };
  BruteForceResult state;
  for (std::size_t app = 1; app <= max_applications; ++app) {
    std::map<std::string, provcirc::Element> next;
    for (const auto& rule : p.rules()) {
      std::vector<std::string> vars;
      auto collect = [&](const provcirc::Atom& a) {
        for (const auto& t : a.args)
          if (t.is_var() && std::find(vars.begin(), vars.end(), t.name) == vars.end()) vars.push_back(t.name);
      };
      collect(rule.head);
      for (const auto& a : rule.body) collect(a);
      std::vector<std::size_t> idx(vars.size(), 0);
      if (domain.empty() && !vars.empty()) continue;
      while (true) {
        std::map<std::string, std::string> bind;
        for (std::size_t i = 0; i < vars.size(); ++i) bind[vars[i]] = domain[idx[i]];
        auto inst = [&](const provcirc::Atom& a) {
          provcirc::GroundAtom g{a.predicate, {}};
          for (const auto& t : a.args) g.args.push_back(t.is_var() ? bind[t.name] : t.name);
          return g;
        };
        provcirc::Element prod = spec.one;
        for (const auto& a : rule.body) {
          provcirc::GroundAtom g = inst(a);
          provcirc::Element v = spec.zero;
          if (p.is_idb(g.predicate)) {
            auto it = state.values.find(provcirc::to_string(g));
            if (it != state.values.end()) v = it->second;
          } else {
            v = edb_value(g);
          }
          prod = spec.mul(prod, v);
        }
        std::string head = provcirc::to_string(inst(rule.head));
        auto [it, fresh] = next.emplace(head, spec.zero);
        it->second = spec.add(it->second, prod);
        std::size_t k = 0;
        while (k < idx.size() && ++idx[k] == domain.size()) idx[k++] = 0;
        if (k == idx.size()) break;
      }
    }
    std::erase_if(next, [&](const auto& kv) { return spec.is_zero(kv.second); });
    if (next == state.values) {
      state.iterations = app - 1;
      return state;
    }
    state.values = std::move(next);
  }
  state.iterations = max_applications;
  return state;
}

/// All words of length ≤ max_len derivable from the start symbol, by
/// leftmost-derivation search over sentential forms. Requires no epsilon
/// productions, so forms never shrink.
inline std::set<provcirc::Word> words_up_to(const provcirc::Grammar& g, std::size_t max_len) {
  std::set<provcirc::Word> words;
  std::set<provcirc::Word> seen;
  std::vector<provcirc::Word> stack{{g.start}};
  while (!stack.empty()) {
    provcirc::Word form = stack.back();
    stack.pop_back();
    if (form.size() > max_len || !seen.insert(form).second) continue;
    auto nt = std::find_if(form.begin(), form.end(), [&](const std::string& s) { return g.is_nonterminal(s); });
    if (nt == form.end()) {
      words.insert(form);
      continue;
    }
    for (const auto& prod : g.productions) {
      if (prod.head != *nt) continue;
      provcirc::Word next(form.begin(), nt);
      next.insert(next.end(), prod.body.begin(), prod.body.end());
      next.insert(next.end(), nt + 1, form.end());
      stack.push_back(std::move(next));
    }
  }
  return words;
}

/// Finiteness ground truth for small grammars: infinite iff some word has length
/// in (max_len/2, max_len]. Valid when the grammar's pumping length is at most
/// max_len/2, which holds for every grammar in the test corpora.
inline bool finite_by_enumeration(const provcirc::Grammar& g, std::size_t max_len = 12) {
  for (const auto& w : words_up_to(g, max_len))
    if (w.size() > max_len / 2) return false;
  return true;
}

}  // namespace oracle
