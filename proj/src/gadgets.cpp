#include "provcirc/gadgets.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "provcirc/error.hpp"
#include "provcirc/provenance.hpp"

namespace provcirc {

namespace {

/// Adds a path spelling `word` from `from` through fresh vertices `{tag}1..`;
/// the last vertex is `to` when given. Returns the end vertex and the edge facts.
std::pair<std::string, std::vector<FactVar>> add_path(GraphInstance& inst, const std::string& from, const Word& word,
                                                      const std::string& tag,
                                                      const std::optional<std::string>& to = std::nullopt) {
  std::string at = from;
  std::vector<FactVar> facts;
  for (std::size_t i = 0; i < word.size(); ++i) {
    std::string next = i + 1 == word.size() && to ? *to : tag + std::to_string(i + 1);
    std::size_t before = inst.db.size();
    inst.add_edge(at, next, word[i]);
    if (inst.db.size() == before) {
      fail(ErrorCode::InvalidDecomposition, "expanded edge " + word[i] + "(" + at + "," + next + ") would repeat");
    }
    facts.push_back(static_cast<FactVar>(inst.db.size() - 1));
    at = next;
  }
  return {at, facts};
}

/// Prefix path ending in s; returns s̄.
std::string add_prefix(ExpandedInstance& out, const Word& prefix, const std::string& s) {
  if (prefix.empty()) return s;
  out.instance.graph.vertex("~p0");
  auto [end, facts] = add_path(out.instance, "~p0", prefix, "~p", s);
  out.ones.insert(out.ones.end(), facts.begin(), facts.end());
  return "~p0";
}

ExpandedInstance expand_edges(const GraphInstance& original, std::size_t s, std::size_t t, const Word& prefix,
                              const Word& per_edge, const Word& suffix) {
  const Graph& g = original.graph;
  ExpandedInstance out;
  for (std::size_t v = 0; v < g.num_vertices(); ++v) out.instance.graph.vertex(g.name(v));
  out.s_bar = add_prefix(out, prefix, g.name(s));
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    const Edge& edge = g.edge(e);
    auto [end, facts] =
        add_path(out.instance, g.name(edge.src), per_edge, "~e" + std::to_string(e) + "_", g.name(edge.dst));
    out.edge_map[edge.var] = facts.front();
    out.ones.insert(out.ones.end(), facts.begin() + 1, facts.end());
  }
  auto [end, facts] = add_path(out.instance, g.name(t), suffix, "~q");
  out.ones.insert(out.ones.end(), facts.begin(), facts.end());
  out.t_bar = end;
  return out;
}

Word repeat(const Word& w, std::size_t times) {
  Word out;
  for (std::size_t i = 0; i < times; ++i) out.insert(out.end(), w.begin(), w.end());
  return out;
}

Word join(std::initializer_list<Word> parts) {
  Word out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

}  // namespace

ExpandedInstance expand_instance_regular(const GraphInstance& original, std::size_t s, std::size_t t,
                                         const RegularDecomposition& d) {
  if (d.y.empty()) fail(ErrorCode::InvalidDecomposition, "the pumped segment y is empty");
  return expand_edges(original, s, t, d.x, d.y, d.z);
}

ExpandedInstance expand_instance_cfg(const GraphInstance& original, std::size_t s, std::size_t t,
                                     const CfgDecomposition& d) {
  if (d.v.empty()) fail(ErrorCode::VEmpty, "v is empty; use a regular decomposition instead");
  std::vector<std::optional<long>> level;
  try {
    level = layer_levels(original.graph, s);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotLayered) throw;
    fail(ErrorCode::InvalidDecomposition, std::string("input graph is not layered: ") + e.what());
  }
  std::size_t path_len = level.at(t) && *level[t] > 0 ? static_cast<std::size_t>(*level[t]) : 0;
  return expand_edges(original, s, t, join({d.u, d.v}), d.v, join({d.w, repeat(d.x, path_len + 1), d.y}));
}

// ---------------------------------------------------------------------------
// Conjunctive query gadgets

namespace {

void check_gadget(const ConjunctiveQuery& q, const char* which) {
  if (q.head.args.size() != 2 || !q.head.args[0].is_var() || !q.head.args[1].is_var()) {
    fail(ErrorCode::InvalidArgument, std::string(which) + " needs a head with two variables");
  }
  if (q.body.empty()) fail(ErrorCode::DisconnectedCQ, std::string(which) + " has an empty body");
  std::map<std::string, std::string> parent;
  std::function<std::string(const std::string&)> find = [&](const std::string& v) -> std::string {
    auto it = parent.find(v);
    if (it == parent.end() || it->second == v) {
      parent[v] = v;
      return v;
    }
    return it->second = find(it->second);
  };
  for (const auto& a : q.body) {
    std::string first;
    for (const auto& t : a.args) {
      if (!t.is_var()) continue;
      if (first.empty()) {
        first = find(t.name);
      } else {
        parent[find(t.name)] = first;
      }
    }
  }
  std::set<std::string> roots;
  for (const auto& [v, p] : parent) roots.insert(find(v));
  bool heads_present = parent.contains(q.head.args[0].name) && parent.contains(q.head.args[1].name);
  if (roots.size() != 1 || !heads_present) {
    fail(ErrorCode::DisconnectedCQ, std::string(which) + " is not connected through its head variables");
  }
}

}  // namespace

GadgetInstance expand_instance_cq_gadgets(const GraphInstance& original, std::size_t s, std::size_t t,
                                          const ConjunctiveQuery& cx, const ConjunctiveQuery& cy,
                                          const ConjunctiveQuery& czu) {
  check_gadget(cx, "Cx");
  check_gadget(cy, "Cy");
  check_gadget(czu, "Czu");
  const Graph& g = original.graph;
  GadgetInstance out;
  out.target = g.name(s);
  std::set<FactVar> designated;
  std::set<FactVar> ones;
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    const Edge& edge = g.edge(e);
    const ConjunctiveQuery& q = edge.src == s ? cx : (edge.dst == t ? czu : cy);
    std::map<std::string, std::string> binding{{q.head.args[0].name, g.name(edge.src)}};
    binding.emplace(q.head.args[1].name, g.name(edge.dst));
    for (std::size_t i = 0; i < q.body.size(); ++i) {
      GroundAtom fact{q.body[i].predicate, {}};
      for (const auto& term : q.body[i].args) {
        if (!term.is_var()) {
          fact.args.push_back(term.name);
          continue;
        }
        auto [it, inserted] = binding.emplace(term.name, "");
        if (inserted) it->second = "~g" + std::to_string(e) + "_" + term.name;
        fact.args.push_back(it->second);
      }
      FactVar var = out.db.add(std::move(fact));
      if (i == 0) {
        if (!designated.insert(var).second) {
          fail(ErrorCode::InvalidArgument, "two gadgets share their designated fact " + out.db.label(var));
        }
        out.edge_map[edge.var] = var;
      } else {
        ones.insert(var);
      }
    }
  }
  for (FactVar v : ones)
    if (!designated.contains(v)) out.ones.push_back(v);
  return out;
}

Assignment transfer_assignment(const std::map<FactVar, FactVar>& edge_map, const std::vector<FactVar>& ones,
                               const Assignment& original, const SemiringSpec& spec) {
  Assignment out;
  for (const auto& [from, to] : edge_map) {
    auto it = original.find(from);
    if (it != original.end()) out[to] = it->second;
  }
  for (FactVar v : ones) out[v] = spec.one;
  return out;
}

// ---------------------------------------------------------------------------
// Boundedness witnesses

std::string to_string(const WitnessReport& r) {
  switch (r.kind) {
    case WitnessKind::BoundedEvidence: return "BoundedEvidence(" + std::to_string(r.n) + ")";
    case WitnessKind::UnboundedWitness: return "UnboundedWitness(" + std::to_string(r.n) + ")";
    case WitnessKind::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

WitnessReport check_bounded_witness(const Program& program, std::size_t N, std::size_t n_max,
                                    std::size_t expansion_cap) {
  std::vector<Expansion> all;
  try {
    all = expansions(program, std::max(N, n_max), expansion_cap);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::LimitExceeded) return {WitnessKind::Inconclusive, 0};
    throw;
  }
  std::vector<const ConjunctiveQuery*> small;
  for (const auto& x : all)
    if (x.level <= N) small.push_back(&x.query);
  for (std::size_t n = N + 1; n <= n_max; ++n) {
    for (const auto& x : all) {
      if (x.level != n) continue;
      bool covered = std::any_of(small.begin(), small.end(),
                                 [&](const ConjunctiveQuery* c) { return find_homomorphism(*c, x.query).has_value(); });
      if (!covered) return {WitnessKind::UnboundedWitness, n};
    }
  }
  return {WitnessKind::BoundedEvidence, N};
}

}  // namespace provcirc
