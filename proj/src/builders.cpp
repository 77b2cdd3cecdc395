#include "provcirc/builders.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "provcirc/error.hpp"
#include "provcirc/grammar.hpp"
#include "provcirc/provenance.hpp"

namespace provcirc {

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::LayeredNaive: return "layered-naive";
    case Strategy::LayeredGraph: return "layered-graph";
    case Strategy::BellmanFord: return "bellman-ford";
    case Strategy::Squaring: return "squaring";
    case Strategy::Magic: return "magic";
    case Strategy::Uvg: return "uvg";
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view name) {
  if (name == "naive" || name == "layered-naive") return Strategy::LayeredNaive;
  if (name == "layered-graph") return Strategy::LayeredGraph;
  if (name == "bellman-ford") return Strategy::BellmanFord;
  if (name == "squaring") return Strategy::Squaring;
  if (name == "magic") return Strategy::Magic;
  if (name == "uvg") return Strategy::Uvg;
  fail(ErrorCode::InvalidArgument, "unknown strategy '" + std::string(name) + "'");
}

BuilderReport make_report(Circuit c, Strategy s, std::size_t stages) {
  Metrics m = metrics(c);
  return {std::move(c), std::string(to_string(s)), m.size, m.depth, stages};
}

GateId default_edge_gate(CircuitBuilder& b, const Edge& e) { return b.input(e.var); }

std::size_t ceil_log2(std::size_t n) {
  std::size_t k = 0;
  while ((std::size_t{1} << k) < n) ++k;
  return k;
}

// ---------------------------------------------------------------------------
// Layered naive evaluation

Circuit build_layered_naive(const Program& program, const Database& db, const GroundAtom& fact, std::size_t k) {
  if (k == 0) fail(ErrorCode::InvalidArgument, "layered-naive needs k >= 1");
  GroundedProgram g = ground(program, db);
  CircuitBuilder b;
  std::vector<GateId> prev(g.idb_facts.size(), b.zero());
  for (std::size_t layer = 1; layer <= k; ++layer) {
    std::vector<GateId> cur(g.idb_facts.size());
    for (std::size_t a = 0; a < g.idb_facts.size(); ++a) {
      std::vector<GateId> terms;
      for (std::size_t ri : g.rules_by_head[a]) {
        std::vector<GateId> factors;
        for (const auto& ref : g.rules[ri].body) {
          factors.push_back(ref.idb ? prev[ref.index] : b.input(static_cast<FactVar>(ref.index)));
        }
        terms.push_back(b.mul_all(factors));
      }
      cur[a] = b.add_all(terms);
    }
    prev = std::move(cur);
  }
  auto idx = g.find_idb(fact);
  return b.finalize(idx ? prev[*idx] : b.zero());
}

// ---------------------------------------------------------------------------
// Graph builders

namespace {

/// ⊕ of parallel edges u→v for every pair, as adjacency rows.
std::vector<std::map<std::size_t, GateId>> edge_matrix(CircuitBuilder& b, const Graph& g, const EdgeGate& edge_gate) {
  std::vector<std::map<std::size_t, std::vector<GateId>>> parallel(g.num_vertices());
  for (const auto& e : g.edges()) parallel[e.src][e.dst].push_back(edge_gate(b, e));
  std::vector<std::map<std::size_t, GateId>> out(g.num_vertices());
  for (std::size_t u = 0; u < g.num_vertices(); ++u)
    for (const auto& [v, gates] : parallel[u]) out[u][v] = b.add_all(gates);
  return out;
}

}  // namespace

GateId emit_layered_graph(CircuitBuilder& b, const Graph& g, std::size_t s, std::size_t t, const EdgeGate& edge_gate) {
  if (s == t) return b.one();
  auto level = layer_levels(g, s);
  if (!level[t]) return b.zero();
  long top = *level[t];
  std::vector<std::vector<std::size_t>> by_level(static_cast<std::size_t>(top) + 1);
  for (std::size_t v = 0; v < g.num_vertices(); ++v) {
    if (!level[v] || v == s || v == t) continue;
    if (*level[v] <= 0 || *level[v] >= top) {
      fail(ErrorCode::NotLayered, "vertex " + g.name(v) + " lies outside the levels between source and target");
    }
    by_level[static_cast<std::size_t>(*level[v])].push_back(v);
  }
  by_level[static_cast<std::size_t>(top)].push_back(t);
  std::vector<GateId> gate(g.num_vertices(), b.zero());
  gate[s] = b.one();
  for (const auto& vs : by_level) {
    for (std::size_t v : vs) {
      std::vector<GateId> terms;
      for (std::size_t e : g.in_edges(v)) terms.push_back(b.mul(gate[g.edge(e).src], edge_gate(b, g.edge(e))));
      gate[v] = b.add_all(terms);
    }
  }
  return gate[t];
}

Circuit build_layered_graph(const Graph& g, std::size_t s, std::size_t t) {
  CircuitBuilder b;
  GateId out = emit_layered_graph(b, g, s, t);
  return b.finalize(out);
}

GateId emit_bellman_ford(CircuitBuilder& b, const Graph& g, std::size_t s, std::size_t t, const EdgeGate& edge_gate) {
  std::size_t n = g.num_vertices();
  if (s >= n || t >= n) fail(ErrorCode::InvalidArgument, "vertex out of range");
  // Closed walks through s have at most n edges when simple; s–t paths n−1.
  std::size_t layers = s == t ? n : n - 1;
  auto x = edge_matrix(b, g, edge_gate);
  std::vector<GateId> f(n, b.zero());
  for (const auto& [v, gate] : x[s]) f[v] = gate;
  std::vector<std::vector<std::pair<std::size_t, GateId>>> incoming(n);
  for (std::size_t u = 0; u < n; ++u)
    for (const auto& [v, gate] : x[u]) incoming[v].emplace_back(u, gate);
  for (std::size_t k = 2; k <= layers; ++k) {
    std::vector<GateId> next(n);
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<GateId> terms;
      for (const auto& [i, gate] : incoming[j]) terms.push_back(b.mul(f[i], gate));
      next[j] = b.add(f[j], b.add_all(terms));
    }
    f = std::move(next);
  }
  return f[t];
}

Circuit build_bellman_ford(const Graph& g, std::size_t s, std::size_t t) {
  CircuitBuilder b;
  GateId out = emit_bellman_ford(b, g, s, t);
  return b.finalize(out);
}

GateId emit_repeated_squaring(CircuitBuilder& b, const Graph& g, std::size_t s, std::size_t t,
                              const EdgeGate& edge_gate) {
  std::size_t n = g.num_vertices();
  if (s >= n || t >= n) fail(ErrorCode::InvalidArgument, "vertex out of range");
  auto x = edge_matrix(b, g, edge_gate);
  std::vector<std::vector<GateId>> m(n, std::vector<GateId>(n, b.zero()));
  for (std::size_t i = 0; i < n; ++i) {
    m[i][i] = b.one();
    for (const auto& [j, gate] : x[i])
      if (j != i) m[i][j] = gate;
  }
  std::size_t rounds = ceil_log2(n);
  std::vector<GateId> terms;
  terms.reserve(n);
  for (std::size_t r = 0; r < rounds; ++r) {
    std::vector<std::vector<GateId>> sq(n, std::vector<GateId>(n));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        terms.clear();
        for (std::size_t k = 0; k < n; ++k) {
          GateId p = b.mul(m[i][k], m[k][j]);
          if (b.gate(p).op != GateOp::Zero) terms.push_back(p);
        }
        sq[i][j] = b.add_all(terms);
      }
    }
    m = std::move(sq);
  }
  if (s != t) return m[s][t];
  terms.clear();
  for (std::size_t k = 0; k < n; ++k) {
    auto it = x[k].find(s);
    if (it != x[k].end()) terms.push_back(b.mul(m[s][k], it->second));
  }
  return b.add_all(terms);
}

Circuit build_repeated_squaring(const Graph& g, std::size_t s, std::size_t t) {
  CircuitBuilder b;
  GateId out = emit_repeated_squaring(b, g, s, t);
  return b.finalize(out);
}

// ---------------------------------------------------------------------------
// Finite chain programs

Circuit build_magic_bounded(const Program& program, const Database& db, const GroundAtom& fact) {
  Program p = program.with_target(fact.predicate);
  if (!p.classification().chain) fail(ErrorCode::NotChain, "magic needs a chain program");
  Grammar grammar = program_to_grammar(p);
  if (!is_finite(grammar)) fail(ErrorCode::NotFinite, "the grammar of " + p.target() + " has an infinite language");
  if (!p.classification().left_linear) fail(ErrorCode::NotLeftLinear, "magic needs a left-linear program");
  if (fact.args.size() != 2) fail(ErrorCode::ArityMismatch, "chain facts are binary");

  Graph g = graph_from_database(db);
  CircuitBuilder b;
  auto s = g.find_vertex(fact.args[0]);
  auto t = g.find_vertex(fact.args[1]);
  if (!s || !t) return b.finalize(b.zero());
  std::vector<GateId> accepted;
  for (const Word& w : finite_language(grammar)) {
    // reach[v]: ⊕ of products of the paths from s spelling the prefix read so far.
    std::map<std::size_t, GateId> reach{{*s, b.one()}};
    for (const auto& letter : w) {
      std::map<std::size_t, std::vector<GateId>> next;
      for (const auto& [u, gate] : reach) {
        for (std::size_t e : g.out_edges(u)) {
          const Edge& edge = g.edge(e);
          if (edge.label == letter) next[edge.dst].push_back(b.mul(gate, b.input(edge.var)));
        }
      }
      reach.clear();
      for (const auto& [v, gates] : next) reach[v] = b.add_all(gates);
      if (reach.empty()) break;
    }
    if (auto it = reach.find(*t); it != reach.end() && !w.empty()) accepted.push_back(it->second);
  }
  return b.finalize(b.add_all(accepted));
}

// ---------------------------------------------------------------------------
// Staged construction

std::size_t default_uvg_stages(const Program& program, const Database& db, const GroundAtom& fact) {
  GroundedProgram g = ground(program, db);
  double bound = 1.0;
  try {
    for (const auto& tree : enumerate_tight_trees(g, db, fact, 100000)) {
      std::size_t nodes = 0;
      std::vector<const ProofTree*> stack{&tree};
      while (!stack.empty()) {
        const ProofTree* t = stack.back();
        stack.pop_back();
        ++nodes;
        for (const auto& c : t->children) stack.push_back(&c);
      }
      bound = std::max(bound, static_cast<double>(nodes));
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::LimitExceeded) throw;
    std::size_t max_body = 0;
    for (const auto& r : program.rules()) max_body = std::max(max_body, r.body.size());
    bound = static_cast<double>(g.idb_facts.size() * (max_body + 1));
  }
  auto stages = static_cast<std::size_t>(std::ceil(std::log(bound) / std::log(4.0 / 3.0) - 1e-9));
  return std::max<std::size_t>(stages, 1);
}

Circuit build_uvg(const Program& program, const Database& db, const GroundAtom& fact,
                  std::optional<std::size_t> stages) {
  std::size_t K = stages ? *stages : default_uvg_stages(program, db, fact);
  GroundedProgram g = ground(program, db);
  CircuitBuilder b;
  auto target = g.find_idb(fact);
  if (!target || K == 0) return b.finalize(b.zero());

  // Node ids: 0 is the special id, IDB fact i has id i + 1. Rows are sparse.
  using Row = std::map<std::size_t, GateId>;
  std::size_t N = g.idb_facts.size() + 1;
  std::vector<Row> G(N);
  auto at = [&](const std::vector<Row>& m, std::size_t a, std::size_t c) {
    auto it = m[a].find(c);
    return it == m[a].end() ? b.zero() : it->second;
  };

  for (std::size_t k = 1; k <= K; ++k) {
    // First: G1(0, α) from the previous stage's G(0, β).
    std::vector<Row> G1(N);
    for (std::size_t a = 0; a + 1 < N; ++a) {
      std::vector<GateId> terms;
      for (std::size_t ri : g.rules_by_head[a]) {
        std::vector<GateId> factors;
        for (const auto& ref : g.rules[ri].body) {
          factors.push_back(ref.idb ? at(G, 0, ref.index + 1) : b.input(static_cast<FactVar>(ref.index)));
        }
        terms.push_back(b.mul_all(factors));
      }
      GateId sum = b.add_all(terms);
      if (b.gate(sum).op != GateOp::Zero) G1[0][a + 1] = sum;
    }
    // Second: G1(δ, α), leaving one IDB occurrence δ open at a time.
    std::map<std::pair<std::size_t, std::size_t>, std::vector<GateId>> open_terms;
    for (const auto& gr : g.rules) {
      for (std::size_t p = 0; p < gr.body.size(); ++p) {
        if (!gr.body[p].idb) continue;
        std::vector<GateId> factors;
        for (std::size_t q = 0; q < gr.body.size(); ++q) {
          if (q == p) continue;
          const auto& ref = gr.body[q];
          factors.push_back(ref.idb ? at(G1, 0, ref.index + 1) : b.input(static_cast<FactVar>(ref.index)));
        }
        open_terms[{gr.body[p].index + 1, gr.head + 1}].push_back(b.mul_all(factors));
      }
    }
    for (const auto& [key, terms] : open_terms) {
      GateId sum = b.add_all(terms);
      if (b.gate(sum).op != GateOp::Zero) G1[key.first][key.second] = sum;
    }
    // Third: G2 = G ⊕ G1.
    std::vector<Row> G2 = G;
    for (std::size_t a = 0; a < N; ++a) {
      for (const auto& [c, gate] : G1[a]) {
        auto [it, inserted] = G2[a].emplace(c, gate);
        if (!inserted) it->second = b.add(it->second, gate);
      }
    }
    // Fourth: one squaring step.
    std::vector<Row> next(N);
    for (std::size_t a = 0; a < N; ++a) {
      std::map<std::size_t, std::vector<GateId>> terms;
      for (const auto& [c, gate] : G2[a]) terms[c].push_back(gate);
      for (const auto& [mid, left] : G2[a])
        for (const auto& [c, right] : G2[mid]) terms[c].push_back(b.mul(left, right));
      for (const auto& [c, list] : terms) {
        GateId sum = b.add_all(list);
        if (b.gate(sum).op != GateOp::Zero) next[a][c] = sum;
      }
    }
    G = std::move(next);
  }
  return b.finalize(at(G, 0, *target + 1));
}

}  // namespace provcirc
