#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "provcirc/circuit.hpp"
#include "provcirc/datalog.hpp"
#include "provcirc/graph.hpp"

namespace provcirc {

enum class Strategy { LayeredNaive, LayeredGraph, BellmanFord, Squaring, Magic, Uvg };

std::string_view to_string(Strategy s);
/// Accepts naive | layered-naive | layered-graph | bellman-ford | squaring | magic | uvg.
Strategy parse_strategy(std::string_view name);

struct BuilderReport {
  Circuit circuit;
  std::string strategy;
  std::size_t size = 0;
  std::size_t depth = 0;
  std::size_t stages = 0;
};

BuilderReport make_report(Circuit c, Strategy s, std::size_t stages);

/// Gate standing for one graph edge; the default is the edge's input variable.
using EdgeGate = std::function<GateId(CircuitBuilder&, const Edge&)>;
GateId default_edge_gate(CircuitBuilder& b, const Edge& e);

// ---------------------------------------------------------------------------
// Program-level builders

/// k layers of the immediate consequence operator over the grounding.
Circuit build_layered_naive(const Program& program, const Database& db, const GroundAtom& fact, std::size_t k);

/// Source-bound evaluation of a finite left-linear chain program: every word of
/// the finite language is matched from the source constant layer by layer.
Circuit build_magic_bounded(const Program& program, const Database& db, const GroundAtom& fact);

/// Staged construction over the graph of IDB-fact ids plus id 0. `stages`
/// defaults to default_uvg_stages.
Circuit build_uvg(const Program& program, const Database& db, const GroundAtom& fact,
                  std::optional<std::size_t> stages = std::nullopt);

/// ⌈log_{4/3} S⌉ (at least 1) where S is the largest tight proof tree of `fact`
/// in nodes. Falls back to S = |IDB facts|·(max body length + 1) when the trees
/// are too many to enumerate.
std::size_t default_uvg_stages(const Program& program, const Database& db, const GroundAtom& fact);

// ---------------------------------------------------------------------------
// Graph builders (s–t paths; for s = t, closed walks of length ≥ 1)

/// Per-vertex ⊕ over incoming edges in level order. NotLayered unless every
/// vertex reachable from s (ignoring direction) has a consistent level strictly
/// between those of s and t.
Circuit build_layered_graph(const Graph& g, std::size_t s, std::size_t t);
GateId emit_layered_graph(CircuitBuilder& b, const Graph& g, std::size_t s, std::size_t t,
                          const EdgeGate& edge_gate = default_edge_gate);

Circuit build_bellman_ford(const Graph& g, std::size_t s, std::size_t t);
GateId emit_bellman_ford(CircuitBuilder& b, const Graph& g, std::size_t s, std::size_t t,
                         const EdgeGate& edge_gate = default_edge_gate);

Circuit build_repeated_squaring(const Graph& g, std::size_t s, std::size_t t);
GateId emit_repeated_squaring(CircuitBuilder& b, const Graph& g, std::size_t s, std::size_t t,
                              const EdgeGate& edge_gate = default_edge_gate);

/// ⌈log₂ n⌉ for n ≥ 1.
std::size_t ceil_log2(std::size_t n);

}  // namespace provcirc
