#pragma once

#include <map>
#include <string>
#include <vector>

#include "provcirc/datalog.hpp"
#include "provcirc/grammar.hpp"
#include "provcirc/graph.hpp"
#include "provcirc/semiring.hpp"

namespace provcirc {

/// A generated instance plus the wiring back to the original edge variables.
struct ExpandedInstance {
  GraphInstance instance;
  std::string s_bar;
  std::string t_bar;
  /// Original edge variable → the designated expanded fact variable.
  std::map<FactVar, FactVar> edge_map;
  /// Expanded fact variables that stand for the constant 1.
  std::vector<FactVar> ones;
};

/// Prefix x into s, every edge replaced by a fresh path spelling y, suffix z out
/// of t. InvalidDecomposition when y is empty.
ExpandedInstance expand_instance_regular(const GraphInstance& original, std::size_t s, std::size_t t,
                                         const RegularDecomposition& d);

/// Prefix u·v into s, every edge replaced by a path spelling v, suffix
/// w·x^(L+1)·y out of t where L is the level of t. VEmpty when v is empty,
/// InvalidDecomposition when the graph is not layered.
ExpandedInstance expand_instance_cfg(const GraphInstance& original, std::size_t s, std::size_t t,
                                     const CfgDecomposition& d);

struct GadgetInstance {
  Database db;
  /// Constant bound to the first head variable of the source gadget.
  std::string target;
  std::map<FactVar, FactVar> edge_map;
  std::vector<FactVar> ones;
};

/// Canonical database of Cx for every edge leaving s, Czu for every edge into t
/// and Cy for every other edge; head variables bind to the edge endpoints and
/// all other variables to fresh constants. The first body atom of each gadget is
/// designated. DisconnectedCQ if a gadget's variable graph is disconnected or
/// misses a head variable.
GadgetInstance expand_instance_cq_gadgets(const GraphInstance& original, std::size_t s, std::size_t t,
                                          const ConjunctiveQuery& cx, const ConjunctiveQuery& cy,
                                          const ConjunctiveQuery& czu);

/// Assignment for an expanded instance: mapped facts take the original fact's
/// value, `ones` take 1.
Assignment transfer_assignment(const std::map<FactVar, FactVar>& edge_map, const std::vector<FactVar>& ones,
                               const Assignment& original, const SemiringSpec& spec);

enum class WitnessKind { BoundedEvidence, UnboundedWitness, Inconclusive };

struct WitnessReport {
  WitnessKind kind = WitnessKind::Inconclusive;
  /// N for BoundedEvidence, the failing level for UnboundedWitness.
  std::size_t n = 0;
  friend bool operator==(const WitnessReport&, const WitnessReport&) = default;
};

std::string to_string(const WitnessReport& r);

/// For every level n in (N, n_max], every expansion of level n must receive a
/// head-preserving homomorphism from some expansion of level ≤ N.
WitnessReport check_bounded_witness(const Program& program, std::size_t N, std::size_t n_max,
                                    std::size_t expansion_cap = 100000);

}  // namespace provcirc
