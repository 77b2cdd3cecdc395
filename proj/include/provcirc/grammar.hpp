#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "provcirc/builders.hpp"
#include "provcirc/circuit.hpp"
#include "provcirc/datalog.hpp"
#include "provcirc/graph.hpp"

namespace provcirc {

using Word = std::vector<std::string>;

std::string to_string(const Word& w);

struct Production {
  std::string head;
  /// Empty body is an epsilon production.
  std::vector<std::string> body;

  friend bool operator==(const Production&, const Production&) = default;
};

struct Grammar {
  std::set<std::string> nonterminals;
  std::set<std::string> terminals;
  std::vector<Production> productions;
  std::string start;

  [[nodiscard]] bool is_nonterminal(std::string_view s) const { return nonterminals.contains(std::string(s)); }
};

/// One production per line, `S -> a S b | a b`, with `eps` for the empty body and
/// an optional `@start S` (default: head of the first production). Symbols that
/// head some production are nonterminals; all others are terminals.
Grammar parse_grammar(std::string_view text);
std::string to_string(const Grammar& g);

/// Reads chain rules as productions (NotChain otherwise); start = target.
Grammar program_to_grammar(const Program& program);
/// Each production A → X1..Xk becomes A(x,y) :- X1(x,z1), ..., Xk(z_{k-1},y).
/// EpsilonProduction if the cleaned grammar has an epsilon production.
Program grammar_to_program(const Grammar& g);

/// Drops non-productive, then unreachable, nonterminals and their productions.
Grammar cleanup(const Grammar& g);
bool is_finite(const Grammar& g);
/// Every word of a finite language, sorted. NotFinite / LimitExceeded.
std::vector<Word> finite_language(const Grammar& g, std::size_t cap = 100000);

/// Membership through a Chomsky-normal-form conversion. EpsilonProduction if the
/// grammar has epsilon productions.
bool cyk_accepts(const Grammar& g, const Word& w);

/// Every body is terminals only, or one nonterminal followed by terminals.
bool is_left_linear(const Grammar& g);

// ---------------------------------------------------------------------------
// Automata

struct Dfa {
  std::vector<std::string> alphabet;  ///< sorted
  /// delta[q][a] is the successor of q on alphabet[a].
  std::vector<std::vector<std::size_t>> delta;
  std::size_t start = 0;
  std::vector<bool> accepting;

  [[nodiscard]] std::size_t num_states() const { return delta.size(); }
  [[nodiscard]] std::optional<std::size_t> symbol(std::string_view a) const;
  /// Runs from `from`; words with unknown symbols are rejected.
  [[nodiscard]] bool accepts(const Word& w) const;
};

/// Minimal complete DFA of a left-linear grammar (NotRegularForm otherwise);
/// states are numbered in breadth-first order from the start state.
Dfa to_dfa(const Grammar& g);

struct ProductGraph {
  /// Vertex (v, q) is named `name(v)|q`; each edge carries the variable of the
  /// original edge it projects to.
  Graph graph;
  /// Original edge index of every product edge.
  std::vector<std::size_t> projection;
  std::vector<std::pair<std::size_t, std::size_t>> state;  ///< (graph vertex, dfa state)

  [[nodiscard]] std::optional<std::size_t> find(std::size_t v, std::size_t q) const;
};

/// UnknownLabel when a graph label is outside the DFA alphabet.
ProductGraph product_graph(const Graph& g, const Dfa& dfa);

/// ⊕ over accepting states q of the s→t path circuit on the product graph from
/// (s, start) to (t, q). Product vertices that cannot lie on such a path are
/// pruned first. Strategy: bellman-ford, squaring or layered-graph.
Circuit rpq_via_tc(const Graph& g, const Grammar& grammar, std::size_t s, std::size_t t,
                   Strategy strategy = Strategy::BellmanFord);
GateId emit_rpq_via_tc(CircuitBuilder& b, const Graph& g, const Dfa& dfa, std::size_t s, std::size_t t,
                       Strategy strategy);

// ---------------------------------------------------------------------------
// Pumping decompositions

struct RegularDecomposition {
  Word x, y, z;
  friend bool operator==(const RegularDecomposition&, const RegularDecomposition&) = default;
};

struct CfgDecomposition {
  Word u, v, w, x, y;
  friend bool operator==(const CfgDecomposition&, const CfgDecomposition&) = default;
};

/// Shortest x·y·z over useful DFA cycles, ties broken lexicographically; pumping
/// is verified for i = 0..4. FiniteLanguage if there is no such cycle.
RegularDecomposition find_pumping_regular(const Grammar& g);

/// Self-embedding A ⇒+ vAx with S ⇒* uAy and A ⇒* w, other nonterminals replaced
/// by their shortest words. Prefers |v| ≥ 1, then the shortest total, then
/// lexicographic order; pumping is verified by CYK for i = 0..3.
CfgDecomposition find_pumping_cfg(const Grammar& g);

Word pump(const RegularDecomposition& d, std::size_t i);
Word pump(const CfgDecomposition& d, std::size_t i);

}  // namespace provcirc
