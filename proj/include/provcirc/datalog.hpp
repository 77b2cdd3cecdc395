#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "provcirc/semiring.hpp"

namespace provcirc {

// ---------------------------------------------------------------------------
// Syntax

struct Term {
  enum class Kind : std::uint8_t { Variable, Constant };

  Kind kind = Kind::Variable;
  std::string name;

  static Term var(std::string n) { return {Kind::Variable, std::move(n)}; }
  static Term constant(std::string n) { return {Kind::Constant, std::move(n)}; }
  [[nodiscard]] bool is_var() const { return kind == Kind::Variable; }

  friend auto operator<=>(const Term&, const Term&) = default;
};

struct Atom {
  std::string predicate;
  std::vector<Term> args;

  friend auto operator<=>(const Atom&, const Atom&) = default;
};

struct Rule {
  Atom head;
  std::vector<Atom> body;
};

struct Classification {
  bool linear = false;
  bool monadic = false;
  bool chain = false;
  bool connected = false;
  bool left_linear = false;

  friend bool operator==(const Classification&, const Classification&) = default;
};

class Program {
 public:
  Program() = default;
  Program(std::vector<Rule> rules, std::string target);

  [[nodiscard]] const std::vector<Rule>& rules() const { return rules_; }
  [[nodiscard]] const std::string& target() const { return target_; }
  [[nodiscard]] const Classification& classification() const { return classification_; }

  [[nodiscard]] bool is_idb(std::string_view predicate) const;
  [[nodiscard]] const std::set<std::string, std::less<>>& idb_predicates() const { return idbs_; }
  [[nodiscard]] std::optional<std::size_t> arity(std::string_view predicate) const;
  /// A rule is recursive when its body mentions an IDB predicate.
  [[nodiscard]] bool is_recursive(const Rule& rule) const;

  /// Same rules, different designated target.
  [[nodiscard]] Program with_target(std::string target) const;

 private:
  std::vector<Rule> rules_;
  std::string target_;
  std::set<std::string, std::less<>> idbs_;
  std::map<std::string, std::size_t, std::less<>> arities_;
  Classification classification_;
};

/// Surface syntax: `Head(args) :- Body1(args), Body2(args).`, `%` comments and an
/// optional `@target Pred` directive. Bare identifiers in argument position are
/// variables; constants are quoted (`"a"`) or numeric.
Program parse_program(std::string_view text);

Classification classify(const Program& program);

std::string to_string(const Term& t);
std::string to_string(const Atom& a);
std::string to_string(const Rule& r);
std::string to_string(const Program& p);

// ---------------------------------------------------------------------------
// Databases

struct GroundAtom {
  std::string predicate;
  std::vector<std::string> args;

  friend auto operator<=>(const GroundAtom&, const GroundAtom&) = default;
};

struct GroundAtomHash {
  std::size_t operator()(const GroundAtom& a) const noexcept;
};

/// Parses `P(a,b)`; arguments are constants, quotes optional.
GroundAtom parse_ground_atom(std::string_view text);
std::string to_string(const GroundAtom& a);

struct Fact {
  GroundAtom atom;
  FactVar var = 0;
  /// Raw weight column; converted per semiring at evaluation time.
  std::optional<std::string> weight;
};

class Database {
 public:
  /// Adds a fact and returns its variable id. Re-adding an existing fact returns
  /// the existing id.
  FactVar add(GroundAtom atom, std::optional<std::string> weight = std::nullopt);

  [[nodiscard]] const std::vector<Fact>& facts() const { return facts_; }
  [[nodiscard]] const Fact& fact(FactVar var) const { return facts_.at(var); }
  [[nodiscard]] std::optional<FactVar> find(const GroundAtom& atom) const;
  [[nodiscard]] const std::vector<FactVar>& facts_of(std::string_view predicate) const;
  [[nodiscard]] std::string label(FactVar var) const { return to_string(fact(var).atom); }
  [[nodiscard]] std::size_t size() const { return facts_.size(); }
  [[nodiscard]] bool empty() const { return facts_.empty(); }
  [[nodiscard]] std::set<std::string> constants() const;

 private:
  std::vector<Fact> facts_;
  std::unordered_map<GroundAtom, FactVar, GroundAtomHash> index_;
  std::map<std::string, std::vector<FactVar>, std::less<>> by_predicate_;
};

/// TSV with columns `predicate, arg1..argk[, weight]`. When a program is given
/// its arities decide whether the last column is a weight; otherwise every
/// column after the predicate is an argument.
Database parse_database(std::string_view text, const Program* program = nullptr);

/// Converts every fact's weight column into an element of `spec`.
Assignment weights_assignment(const Database& db, const SemiringSpec& spec);

// ---------------------------------------------------------------------------
// Grounding and evaluation

struct BodyRef {
  bool idb = false;
  /// Index into GroundedProgram::idb_facts when idb, else the EDB FactVar.
  std::size_t index = 0;
};

struct GroundRule {
  std::size_t rule = 0;  ///< index of the source rule in the program
  std::size_t head = 0;  ///< index into idb_facts
  std::vector<BodyRef> body;
};

struct GroundedProgram {
  std::vector<GroundRule> rules;
  std::vector<GroundAtom> idb_facts;
  std::unordered_map<GroundAtom, std::size_t, GroundAtomHash> idb_index;
  std::vector<std::vector<std::size_t>> rules_by_head;

  [[nodiscard]] std::optional<std::size_t> find_idb(const GroundAtom& a) const;
};

/// All groundings over the active domain whose EDB atoms are present in `db`.
/// Rules appear in program order; within a rule, substitutions are sorted
/// lexicographically by their constant tuple.
GroundedProgram ground(const Program& program, const Database& db);

struct NaiveResult {
  std::map<GroundAtom, Element> valuation;
  /// Smallest k with f^k(0) = f^{k+1}(0): ICO applications needed to reach the fixpoint.
  std::size_t iterations = 0;
  /// ICO applications performed, including the one that observed no change.
  std::size_t applications = 0;

  [[nodiscard]] Element value(const GroundAtom& fact, const SemiringSpec& spec) const;
};

/// Naive evaluation from all-zero. `max_iters` bounds the number of ICO
/// applications; exhausting it raises NotStable. Default: |idb facts| + 1.
NaiveResult naive_eval(const Program& program, const Database& db, const SemiringSpec& spec,
                       const Assignment& assignment, std::optional<std::size_t> max_iters = std::nullopt);
NaiveResult naive_eval(const Program& program, const Database& db, const SemiringSpec& spec,
                       std::optional<std::size_t> max_iters = std::nullopt);

/// One application of the immediate consequence operator on a grounded program.
std::vector<Element> ico_step(const GroundedProgram& g, const SemiringSpec& spec,
                              const std::vector<Element>& edb_values, const std::vector<Element>& idb_values);

// ---------------------------------------------------------------------------
// Conjunctive queries and expansions

struct ConjunctiveQuery {
  Atom head;
  std::vector<Atom> body;
};

std::string to_string(const ConjunctiveQuery& q);
/// Parses a single rule `C(X,Y) :- E(X,Z), E(Z,Y).` as a CQ.
ConjunctiveQuery parse_cq(std::string_view text);

struct Expansion {
  ConjunctiveQuery query;
  /// Height of the unfolding in recursive-rule applications (C_level).
  std::size_t level = 0;
};

/// Unfolds the target predicate up to `depth` recursive-rule levels, always
/// finishing in initialization rules. Variables are freshly renamed per
/// unfolding; non-head variables come out as z1, z2, ... in order of first
/// appearance. Raises LimitExceeded once more than `cap` expansions exist.
std::vector<Expansion> expansions(const Program& program, std::size_t depth, std::size_t cap = 100000);

}  // namespace provcirc
