#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "provcirc/datalog.hpp"
#include "provcirc/semiring.hpp"

namespace provcirc {

// ---------------------------------------------------------------------------
// Proof trees

struct ProofTree {
  GroundAtom fact;
  /// Set on leaves: the EDB fact's variable.
  std::optional<FactVar> leaf;
  /// Set on internal nodes: index into GroundedProgram::rules.
  std::optional<std::size_t> ground_rule;
  std::vector<ProofTree> children;
};

/// No IDB fact repeats along any root-to-leaf path.
bool is_tight(const ProofTree& tree);

/// Enumerates every tight proof tree of `fact`. Children are explored in
/// grounded-rule order. Raises LimitExceeded once more than `limit` trees exist.
std::vector<ProofTree> enumerate_tight_trees(const Program& program, const Database& db, const GroundAtom& fact,
                                             std::size_t limit = 1000000);
std::vector<ProofTree> enumerate_tight_trees(const GroundedProgram& g, const Database& db, const GroundAtom& fact,
                                             std::size_t limit = 1000000);

// ---------------------------------------------------------------------------
// Polynomials in antichain normal form

/// Sorted (variable, exponent) pairs; exponents are positive.
using Monomial = std::vector<std::pair<FactVar, std::uint32_t>>;

Monomial monomial_of(const ProofTree& tree);
Monomial multiply(const Monomial& a, const Monomial& b);
/// Componentwise a ≤ b, i.e. a divides b.
bool divides(const Monomial& a, const Monomial& b);
Monomial flatten(const Monomial& m);

struct Polynomial {
  /// Sorted antichain; empty means the zero polynomial.
  std::vector<Monomial> monomials;

  [[nodiscard]] bool is_zero() const { return monomials.empty(); }
  [[nodiscard]] std::size_t size() const { return monomials.size(); }
  friend bool operator==(const Polynomial&, const Polynomial&) = default;
};

/// Keeps only the minimal monomials under componentwise exponent order.
Polynomial absorb_reduce(std::vector<Monomial> monomials);
Polynomial flatten(const Polynomial& p);

Polynomial poly_zero();
Polynomial poly_one();
Polynomial poly_var(FactVar v);
/// Sum and product, reduced. `cap` bounds the result size (CapExceeded).
Polynomial poly_add(const Polynomial& a, const Polynomial& b, std::size_t cap = SIZE_MAX);
Polynomial poly_mul(const Polynomial& a, const Polynomial& b, bool otimes_idem, std::size_t cap = SIZE_MAX);

Element evaluate(const Polynomial& p, const SemiringSpec& spec, const Assignment& assignment);

/// Antichain of the monomials of all tight proof trees, flattened first when
/// `otimes_idem` is set.
Polynomial oracle_polynomial(const Program& program, const Database& db, const GroundAtom& fact, bool otimes_idem,
                             std::size_t limit = 1000000);
Polynomial oracle_polynomial(const GroundedProgram& g, const Database& db, const GroundAtom& fact, bool otimes_idem,
                             std::size_t limit = 1000000);

/// Sorted JSON list of {"var": exponent} maps.
std::string to_json(const Polynomial& p);
Polynomial polynomial_from_json(std::string_view text);
/// Human-readable form using database fact labels, e.g. `E(s,u1)*E(u1,t) + ...`.
std::string to_string(const Polynomial& p, const Database* db = nullptr);

// ---------------------------------------------------------------------------
// Conjunctive query homomorphisms

using VariableMapping = std::map<std::string, Term>;

/// A mapping of `from`'s variables sending every body atom of `from` to a body
/// atom of `to` and the head of `from` onto the head of `to` position by position.
std::optional<VariableMapping> find_homomorphism(const ConjunctiveQuery& from, const ConjunctiveQuery& to);

}  // namespace provcirc
