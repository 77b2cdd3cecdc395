#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "provcirc/provenance.hpp"
#include "provcirc/semiring.hpp"

namespace provcirc {

using GateId = std::uint32_t;

enum class GateOp : std::uint8_t { Input, Zero, One, Add, Mul };

struct Gate {
  GateOp op = GateOp::Zero;
  FactVar var = 0;  ///< Input only
  GateId l = 0;     ///< Add/Mul only
  GateId r = 0;

  friend bool operator==(const Gate&, const Gate&) = default;
};

struct GateHash {
  std::size_t operator()(const Gate& g) const noexcept;
};

/// Gates in topological order: operands always have smaller indices.
class Circuit {
 public:
  Circuit() : Circuit({Gate{}}, 0) {}
  /// Validates topological order and the output index (InvalidCircuit).
  Circuit(std::vector<Gate> gates, GateId output);

  [[nodiscard]] const std::vector<Gate>& gates() const { return gates_; }
  [[nodiscard]] const Gate& gate(GateId id) const { return gates_.at(id); }
  [[nodiscard]] GateId output() const { return output_; }
  [[nodiscard]] std::size_t size() const { return gates_.size(); }
  /// Distinct input variables, sorted.
  [[nodiscard]] std::vector<FactVar> input_vars() const;

  friend bool operator==(const Circuit&, const Circuit&) = default;

 private:
  std::vector<Gate> gates_;
  GateId output_ = 0;
};

struct Metrics {
  std::size_t size = 0;
  /// Longest path in edges; a lone input has depth 0.
  std::size_t depth = 0;
  std::size_t fanout_max = 0;
};

Metrics metrics(const Circuit& c);

/// Hash-consing construction with constant folding (x⊕0 = x, x⊗0 = 0, x⊗1 = x)
/// and commutative operand normalization.
class CircuitBuilder {
 public:
  GateId input(FactVar var);
  GateId zero();
  GateId one();
  GateId add(GateId a, GateId b);
  GateId mul(GateId a, GateId b);
  /// Balanced binary trees in operand order; empty sums give 0, empty products 1.
  GateId add_all(std::span<const GateId> xs);
  GateId mul_all(std::span<const GateId> xs);

  [[nodiscard]] std::size_t size() const { return gates_.size(); }
  [[nodiscard]] const Gate& gate(GateId id) const { return gates_.at(id); }
  /// Keeps only the gates reachable from `output`, renumbered in order.
  [[nodiscard]] Circuit finalize(GateId output) const;

 private:
  GateId intern(const Gate& g);

  std::vector<Gate> gates_;
  std::unordered_map<Gate, GateId, GateHash> index_;
};

/// Bottom-up evaluation; MissingAssignment names every absent variable.
Element evaluate(const Circuit& c, const SemiringSpec& spec, const Assignment& assignment);

/// Reduced polynomial of the circuit, computed gate by gate. CapExceeded once an
/// intermediate antichain exceeds `monomial_cap`.
Polynomial symbolic_polynomial(const Circuit& c, bool otimes_idem, std::size_t monomial_cap = 100000);

/// The same DAG read over the boolean semiring: ⊕ as OR, ⊗ as AND. Evaluate it
/// with `builtin("boolean")` and the supports of the original assignment.
Circuit reinterpret_boolean(const Circuit& c);
Assignment support_assignment(const SemiringSpec& spec, const Assignment& assignment);

/// Unshares every gate so each non-output gate has fan-out 1. DepthBudgetExceeded
/// when the circuit is deeper than `depth_budget`.
Circuit expand_to_formula(const Circuit& c, std::size_t depth_budget);
bool is_formula(const Circuit& c);

std::string to_dot(const Circuit& c, const std::vector<std::string>* labels = nullptr);
std::string to_json(const Circuit& c);
Circuit circuit_from_json(std::string_view text);

}  // namespace provcirc
