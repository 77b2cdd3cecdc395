#include "provcirc/circuit.hpp"

#include <algorithm>
#include <set>

#include "json.hpp"
#include "provcirc/error.hpp"

namespace provcirc {

std::size_t GateHash::operator()(const Gate& g) const noexcept {
  std::size_t h = static_cast<std::size_t>(g.op);
  h = h * 0x9E3779B97F4A7C15ULL ^ g.var;
  h = h * 0x9E3779B97F4A7C15ULL ^ g.l;
  h = h * 0x9E3779B97F4A7C15ULL ^ g.r;
  return h;
}

namespace {

bool binary(GateOp op) { return op == GateOp::Add || op == GateOp::Mul; }

}  // namespace

Circuit::Circuit(std::vector<Gate> gates, GateId output) : gates_(std::move(gates)), output_(output) {
  if (gates_.empty()) fail(ErrorCode::InvalidCircuit, "circuit has no gates");
  if (output_ >= gates_.size()) fail(ErrorCode::InvalidCircuit, "output index out of range");
  for (std::size_t i = 0; i < gates_.size(); ++i) {
    const Gate& g = gates_[i];
    if (binary(g.op) && (g.l >= i || g.r >= i)) {
      fail(ErrorCode::InvalidCircuit, "gate " + std::to_string(i) + " references a later gate");
    }
  }
}

std::vector<FactVar> Circuit::input_vars() const {
  std::set<FactVar> vars;
  for (const auto& g : gates_)
    if (g.op == GateOp::Input) vars.insert(g.var);
  return {vars.begin(), vars.end()};
}

Metrics metrics(const Circuit& c) {
  std::vector<std::size_t> depth(c.size(), 0);
  std::vector<std::size_t> fanout(c.size(), 0);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Gate& g = c.gates()[i];
    if (!binary(g.op)) continue;
    depth[i] = 1 + std::max(depth[g.l], depth[g.r]);
    ++fanout[g.l];
    ++fanout[g.r];
  }
  return {c.size(), depth[c.output()], *std::max_element(fanout.begin(), fanout.end())};
}

// ---------------------------------------------------------------------------
// Builder

GateId CircuitBuilder::intern(const Gate& g) {
  auto [it, inserted] = index_.emplace(g, static_cast<GateId>(gates_.size()));
  if (inserted) gates_.push_back(g);
  return it->second;
}

GateId CircuitBuilder::input(FactVar var) { return intern({GateOp::Input, var, 0, 0}); }
GateId CircuitBuilder::zero() { return intern({GateOp::Zero, 0, 0, 0}); }
GateId CircuitBuilder::one() { return intern({GateOp::One, 0, 0, 0}); }

GateId CircuitBuilder::add(GateId a, GateId b) {
  if (gates_.at(a).op == GateOp::Zero) return b;
  if (gates_.at(b).op == GateOp::Zero) return a;
  if (a > b) std::swap(a, b);
  return intern({GateOp::Add, 0, a, b});
}

GateId CircuitBuilder::mul(GateId a, GateId b) {
  if (gates_.at(a).op == GateOp::Zero) return a;
  if (gates_.at(b).op == GateOp::Zero) return b;
  if (gates_.at(a).op == GateOp::One) return b;
  if (gates_.at(b).op == GateOp::One) return a;
  if (a > b) std::swap(a, b);
  return intern({GateOp::Mul, 0, a, b});
}

GateId CircuitBuilder::add_all(std::span<const GateId> xs) {
  if (xs.empty()) return zero();
  if (xs.size() == 1) return xs[0];
  std::size_t half = (xs.size() + 1) / 2;
  GateId left = add_all(xs.first(half));
  GateId right = add_all(xs.subspan(half));
  return add(left, right);
}

GateId CircuitBuilder::mul_all(std::span<const GateId> xs) {
  if (xs.empty()) return one();
  if (xs.size() == 1) return xs[0];
  std::size_t half = (xs.size() + 1) / 2;
  GateId left = mul_all(xs.first(half));
  GateId right = mul_all(xs.subspan(half));
  return mul(left, right);
}

Circuit CircuitBuilder::finalize(GateId output) const {
  std::vector<bool> live(gates_.size(), false);
  live.at(output) = true;
  for (std::size_t i = output + 1; i-- > 0;) {
    if (!live[i] || !binary(gates_[i].op)) continue;
    live[gates_[i].l] = true;
    live[gates_[i].r] = true;
  }
  std::vector<GateId> renum(gates_.size(), 0);
  std::vector<Gate> out;
  for (std::size_t i = 0; i <= output; ++i) {
    if (!live[i]) continue;
    Gate g = gates_[i];
    if (binary(g.op)) {
      g.l = renum[g.l];
      g.r = renum[g.r];
    }
    renum[i] = static_cast<GateId>(out.size());
    out.push_back(g);
  }
  return Circuit(std::move(out), renum[output]);
}

// ---------------------------------------------------------------------------
// Evaluation

Element evaluate(const Circuit& c, const SemiringSpec& spec, const Assignment& assignment) {
  std::vector<Element> val(c.size(), spec.zero);
  std::set<FactVar> missing;
  for (const auto& g : c.gates())
    if (g.op == GateOp::Input && !assignment.contains(g.var)) missing.insert(g.var);
  if (!missing.empty()) {
    std::string names;
    for (FactVar v : missing) names += (names.empty() ? "" : ", ") + std::to_string(v);
    fail(ErrorCode::MissingAssignment, "no value for input variables " + names);
  }
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Gate& g = c.gates()[i];
    switch (g.op) {
      case GateOp::Input: val[i] = assignment.at(g.var); break;
      case GateOp::Zero: val[i] = spec.zero; break;
      case GateOp::One: val[i] = spec.one; break;
      case GateOp::Add: val[i] = spec.add(val[g.l], val[g.r]); break;
      case GateOp::Mul: val[i] = spec.mul(val[g.l], val[g.r]); break;
    }
  }
  return val[c.output()];
}

Polynomial symbolic_polynomial(const Circuit& c, bool otimes_idem, std::size_t monomial_cap) {
  std::vector<Polynomial> val(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Gate& g = c.gates()[i];
    switch (g.op) {
      case GateOp::Input: val[i] = poly_var(g.var); break;
      case GateOp::Zero: val[i] = poly_zero(); break;
      case GateOp::One: val[i] = poly_one(); break;
      case GateOp::Add: val[i] = poly_add(val[g.l], val[g.r], monomial_cap); break;
      case GateOp::Mul: val[i] = poly_mul(val[g.l], val[g.r], otimes_idem, monomial_cap); break;
    }
  }
  return val[c.output()];
}

Circuit reinterpret_boolean(const Circuit& c) { return c; }

Assignment support_assignment(const SemiringSpec& spec, const Assignment& assignment) {
  Assignment out;
  for (const auto& [v, e] : assignment) out.emplace(v, Element{support(spec, e)});
  return out;
}

// ---------------------------------------------------------------------------
// Formulas

Circuit expand_to_formula(const Circuit& c, std::size_t depth_budget) {
  Metrics m = metrics(c);
  if (m.depth > depth_budget) {
    fail(ErrorCode::DepthBudgetExceeded,
         "depth " + std::to_string(m.depth) + " exceeds budget " + std::to_string(depth_budget));
  }
  std::vector<Gate> out;
  // Post-order copy; an explicit stack avoids deep recursion on long chains.
  struct Frame {
    GateId src;
    int stage;
    GateId left;
  };
  std::vector<Frame> stack{{c.output(), 0, 0}};
  GateId result = 0;
  while (!stack.empty()) {
    Frame& f = stack.back();
    const Gate& g = c.gate(f.src);
    if (!binary(g.op)) {
      result = static_cast<GateId>(out.size());
      out.push_back(g);
      stack.pop_back();
      continue;
    }
    if (f.stage == 0) {
      f.stage = 1;
      stack.push_back({g.l, 0, 0});
    } else if (f.stage == 1) {
      f.left = result;
      f.stage = 2;
      stack.push_back({g.r, 0, 0});
    } else {
      Gate copy = g;
      copy.l = f.left;
      copy.r = result;
      result = static_cast<GateId>(out.size());
      out.push_back(copy);
      stack.pop_back();
    }
  }
  return Circuit(std::move(out), result);
}

bool is_formula(const Circuit& c) {
  std::vector<std::size_t> fanout(c.size(), 0);
  for (const auto& g : c.gates()) {
    if (!binary(g.op)) continue;
    ++fanout[g.l];
    ++fanout[g.r];
  }
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i == c.output() ? fanout[i] != 0 : fanout[i] != 1) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Export

std::string to_dot(const Circuit& c, const std::vector<std::string>* labels) {
  std::string out = "digraph circuit {\n  rankdir=BT;\n";
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Gate& g = c.gates()[i];
    std::string label;
    switch (g.op) {
      case GateOp::Input:
        label = labels != nullptr && g.var < labels->size() ? (*labels)[g.var] : "x" + std::to_string(g.var);
        break;
      case GateOp::Zero: label = "0"; break;
      case GateOp::One: label = "1"; break;
      case GateOp::Add: label = "+"; break;
      case GateOp::Mul: label = "*"; break;
    }
    std::string shape = binary(g.op) ? "circle" : "box";
    std::string extra = i == c.output() ? ", peripheries=2" : "";
    std::string escaped;
    for (char ch : label) {
      if (ch == '"' || ch == '\\') escaped += '\\';
      escaped += ch;
    }
    out += "  g" + std::to_string(i) + " [label=\"" + escaped + "\", shape=" + shape + extra + "];\n";
  }
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Gate& g = c.gates()[i];
    if (!binary(g.op)) continue;
    out += "  g" + std::to_string(g.l) + " -> g" + std::to_string(i) + ";\n";
    out += "  g" + std::to_string(g.r) + " -> g" + std::to_string(i) + ";\n";
  }
  return out + "}\n";
}

std::string to_json(const Circuit& c) {
  nlohmann::json gates = nlohmann::json::array();
  for (const auto& g : c.gates()) {
    switch (g.op) {
      case GateOp::Input: gates.push_back({{"op", "in"}, {"var", g.var}}); break;
      case GateOp::Zero: gates.push_back({{"op", "zero"}}); break;
      case GateOp::One: gates.push_back({{"op", "one"}}); break;
      case GateOp::Add: gates.push_back({{"op", "add"}, {"l", g.l}, {"r", g.r}}); break;
      case GateOp::Mul: gates.push_back({{"op", "mul"}, {"l", g.l}, {"r", g.r}}); break;
    }
  }
  nlohmann::json doc = {{"gates", gates}, {"output", c.output()}};
  return doc.dump();
}

Circuit circuit_from_json(std::string_view text) {
  try {
    auto doc = nlohmann::json::parse(text);
    std::vector<Gate> gates;
    for (const auto& j : doc.at("gates")) {
      std::string op = j.at("op").get<std::string>();
      Gate g;
      if (op == "in") {
        g.op = GateOp::Input;
        g.var = j.at("var").get<FactVar>();
      } else if (op == "zero") {
        g.op = GateOp::Zero;
      } else if (op == "one") {
        g.op = GateOp::One;
      } else if (op == "add" || op == "mul") {
        g.op = op == "add" ? GateOp::Add : GateOp::Mul;
        g.l = j.at("l").get<GateId>();
        g.r = j.at("r").get<GateId>();
      } else {
        fail(ErrorCode::InvalidCircuit, "unknown gate op '" + op + "'");
      }
      gates.push_back(g);
    }
    return Circuit(std::move(gates), doc.at("output").get<GateId>());
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidCircuit, std::string("circuit JSON: ") + e.what());
  }
}

}  // namespace provcirc
