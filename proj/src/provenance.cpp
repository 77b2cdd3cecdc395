#include "provcirc/provenance.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "json.hpp"
#include "provcirc/error.hpp"

namespace provcirc {

// ---------------------------------------------------------------------------
// Proof trees

namespace {

bool tight_below(const ProofTree& t, std::set<GroundAtom>& path) {
  if (t.leaf) return true;
  if (!path.insert(t.fact).second) return false;
  bool ok = std::all_of(t.children.begin(), t.children.end(), [&](const ProofTree& c) { return tight_below(c, path); });
  path.erase(t.fact);
  return ok;
}

class TreeEnumerator {
 public:
  TreeEnumerator(const GroundedProgram& g, const Database& db, std::size_t limit)
      : g_(g), db_(db), limit_(limit), on_path_(g.idb_facts.size(), false) {}

  std::vector<ProofTree> trees(std::size_t idb) {
    std::vector<ProofTree> out;
    on_path_[idb] = true;
    for (std::size_t ri : g_.rules_by_head[idb]) {
      const GroundRule& gr = g_.rules[ri];
      std::vector<std::vector<ProofTree>> options;
      bool viable = true;
      for (const auto& ref : gr.body) {
        if (!ref.idb) {
          ProofTree leaf;
          leaf.fact = db_.fact(static_cast<FactVar>(ref.index)).atom;
          leaf.leaf = static_cast<FactVar>(ref.index);
          options.push_back({std::move(leaf)});
          continue;
        }
        if (on_path_[ref.index]) {
          viable = false;
          break;
        }
        options.push_back(trees(ref.index));
        if (options.back().empty()) {
          viable = false;
          break;
        }
      }
      if (!viable) continue;
      std::vector<std::size_t> pick(options.size(), 0);
      for (;;) {
        ProofTree t;
        t.fact = g_.idb_facts[idb];
        t.ground_rule = ri;
        for (std::size_t k = 0; k < options.size(); ++k) t.children.push_back(options[k][pick[k]]);
        out.push_back(std::move(t));
        if (out.size() > limit_) {
          fail(ErrorCode::LimitExceeded, "more than " + std::to_string(limit_) + " tight proof trees");
        }
        std::size_t k = options.size();
        bool done = true;
        while (k > 0) {
          --k;
          if (++pick[k] < options[k].size()) {
            done = false;
            break;
          }
          pick[k] = 0;
        }
        if (done) break;
      }
    }
    on_path_[idb] = false;
    return out;
  }

 private:
  const GroundedProgram& g_;
  const Database& db_;
  std::size_t limit_;
  std::vector<bool> on_path_;
};

}  // namespace

bool is_tight(const ProofTree& tree) {
  std::set<GroundAtom> path;
  return tight_below(tree, path);
}

std::vector<ProofTree> enumerate_tight_trees(const GroundedProgram& g, const Database& db, const GroundAtom& fact,
                                             std::size_t limit) {
  auto idb = g.find_idb(fact);
  if (!idb) return {};
  return TreeEnumerator(g, db, limit).trees(*idb);
}

std::vector<ProofTree> enumerate_tight_trees(const Program& program, const Database& db, const GroundAtom& fact,
                                             std::size_t limit) {
  if (!program.is_idb(fact.predicate)) {
    fail(ErrorCode::InvalidArgument, to_string(fact) + " is not an IDB fact");
  }
  return enumerate_tight_trees(ground(program, db), db, fact, limit);
}

// ---------------------------------------------------------------------------
// Monomials

Monomial monomial_of(const ProofTree& tree) {
  std::map<FactVar, std::uint32_t> exps;
  std::function<void(const ProofTree&)> walk = [&](const ProofTree& t) {
    if (t.leaf) ++exps[*t.leaf];
    for (const auto& c : t.children) walk(c);
  };
  walk(tree);
  return {exps.begin(), exps.end()};
}

Monomial multiply(const Monomial& a, const Monomial& b) {
  Monomial out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].first < a[i].first) {
      out.push_back(b[j++]);
    } else {
      out.emplace_back(a[i].first, a[i].second + b[j].second);
      ++i;
      ++j;
    }
  }
  return out;
}

bool divides(const Monomial& a, const Monomial& b) {
  std::size_t j = 0;
  for (const auto& [v, e] : a) {
    while (j < b.size() && b[j].first < v) ++j;
    if (j == b.size() || b[j].first != v || b[j].second < e) return false;
  }
  return true;
}

Monomial flatten(const Monomial& m) {
  Monomial out = m;
  for (auto& p : out) p.second = 1;
  return out;
}

// ---------------------------------------------------------------------------
// Polynomials

namespace {

std::size_t degree(const Monomial& m) {
  std::size_t d = 0;
  for (const auto& p : m) d += p.second;
  return d;
}

}  // namespace

Polynomial absorb_reduce(std::vector<Monomial> monomials) {
  std::sort(monomials.begin(), monomials.end());
  monomials.erase(std::unique(monomials.begin(), monomials.end()), monomials.end());
  // A divisor has no larger degree, so scanning by degree lets each candidate
  // be checked against the already-kept minimal ones only.
  std::vector<std::size_t> order(monomials.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return degree(monomials[a]) < degree(monomials[b]); });
  std::vector<std::size_t> kept;
  for (std::size_t i : order) {
    bool absorbed = std::any_of(kept.begin(), kept.end(), [&](std::size_t k) { return divides(monomials[k], monomials[i]); });
    if (!absorbed) kept.push_back(i);
  }
  Polynomial p;
  for (std::size_t k : kept) p.monomials.push_back(std::move(monomials[k]));
  std::sort(p.monomials.begin(), p.monomials.end());
  return p;
}

Polynomial flatten(const Polynomial& p) {
  std::vector<Monomial> ms;
  ms.reserve(p.monomials.size());
  for (const auto& m : p.monomials) ms.push_back(flatten(m));
  return absorb_reduce(std::move(ms));
}

Polynomial poly_zero() { return {}; }
Polynomial poly_one() { return Polynomial{{Monomial{}}}; }
Polynomial poly_var(FactVar v) { return Polynomial{{Monomial{{v, 1U}}}}; }

Polynomial poly_add(const Polynomial& a, const Polynomial& b, std::size_t cap) {
  std::vector<Monomial> ms = a.monomials;
  ms.insert(ms.end(), b.monomials.begin(), b.monomials.end());
  Polynomial out = absorb_reduce(std::move(ms));
  if (out.size() > cap) fail(ErrorCode::CapExceeded, "polynomial exceeds " + std::to_string(cap) + " monomials");
  return out;
}

Polynomial poly_mul(const Polynomial& a, const Polynomial& b, bool otimes_idem, std::size_t cap) {
  if (cap < SIZE_MAX / 32 && a.monomials.size() * b.monomials.size() > cap * 16 + 1024) {
    // The unreduced product is too large to even materialize sensibly.
    fail(ErrorCode::CapExceeded, "product of " + std::to_string(a.size()) + " and " + std::to_string(b.size()) +
                                     " monomials exceeds the cap");
  }
  std::vector<Monomial> ms;
  ms.reserve(a.monomials.size() * b.monomials.size());
  for (const auto& x : a.monomials) {
    for (const auto& y : b.monomials) {
      Monomial m = multiply(x, y);
      ms.push_back(otimes_idem ? flatten(m) : std::move(m));
    }
  }
  Polynomial out = absorb_reduce(std::move(ms));
  if (out.size() > cap) fail(ErrorCode::CapExceeded, "polynomial exceeds " + std::to_string(cap) + " monomials");
  return out;
}

Element evaluate(const Polynomial& p, const SemiringSpec& spec, const Assignment& assignment) {
  Element sum = spec.zero;
  for (const auto& m : p.monomials) {
    Element prod = spec.one;
    for (const auto& [v, e] : m) {
      auto it = assignment.find(v);
      if (it == assignment.end()) fail(ErrorCode::MissingAssignment, "no value for variable " + std::to_string(v));
      for (std::uint32_t k = 0; k < e; ++k) prod = spec.mul(prod, it->second);
    }
    sum = spec.add(sum, prod);
  }
  return sum;
}

Polynomial oracle_polynomial(const GroundedProgram& g, const Database& db, const GroundAtom& fact, bool otimes_idem,
                             std::size_t limit) {
  std::vector<Monomial> ms;
  for (const auto& t : enumerate_tight_trees(g, db, fact, limit)) {
    Monomial m = monomial_of(t);
    ms.push_back(otimes_idem ? flatten(m) : std::move(m));
  }
  return absorb_reduce(std::move(ms));
}

Polynomial oracle_polynomial(const Program& program, const Database& db, const GroundAtom& fact, bool otimes_idem,
                             std::size_t limit) {
  if (!program.is_idb(fact.predicate)) {
    fail(ErrorCode::InvalidArgument, to_string(fact) + " is not an IDB fact");
  }
  return oracle_polynomial(ground(program, db), db, fact, otimes_idem, limit);
}

std::string to_json(const Polynomial& p) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& m : p.monomials) {
    nlohmann::json obj = nlohmann::json::object();
    for (const auto& [v, e] : m) obj[std::to_string(v)] = e;
    arr.push_back(std::move(obj));
  }
  return arr.dump();
}

Polynomial polynomial_from_json(std::string_view text) {
  nlohmann::json arr;
  try {
    arr = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::SyntaxError, std::string("polynomial JSON: ") + e.what());
  }
  if (!arr.is_array()) fail(ErrorCode::SyntaxError, "polynomial JSON must be an array");
  std::vector<Monomial> ms;
  for (const auto& obj : arr) {
    if (!obj.is_object()) fail(ErrorCode::SyntaxError, "monomial must be an object");
    std::map<FactVar, std::uint32_t> exps;
    for (const auto& [k, v] : obj.items()) {
      if (!v.is_number_unsigned() || v.get<std::uint32_t>() == 0) {
        fail(ErrorCode::SyntaxError, "exponent must be a positive integer");
      }
      exps[static_cast<FactVar>(std::stoul(k))] = v.get<std::uint32_t>();
    }
    ms.emplace_back(exps.begin(), exps.end());
  }
  return absorb_reduce(std::move(ms));
}

std::string to_string(const Polynomial& p, const Database* db) {
  if (p.is_zero()) return "0";
  std::string out;
  for (std::size_t i = 0; i < p.monomials.size(); ++i) {
    if (i != 0) out += " + ";
    const auto& m = p.monomials[i];
    if (m.empty()) out += "1";
    for (std::size_t j = 0; j < m.size(); ++j) {
      if (j != 0) out += "*";
      auto [v, e] = m[j];
      out += db != nullptr && v < db->size() ? db->label(v) : "x" + std::to_string(v);
      if (e > 1) out += "^" + std::to_string(e);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Homomorphisms

namespace {

class HomSearch {
 public:
  HomSearch(const ConjunctiveQuery& from, const ConjunctiveQuery& to) : from_(from), to_(to) {}

  std::optional<VariableMapping> run() {
    if (from_.head.args.size() != to_.head.args.size()) {
      return std::nullopt;
    }
    for (std::size_t i = 0; i < from_.head.args.size(); ++i) {
      if (!bind(from_.head.args[i], to_.head.args[i])) return std::nullopt;
    }
    // Atoms with fewer candidates first.
    order_.resize(from_.body.size());
    for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
    auto candidates = [&](const Atom& a) {
      return std::count_if(to_.body.begin(), to_.body.end(), [&](const Atom& b) {
        return b.predicate == a.predicate && b.args.size() == a.args.size();
      });
    };
    std::stable_sort(order_.begin(), order_.end(), [&](std::size_t x, std::size_t y) {
      return candidates(from_.body[x]) < candidates(from_.body[y]);
    });
    if (search(0)) return mapping_;
    return std::nullopt;
  }

 private:
  bool bind(const Term& f, const Term& t) {
    if (!f.is_var()) return f == t;
    auto [it, inserted] = mapping_.emplace(f.name, t);
    if (!inserted) return it->second == t;
    trail_.push_back(f.name);
    return true;
  }

  bool search(std::size_t k) {
    if (k == order_.size()) return true;
    const Atom& a = from_.body[order_[k]];
    for (const Atom& b : to_.body) {
      if (b.predicate != a.predicate || b.args.size() != a.args.size()) continue;
      std::size_t mark = trail_.size();
      bool ok = true;
      for (std::size_t j = 0; j < a.args.size() && ok; ++j) ok = bind(a.args[j], b.args[j]);
      if (ok && search(k + 1)) return true;
      while (trail_.size() > mark) {
        mapping_.erase(trail_.back());
        trail_.pop_back();
      }
    }
    return false;
  }

  const ConjunctiveQuery& from_;
  const ConjunctiveQuery& to_;
  std::vector<std::size_t> order_;
  VariableMapping mapping_;
  std::vector<std::string> trail_;
};

}  // namespace

std::optional<VariableMapping> find_homomorphism(const ConjunctiveQuery& from, const ConjunctiveQuery& to) {
  return HomSearch(from, to).run();
}

}  // namespace provcirc
