#include "provcirc/datalog.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <sstream>

#include "provcirc/error.hpp"

namespace provcirc {

namespace {

// ---------------------------------------------------------------------------
// Lexer

enum class Tok { Ident, Constant, LParen, RParen, Comma, Dot, Implies, At, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 1;
  int col = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    skip_space();
    Token t;
    t.line = line_;
    t.col = col_;
    if (pos_ >= src_.size()) return t;
    char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
        advance();
      }
      t.kind = Tok::Ident;
      t.text = std::string(src_.substr(start, pos_ - start));
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
      t.kind = Tok::Constant;
      t.text = std::string(src_.substr(start, pos_ - start));
      return t;
    }
    if (c == '"' || c == '\'') {
      char quote = c;
      advance();
      std::size_t start = pos_;
      while (pos_ < src_.size() && src_[pos_] != quote && src_[pos_] != '\n') advance();
      if (pos_ >= src_.size() || src_[pos_] != quote) error(t, "unterminated constant");
      t.kind = Tok::Constant;
      t.text = std::string(src_.substr(start, pos_ - start));
      advance();
      return t;
    }
    advance();
    switch (c) {
      case '(': t.kind = Tok::LParen; return t;
      case ')': t.kind = Tok::RParen; return t;
      case ',': t.kind = Tok::Comma; return t;
      case '.': t.kind = Tok::Dot; return t;
      case '@': t.kind = Tok::At; return t;
      case ':':
        if (pos_ < src_.size() && src_[pos_] == '-') {
          advance();
          t.kind = Tok::Implies;
          return t;
        }
        break;
      default: break;
    }
    error(t, std::string("unexpected character '") + c + "'");
  }

  [[noreturn]] static void error(const Token& at, const std::string& msg) {
    fail(ErrorCode::SyntaxError,
         "line " + std::to_string(at.line) + ", column " + std::to_string(at.col) + ": " + msg);
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '%') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  explicit Parser(std::string_view src) : lex_(src) { bump(); }

  void parse(std::vector<Rule>& rules, std::optional<std::string>& target) {
    while (cur_.kind != Tok::End) {
      if (cur_.kind == Tok::At) {
        bump();
        Token directive = expect(Tok::Ident, "directive name");
        if (directive.text != "target") Lexer::error(directive, "unknown directive @" + directive.text);
        target = expect(Tok::Ident, "target predicate").text;
        if (cur_.kind == Tok::Dot) bump();
        continue;
      }
      rules.push_back(rule());
    }
  }

 private:
  void bump() { cur_ = lex_.next(); }

  Token expect(Tok kind, const char* what) {
    if (cur_.kind != kind) Lexer::error(cur_, std::string("expected ") + what);
    Token t = cur_;
    bump();
    return t;
  }

  Atom atom() {
    Atom a;
    a.predicate = expect(Tok::Ident, "predicate name").text;
    expect(Tok::LParen, "'('");
    if (cur_.kind != Tok::RParen) {
      for (;;) {
        if (cur_.kind == Tok::Ident) {
          a.args.push_back(Term::var(cur_.text));
        } else if (cur_.kind == Tok::Constant) {
          a.args.push_back(Term::constant(cur_.text));
        } else {
          Lexer::error(cur_, "expected a variable or constant");
        }
        bump();
        if (cur_.kind != Tok::Comma) break;
        bump();
      }
    }
    expect(Tok::RParen, "')'");
    return a;
  }

  Rule rule() {
    Rule r;
    r.head = atom();
    if (cur_.kind == Tok::Implies) {
      bump();
      r.body.push_back(atom());
      while (cur_.kind == Tok::Comma) {
        bump();
        r.body.push_back(atom());
      }
    }
    expect(Tok::Dot, "'.' at end of rule");
    return r;
  }

  Lexer lex_;
  Token cur_;
};

std::set<std::string> variables_of(const std::vector<Atom>& atoms) {
  std::set<std::string> out;
  for (const auto& a : atoms)
    for (const auto& t : a.args)
      if (t.is_var()) out.insert(t.name);
  return out;
}

bool is_chain_rule(const Rule& r) {
  const auto& h = r.head;
  if (h.args.size() != 2 || !h.args[0].is_var() || !h.args[1].is_var()) return false;
  if (h.args[0].name == h.args[1].name || r.body.empty()) return false;
  std::set<std::string> seen{h.args[0].name};
  std::string at = h.args[0].name;
  for (std::size_t i = 0; i < r.body.size(); ++i) {
    const auto& b = r.body[i];
    if (b.args.size() != 2 || !b.args[0].is_var() || !b.args[1].is_var()) return false;
    if (b.args[0].name != at) return false;
    at = b.args[1].name;
    bool last = i + 1 == r.body.size();
    if (last) {
      if (at != h.args[1].name) return false;
    } else if (!seen.insert(at).second || at == h.args[1].name) {
      return false;
    }
  }
  return true;
}

// Union-find over variable names with the usual connectivity query.
bool variable_graph_connected(const std::vector<Atom>& atoms, const std::set<std::string>& required) {
  std::map<std::string, std::string> parent;
  std::function<std::string(const std::string&)> find = [&](const std::string& v) -> std::string {
    auto& p = parent[v];
    if (p.empty() || p == v) {
      p = v;
      return v;
    }
    p = find(p);
    return p;
  };
  for (const auto& a : atoms) {
    std::string first;
    for (const auto& t : a.args) {
      if (!t.is_var()) continue;
      find(t.name);
      if (first.empty()) {
        first = t.name;
      } else {
        parent[find(t.name)] = find(first);
      }
    }
  }
  for (const auto& v : required)
    if (!parent.contains(v)) return false;
  std::set<std::string> roots;
  for (const auto& [v, _] : parent) roots.insert(find(v));
  return roots.size() <= 1;
}

}  // namespace

// ---------------------------------------------------------------------------
// Program

Program::Program(std::vector<Rule> rules, std::string target) : rules_(std::move(rules)), target_(std::move(target)) {
  if (rules_.empty()) fail(ErrorCode::EmptyProgram, "program has no rules");
  for (const auto& r : rules_) idbs_.insert(r.head.predicate);
  auto note_arity = [&](const Atom& a) {
    auto [it, inserted] = arities_.emplace(a.predicate, a.args.size());
    if (!inserted && it->second != a.args.size()) {
      fail(ErrorCode::ArityMismatch, "predicate " + a.predicate + " used with arities " +
                                         std::to_string(it->second) + " and " + std::to_string(a.args.size()));
    }
  };
  for (const auto& r : rules_) {
    note_arity(r.head);
    for (const auto& b : r.body) note_arity(b);
    auto body_vars = variables_of(r.body);
    for (const auto& t : r.head.args) {
      if (t.is_var() && !body_vars.contains(t.name)) {
        fail(ErrorCode::UnsafeRule, "head variable " + t.name + " does not occur in the body of " + to_string(r));
      }
    }
  }
  if (target_.empty()) target_ = rules_.front().head.predicate;
  if (!idbs_.contains(target_)) fail(ErrorCode::UndeclaredTarget, target_ + " is not defined by any rule");
  classification_ = classify(*this);
}

bool Program::is_idb(std::string_view predicate) const { return idbs_.contains(predicate); }

std::optional<std::size_t> Program::arity(std::string_view predicate) const {
  auto it = arities_.find(predicate);
  if (it == arities_.end()) return std::nullopt;
  return it->second;
}

bool Program::is_recursive(const Rule& rule) const {
  return std::any_of(rule.body.begin(), rule.body.end(), [&](const Atom& a) { return is_idb(a.predicate); });
}

Program Program::with_target(std::string target) const { return Program(rules_, std::move(target)); }

Program parse_program(std::string_view text) {
  std::vector<Rule> rules;
  std::optional<std::string> target;
  Parser(text).parse(rules, target);
  if (rules.empty()) fail(ErrorCode::EmptyProgram, "program text contains no rules");
  return Program(std::move(rules), target.value_or(""));
}

Classification classify(const Program& program) {
  Classification c;
  c.linear = true;
  c.monadic = true;
  c.chain = true;
  c.connected = true;
  c.left_linear = true;
  for (const auto& r : program.rules()) {
    std::vector<Atom> edb_atoms;
    std::vector<std::size_t> idb_positions;
    for (std::size_t i = 0; i < r.body.size(); ++i) {
      if (program.is_idb(r.body[i].predicate)) {
        idb_positions.push_back(i);
      } else {
        edb_atoms.push_back(r.body[i]);
      }
    }
    if (idb_positions.size() > 1) c.linear = false;
    if (r.head.args.size() != 1) c.monadic = false;
    bool chain = is_chain_rule(r);
    if (!chain) c.chain = false;
    if (!chain || idb_positions.size() > 1 || (idb_positions.size() == 1 && idb_positions[0] != 0)) {
      c.left_linear = false;
    }
    std::set<std::string> required;
    for (const auto& t : r.head.args)
      if (t.is_var()) required.insert(t.name);
    for (std::size_t i : idb_positions)
      for (const auto& t : r.body[i].args)
        if (t.is_var()) required.insert(t.name);
    if (!variable_graph_connected(edb_atoms, required)) c.connected = false;
  }
  return c;
}

std::string to_string(const Term& t) { return t.is_var() ? t.name : "\"" + t.name + "\""; }

std::string to_string(const Atom& a) {
  std::string out = a.predicate + "(";
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (i != 0) out += ",";
    out += to_string(a.args[i]);
  }
  return out + ")";
}

std::string to_string(const Rule& r) {
  std::string out = to_string(r.head);
  if (!r.body.empty()) {
    out += " :- ";
    for (std::size_t i = 0; i < r.body.size(); ++i) {
      if (i != 0) out += ", ";
      out += to_string(r.body[i]);
    }
  }
  return out + ".";
}

std::string to_string(const Program& p) {
  std::string out = "@target " + p.target() + "\n";
  for (const auto& r : p.rules()) out += to_string(r) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Database

std::size_t GroundAtomHash::operator()(const GroundAtom& a) const noexcept {
  std::size_t h = std::hash<std::string>{}(a.predicate);
  for (const auto& s : a.args) h = h * 1000003U ^ std::hash<std::string>{}(s);
  return h;
}

GroundAtom parse_ground_atom(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  text = trim(text);
  auto open = text.find('(');
  if (open == std::string_view::npos || text.back() != ')') {
    fail(ErrorCode::SyntaxError, "expected a ground atom P(a,b), got '" + std::string(text) + "'");
  }
  GroundAtom a;
  a.predicate = std::string(trim(text.substr(0, open)));
  if (a.predicate.empty()) fail(ErrorCode::SyntaxError, "missing predicate in '" + std::string(text) + "'");
  std::string_view inner = text.substr(open + 1, text.size() - open - 2);
  if (trim(inner).empty()) return a;
  std::size_t start = 0;
  for (;;) {
    auto comma = inner.find(',', start);
    std::string_view piece = trim(inner.substr(start, comma == std::string_view::npos ? inner.npos : comma - start));
    if (piece.size() >= 2 && (piece.front() == '"' || piece.front() == '\'') && piece.back() == piece.front()) {
      piece = piece.substr(1, piece.size() - 2);
    }
    if (piece.empty()) fail(ErrorCode::SyntaxError, "empty argument in '" + std::string(text) + "'");
    a.args.emplace_back(piece);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return a;
}

std::string to_string(const GroundAtom& a) {
  std::string out = a.predicate + "(";
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (i != 0) out += ",";
    out += a.args[i];
  }
  return out + ")";
}

FactVar Database::add(GroundAtom atom, std::optional<std::string> weight) {
  if (auto it = index_.find(atom); it != index_.end()) {
    const auto& existing = facts_[it->second];
    if (weight && existing.weight && *weight != *existing.weight) {
      fail(ErrorCode::InvalidArgument, "fact " + to_string(atom) + " given two different weights");
    }
    if (weight && !existing.weight) facts_[it->second].weight = std::move(weight);
    return it->second;
  }
  auto pred = by_predicate_.find(atom.predicate);
  if (pred != by_predicate_.end() && !pred->second.empty() &&
      facts_[pred->second.front()].atom.args.size() != atom.args.size()) {
    fail(ErrorCode::ArityMismatch, "predicate " + atom.predicate + " used with different arities in the database");
  }
  auto var = static_cast<FactVar>(facts_.size());
  index_.emplace(atom, var);
  by_predicate_[atom.predicate].push_back(var);
  facts_.push_back(Fact{std::move(atom), var, std::move(weight)});
  return var;
}

std::optional<FactVar> Database::find(const GroundAtom& atom) const {
  auto it = index_.find(atom);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const std::vector<FactVar>& Database::facts_of(std::string_view predicate) const {
  static const std::vector<FactVar> kNone;
  auto it = by_predicate_.find(predicate);
  return it == by_predicate_.end() ? kNone : it->second;
}

std::set<std::string> Database::constants() const {
  std::set<std::string> out;
  for (const auto& f : facts_) out.insert(f.atom.args.begin(), f.atom.args.end());
  return out;
}

Database parse_database(std::string_view text, const Program* program) {
  Database db;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#' || line[first] == '%') continue;
    std::vector<std::string> cols;
    char sep = line.find('\t') != std::string::npos ? '\t' : (line.find(',') != std::string::npos ? ',' : ' ');
    std::string cell;
    std::istringstream cells(line);
    while (std::getline(cells, cell, sep)) {
      auto b = cell.find_first_not_of(" \t");
      auto e = cell.find_last_not_of(" \t");
      if (b == std::string::npos) {
        if (sep == ' ') continue;
        fail(ErrorCode::SyntaxError, "line " + std::to_string(lineno) + ": empty column");
      }
      cols.push_back(cell.substr(b, e - b + 1));
    }
    GroundAtom atom;
    atom.predicate = cols.front();
    std::optional<std::string> weight;
    std::size_t nargs = cols.size() - 1;
    if (program != nullptr) {
      if (auto arity = program->arity(atom.predicate)) {
        if (nargs == *arity + 1) {
          weight = cols.back();
          nargs = *arity;
        } else if (nargs != *arity) {
          fail(ErrorCode::ArityMismatch, "line " + std::to_string(lineno) + ": " + atom.predicate + " expects " +
                                             std::to_string(*arity) + " arguments");
        }
      }
    }
    atom.args.assign(cols.begin() + 1, cols.begin() + 1 + static_cast<std::ptrdiff_t>(nargs));
    db.add(std::move(atom), std::move(weight));
  }
  return db;
}

Assignment weights_assignment(const Database& db, const SemiringSpec& spec) {
  Assignment out;
  std::string missing;
  for (const auto& f : db.facts()) {
    if (!f.weight) {
      if (!missing.empty()) missing += ", ";
      missing += to_string(f.atom);
      continue;
    }
    out.emplace(f.var, spec.parse(*f.weight));
  }
  if (!missing.empty()) fail(ErrorCode::MissingAssignment, "facts without weight: " + missing);
  return out;
}

// ---------------------------------------------------------------------------
// Grounding

std::optional<std::size_t> GroundedProgram::find_idb(const GroundAtom& a) const {
  auto it = idb_index.find(a);
  if (it == idb_index.end()) return std::nullopt;
  return it->second;
}

GroundedProgram ground(const Program& program, const Database& db) {
  for (const auto& f : db.facts()) {
    if (program.is_idb(f.atom.predicate)) {
      fail(ErrorCode::InvalidArgument, "database holds a fact of IDB predicate " + f.atom.predicate);
    }
    if (auto arity = program.arity(f.atom.predicate); arity && *arity != f.atom.args.size()) {
      fail(ErrorCode::ArityMismatch, "fact " + to_string(f.atom) + " does not match arity " + std::to_string(*arity));
    }
  }
  std::set<std::string> domain_set = db.constants();
  for (const auto& r : program.rules()) {
    for (const auto& t : r.head.args)
      if (!t.is_var()) domain_set.insert(t.name);
    for (const auto& a : r.body)
      for (const auto& t : a.args)
        if (!t.is_var()) domain_set.insert(t.name);
  }
  std::vector<std::string> domain(domain_set.begin(), domain_set.end());
  std::unordered_map<std::string, int> domain_id;
  for (std::size_t i = 0; i < domain.size(); ++i) domain_id.emplace(domain[i], static_cast<int>(i));

  GroundedProgram g;
  auto intern_idb = [&](GroundAtom atom) -> std::size_t {
    auto [it, inserted] = g.idb_index.emplace(atom, g.idb_facts.size());
    if (inserted) {
      g.idb_facts.push_back(std::move(atom));
      g.rules_by_head.emplace_back();
    }
    return it->second;
  };

  for (std::size_t ri = 0; ri < program.rules().size(); ++ri) {
    const Rule& rule = program.rules()[ri];
    std::vector<std::string> vars;
    std::unordered_map<std::string, int> var_id;
    auto note = [&](const Atom& a) {
      for (const auto& t : a.args) {
        if (t.is_var() && !var_id.contains(t.name)) {
          var_id.emplace(t.name, static_cast<int>(vars.size()));
          vars.push_back(t.name);
        }
      }
    };
    note(rule.head);
    for (const auto& a : rule.body) note(a);

    std::vector<std::size_t> edb_atoms;
    for (std::size_t i = 0; i < rule.body.size(); ++i)
      if (!program.is_idb(rule.body[i].predicate)) edb_atoms.push_back(i);

    std::vector<int> binding(vars.size(), -1);
    std::vector<std::vector<int>> substitutions;

    auto enumerate_free = [&]() {
      std::vector<std::size_t> free;
      for (std::size_t v = 0; v < binding.size(); ++v)
        if (binding[v] < 0) free.push_back(v);
      if (!free.empty() && domain.empty()) return;
      std::vector<int> tuple = binding;
      std::vector<std::size_t> counter(free.size(), 0);
      for (;;) {
        for (std::size_t k = 0; k < free.size(); ++k) tuple[free[k]] = static_cast<int>(counter[k]);
        substitutions.push_back(tuple);
        std::size_t k = free.size();
        while (k > 0) {
          --k;
          if (++counter[k] < domain.size()) break;
          counter[k] = 0;
          if (k == 0) return;
        }
        if (free.empty()) return;
      }
    };

    std::function<void(std::size_t)> match = [&](std::size_t pos) {
      if (pos == edb_atoms.size()) {
        enumerate_free();
        return;
      }
      const Atom& atom = rule.body[edb_atoms[pos]];
      for (FactVar fv : db.facts_of(atom.predicate)) {
        const auto& args = db.fact(fv).atom.args;
        std::vector<std::size_t> newly_bound;
        bool ok = true;
        for (std::size_t j = 0; j < atom.args.size() && ok; ++j) {
          const Term& t = atom.args[j];
          int c = domain_id.at(args[j]);
          if (!t.is_var()) {
            ok = t.name == args[j];
          } else {
            int& slot = binding[static_cast<std::size_t>(var_id.at(t.name))];
            if (slot < 0) {
              slot = c;
              newly_bound.push_back(static_cast<std::size_t>(var_id.at(t.name)));
            } else {
              ok = slot == c;
            }
          }
        }
        if (ok) match(pos + 1);
        for (std::size_t v : newly_bound) binding[v] = -1;
      }
    };
    match(0);
    std::sort(substitutions.begin(), substitutions.end());
    substitutions.erase(std::unique(substitutions.begin(), substitutions.end()), substitutions.end());

    auto instantiate = [&](const Atom& a, const std::vector<int>& sub) {
      GroundAtom out;
      out.predicate = a.predicate;
      out.args.reserve(a.args.size());
      for (const auto& t : a.args) {
        out.args.push_back(t.is_var() ? domain[static_cast<std::size_t>(sub[static_cast<std::size_t>(var_id.at(t.name))])]
                                      : t.name);
      }
      return out;
    };

    for (const auto& sub : substitutions) {
      GroundRule gr;
      gr.rule = ri;
      gr.head = intern_idb(instantiate(rule.head, sub));
      for (const auto& b : rule.body) {
        GroundAtom ga = instantiate(b, sub);
        if (program.is_idb(b.predicate)) {
          gr.body.push_back(BodyRef{true, intern_idb(std::move(ga))});
        } else {
          auto fv = db.find(ga);
          gr.body.push_back(BodyRef{false, *fv});
        }
      }
      g.rules_by_head[gr.head].push_back(g.rules.size());
      g.rules.push_back(std::move(gr));
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Naive evaluation

Element NaiveResult::value(const GroundAtom& fact, const SemiringSpec& spec) const {
  auto it = valuation.find(fact);
  return it == valuation.end() ? spec.zero : it->second;
}

std::vector<Element> ico_step(const GroundedProgram& g, const SemiringSpec& spec,
                              const std::vector<Element>& edb_values, const std::vector<Element>& idb_values) {
  std::vector<Element> next(g.idb_facts.size(), spec.zero);
  for (const auto& gr : g.rules) {
    Element product = spec.one;
    for (const auto& ref : gr.body) {
      product = spec.mul(product, ref.idb ? idb_values[ref.index] : edb_values[ref.index]);
    }
    next[gr.head] = spec.add(next[gr.head], product);
  }
  return next;
}

NaiveResult naive_eval(const Program& program, const Database& db, const SemiringSpec& spec,
                       const Assignment& assignment, std::optional<std::size_t> max_iters) {
  GroundedProgram g = ground(program, db);
  std::vector<Element> edb(db.size(), spec.zero);
  std::vector<bool> used(db.size(), false);
  for (const auto& gr : g.rules)
    for (const auto& ref : gr.body)
      if (!ref.idb) used[ref.index] = true;
  std::string missing;
  for (FactVar v = 0; v < db.size(); ++v) {
    if (!used[v]) continue;
    auto it = assignment.find(v);
    if (it == assignment.end()) {
      if (!missing.empty()) missing += ", ";
      missing += db.label(v);
    } else {
      edb[v] = it->second;
    }
  }
  if (!missing.empty()) fail(ErrorCode::MissingAssignment, "no value for " + missing);

  std::size_t cap = max_iters.value_or(g.idb_facts.size() + 1);
  std::vector<Element> current(g.idb_facts.size(), spec.zero);
  for (std::size_t app = 1; app <= cap; ++app) {
    std::vector<Element> next = ico_step(g, spec, edb, current);
    if (next == current) {
      NaiveResult result;
      result.iterations = app - 1;
      result.applications = app;
      for (std::size_t i = 0; i < g.idb_facts.size(); ++i) result.valuation.emplace(g.idb_facts[i], current[i]);
      return result;
    }
    current = std::move(next);
  }
  fail(ErrorCode::NotStable, "no fixpoint within " + std::to_string(cap) + " iterations over " + spec.name);
}

NaiveResult naive_eval(const Program& program, const Database& db, const SemiringSpec& spec,
                       std::optional<std::size_t> max_iters) {
  return naive_eval(program, db, spec, weights_assignment(db, spec), max_iters);
}

// ---------------------------------------------------------------------------
// Conjunctive queries and expansions

std::string to_string(const ConjunctiveQuery& q) {
  std::string out = to_string(q.head) + " :- ";
  for (std::size_t i = 0; i < q.body.size(); ++i) {
    if (i != 0) out += ", ";
    out += to_string(q.body[i]);
  }
  return out + ".";
}

ConjunctiveQuery parse_cq(std::string_view text) {
  std::vector<Rule> rules;
  std::optional<std::string> target;
  Parser(text).parse(rules, target);
  if (rules.size() != 1) fail(ErrorCode::SyntaxError, "expected exactly one conjunctive query");
  return {rules[0].head, rules[0].body};
}

namespace {

class Unifier {
 public:
  Term resolve(Term t) const {
    while (t.is_var()) {
      auto it = bind_.find(t.name);
      if (it == bind_.end()) break;
      t = it->second;
    }
    return t;
  }

  /// Binds `inner` towards `outer` where possible so outer names survive.
  bool unify(const Term& inner, const Term& outer) {
    Term a = resolve(inner);
    Term b = resolve(outer);
    if (a == b) return true;
    if (a.is_var()) {
      bind_[a.name] = b;
      return true;
    }
    if (b.is_var()) {
      bind_[b.name] = a;
      return true;
    }
    return false;
  }

  Atom apply(const Atom& a) const {
    Atom out{a.predicate, {}};
    for (const auto& t : a.args) out.args.push_back(resolve(t));
    return out;
  }

 private:
  std::map<std::string, Term> bind_;
};

class Renamer {
 public:
  ConjunctiveQuery fresh(const ConjunctiveQuery& q) {
    std::map<std::string, std::string> names;
    auto rename = [&](const Atom& a) {
      Atom out{a.predicate, {}};
      for (const auto& t : a.args) {
        if (!t.is_var()) {
          out.args.push_back(t);
          continue;
        }
        auto [it, inserted] = names.emplace(t.name, "");
        if (inserted) it->second = "#" + std::to_string(counter_++);
        out.args.push_back(Term::var(it->second));
      }
      return out;
    };
    ConjunctiveQuery out;
    out.head = rename(q.head);
    for (const auto& a : q.body) out.body.push_back(rename(a));
    return out;
  }

 private:
  std::size_t counter_ = 0;
};

ConjunctiveQuery canonical_names(const ConjunctiveQuery& q, const std::vector<std::string>& head_names) {
  std::map<std::string, std::string> names;
  std::set<std::string> used;
  for (std::size_t i = 0; i < q.head.args.size(); ++i) {
    const auto& t = q.head.args[i];
    if (!t.is_var() || names.contains(t.name)) continue;
    std::string want = i < head_names.size() ? head_names[i] : "x" + std::to_string(i + 1);
    if (used.contains(want)) want = "x" + std::to_string(i + 1);
    names.emplace(t.name, want);
    used.insert(want);
  }
  std::size_t next = 1;
  auto rename = [&](const Atom& a) {
    Atom out{a.predicate, {}};
    for (const auto& t : a.args) {
      if (!t.is_var()) {
        out.args.push_back(t);
        continue;
      }
      auto it = names.find(t.name);
      if (it == names.end()) {
        std::string n;
        do {
          n = "z" + std::to_string(next++);
        } while (used.contains(n));
        used.insert(n);
        it = names.emplace(t.name, n).first;
      }
      out.args.push_back(Term::var(it->second));
    }
    return out;
  };
  ConjunctiveQuery out;
  out.head = rename(q.head);
  for (const auto& a : q.body) out.body.push_back(rename(a));
  return out;
}

}  // namespace

std::vector<Expansion> expansions(const Program& program, std::size_t depth, std::size_t cap) {
  // by_pred[P][level] = expansions of P of exactly that level
  std::map<std::string, std::vector<std::vector<ConjunctiveQuery>>> by_pred;
  for (const auto& p : program.idb_predicates()) by_pred[p].resize(depth + 1);
  std::size_t total = 0;
  auto bump = [&]() {
    if (++total > cap) fail(ErrorCode::LimitExceeded, "more than " + std::to_string(cap) + " expansions");
  };
  for (const auto& r : program.rules()) {
    if (program.is_recursive(r)) continue;
    by_pred[r.head.predicate][0].push_back({r.head, r.body});
    bump();
  }

  Renamer renamer;
  for (std::size_t d = 1; d <= depth; ++d) {
    for (const auto& r : program.rules()) {
      std::vector<std::size_t> idb_pos;
      for (std::size_t i = 0; i < r.body.size(); ++i)
        if (program.is_idb(r.body[i].predicate)) idb_pos.push_back(i);
      if (idb_pos.empty()) continue;

      // Children for each IDB atom: all expansions of level < d, tagged with level.
      std::vector<std::vector<std::pair<const ConjunctiveQuery*, std::size_t>>> choices(idb_pos.size());
      bool feasible = true;
      for (std::size_t k = 0; k < idb_pos.size(); ++k) {
        const auto& levels = by_pred[r.body[idb_pos[k]].predicate];
        for (std::size_t l = 0; l < d; ++l)
          for (const auto& q : levels[l]) choices[k].emplace_back(&q, l);
        if (choices[k].empty()) feasible = false;
      }
      if (!feasible) continue;

      std::vector<std::size_t> pick(idb_pos.size(), 0);
      for (;;) {
        std::size_t max_level = 0;
        for (std::size_t k = 0; k < pick.size(); ++k) max_level = std::max(max_level, choices[k][pick[k]].second);
        if (max_level + 1 == d) {
          ConjunctiveQuery outer = renamer.fresh({r.head, r.body});
          Unifier u;
          bool ok = true;
          std::vector<ConjunctiveQuery> kids;
          for (std::size_t k = 0; k < pick.size() && ok; ++k) {
            ConjunctiveQuery kid = renamer.fresh(*choices[k][pick[k]].first);
            const Atom& slot = outer.body[idb_pos[k]];
            for (std::size_t j = 0; j < slot.args.size() && ok; ++j) ok = u.unify(kid.head.args[j], slot.args[j]);
            kids.push_back(std::move(kid));
          }
          if (ok) {
            ConjunctiveQuery q;
            q.head = u.apply(outer.head);
            std::size_t next_kid = 0;
            for (std::size_t i = 0; i < outer.body.size(); ++i) {
              if (next_kid < idb_pos.size() && idb_pos[next_kid] == i) {
                for (const auto& a : kids[next_kid].body) q.body.push_back(u.apply(a));
                ++next_kid;
              } else {
                q.body.push_back(u.apply(outer.body[i]));
              }
            }
            by_pred[r.head.predicate][d].push_back(std::move(q));
            bump();
          }
        }
        std::size_t k = pick.size();
        bool done = true;
        while (k > 0) {
          --k;
          if (++pick[k] < choices[k].size()) {
            done = false;
            break;
          }
          pick[k] = 0;
        }
        if (done) break;
      }
    }
  }

  std::vector<std::string> head_names;
  for (const auto& r : program.rules()) {
    if (r.head.predicate != program.target()) continue;
    for (const auto& t : r.head.args) head_names.push_back(t.is_var() ? t.name : "");
    break;
  }
  std::vector<Expansion> out;
  const auto& target_levels = by_pred[program.target()];
  for (std::size_t l = 0; l <= depth; ++l)
    for (const auto& q : target_levels[l]) out.push_back({canonical_names(q, head_names), l});
  return out;
}

}  // namespace provcirc
