#include "provcirc/grammar.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <queue>
#include <sstream>
#include <tuple>

#include "provcirc/error.hpp"

namespace provcirc {

std::string to_string(const Word& w) {
  if (w.empty()) return "eps";
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i != 0) out += " ";
    out += w[i];
  }
  return out;
}

namespace {

Word concat(const Word& a, const Word& b) {
  Word out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

void recompute_symbols(Grammar& g) {
  g.nonterminals.clear();
  g.terminals.clear();
  g.nonterminals.insert(g.start);
  for (const auto& p : g.productions) g.nonterminals.insert(p.head);
  for (const auto& p : g.productions)
    for (const auto& s : p.body)
      if (!g.nonterminals.contains(s)) g.terminals.insert(s);
}

}  // namespace

// ---------------------------------------------------------------------------
// Parsing and conversion

Grammar parse_grammar(std::string_view text) {
  Grammar g;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  std::optional<std::string> start;
  while (std::getline(in, line)) {
    ++lineno;
    for (char c : {'#', '%'}) {
      auto pos = line.find(c);
      if (pos != std::string::npos) line.erase(pos);
    }
    std::istringstream tokens(line);
    std::vector<std::string> toks;
    std::string tok;
    while (tokens >> tok) toks.push_back(tok);
    if (toks.empty()) continue;
    auto where = "line " + std::to_string(lineno) + ": ";
    if (toks[0] == "@start") {
      if (toks.size() != 2) fail(ErrorCode::SyntaxError, where + "expected `@start Symbol`");
      start = toks[1];
      continue;
    }
    if (toks.size() < 3 || toks[1] != "->") fail(ErrorCode::SyntaxError, where + "expected `Head -> body | body`");
    std::vector<std::string> body;
    auto flush = [&]() {
      if (body.empty()) fail(ErrorCode::SyntaxError, where + "empty alternative (write eps)");
      if (body.size() == 1 && (body[0] == "eps" || body[0] == "ε")) body.clear();
      for (const auto& s : body)
        if (s == "eps" || s == "ε") fail(ErrorCode::SyntaxError, where + "eps must stand alone");
      g.productions.push_back({toks[0], body});
      body.clear();
    };
    for (std::size_t i = 2; i < toks.size(); ++i) {
      if (toks[i] == "|") {
        flush();
      } else {
        body.push_back(toks[i]);
      }
    }
    flush();
  }
  if (g.productions.empty()) fail(ErrorCode::EmptyProgram, "grammar has no productions");
  g.start = start.value_or(g.productions.front().head);
  recompute_symbols(g);
  return g;
}

std::string to_string(const Grammar& g) {
  std::string out = "@start " + g.start + "\n";
  std::map<std::string, std::vector<std::string>> alts;
  std::vector<std::string> order;
  for (const auto& p : g.productions) {
    if (!alts.contains(p.head)) order.push_back(p.head);
    alts[p.head].push_back(to_string(p.body));
  }
  for (const auto& h : order) {
    out += h + " ->";
    for (std::size_t i = 0; i < alts[h].size(); ++i) out += (i == 0 ? " " : " | ") + alts[h][i];
    out += "\n";
  }
  return out;
}

Grammar program_to_grammar(const Program& program) {
  if (!program.classification().chain) fail(ErrorCode::NotChain, "program is not in chain form");
  Grammar g;
  g.start = program.target();
  for (const auto& r : program.rules()) {
    Production p{r.head.predicate, {}};
    for (const auto& a : r.body) p.body.push_back(a.predicate);
    g.productions.push_back(std::move(p));
  }
  recompute_symbols(g);
  return g;
}

Program grammar_to_program(const Grammar& grammar) {
  Grammar g = cleanup(grammar);
  std::vector<Rule> rules;
  for (const auto& p : g.productions) {
    if (p.body.empty()) fail(ErrorCode::EpsilonProduction, p.head + " has an epsilon production");
    Rule r;
    r.head = Atom{p.head, {Term::var("x"), Term::var("y")}};
    for (std::size_t i = 0; i < p.body.size(); ++i) {
      Term from = i == 0 ? Term::var("x") : Term::var("z" + std::to_string(i));
      Term to = i + 1 == p.body.size() ? Term::var("y") : Term::var("z" + std::to_string(i + 1));
      r.body.push_back(Atom{p.body[i], {from, to}});
    }
    rules.push_back(std::move(r));
  }
  if (rules.empty()) fail(ErrorCode::EmptyProgram, "grammar language is empty");
  return Program(std::move(rules), g.start);
}

Grammar cleanup(const Grammar& g) {
  std::set<std::string> productive;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& p : g.productions) {
      if (productive.contains(p.head)) continue;
      bool ok = std::all_of(p.body.begin(), p.body.end(),
                            [&](const std::string& s) { return !g.is_nonterminal(s) || productive.contains(s); });
      if (ok) {
        productive.insert(p.head);
        changed = true;
      }
    }
  }
  std::vector<Production> kept;
  for (const auto& p : g.productions) {
    bool ok = productive.contains(p.head) &&
              std::all_of(p.body.begin(), p.body.end(),
                          [&](const std::string& s) { return !g.is_nonterminal(s) || productive.contains(s); });
    if (ok) kept.push_back(p);
  }
  std::set<std::string> reachable{g.start};
  std::vector<std::string> stack{g.start};
  while (!stack.empty()) {
    std::string a = stack.back();
    stack.pop_back();
    for (const auto& p : kept) {
      if (p.head != a) continue;
      for (const auto& s : p.body)
        if (g.is_nonterminal(s) && reachable.insert(s).second) stack.push_back(s);
    }
  }
  Grammar out;
  out.start = g.start;
  for (const auto& p : kept)
    if (reachable.contains(p.head)) out.productions.push_back(p);
  recompute_symbols(out);
  return out;
}

bool is_finite(const Grammar& grammar) {
  Grammar g = cleanup(grammar);
  // Symbols deriving some nonempty word.
  std::set<std::string> grows(g.terminals.begin(), g.terminals.end());
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& p : g.productions) {
      if (grows.contains(p.head)) continue;
      if (std::any_of(p.body.begin(), p.body.end(), [&](const std::string& s) { return grows.contains(s); })) {
        grows.insert(p.head);
        changed = true;
      }
    }
  }
  std::map<std::string, std::set<std::string>> reach;
  for (const auto& p : g.productions)
    for (const auto& s : p.body)
      if (g.is_nonterminal(s)) reach[p.head].insert(s);
  for (bool changed = true; changed;) {
    changed = false;
    for (auto& [a, succ] : reach) {
      std::set<std::string> more;
      for (const auto& b : succ)
        if (auto it = reach.find(b); it != reach.end()) more.insert(it->second.begin(), it->second.end());
      for (const auto& c : more) changed = succ.insert(c).second || changed;
    }
  }
  // Infinite iff some A ⇒ αBβ with B ⇒* A and αβ deriving a nonempty word.
  for (const auto& p : g.productions) {
    for (std::size_t i = 0; i < p.body.size(); ++i) {
      const auto& b = p.body[i];
      if (!g.is_nonterminal(b) || (b != p.head && !reach[b].contains(p.head))) continue;
      for (std::size_t j = 0; j < p.body.size(); ++j)
        if (j != i && grows.contains(p.body[j])) return false;
    }
  }
  return true;
}

std::vector<Word> finite_language(const Grammar& grammar, std::size_t cap) {
  if (!is_finite(grammar)) fail(ErrorCode::NotFinite, "language is infinite");
  Grammar g = cleanup(grammar);
  std::map<std::string, std::set<Word>> lang;
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& p : g.productions) {
      std::set<Word> partial{Word{}};
      for (const auto& s : p.body) {
        std::set<Word> next;
        if (g.is_nonterminal(s)) {
          for (const auto& pre : partial)
            for (const auto& w : lang[s]) next.insert(concat(pre, w));
        } else {
          for (const auto& pre : partial) next.insert(concat(pre, Word{s}));
        }
        if (next.size() > cap) fail(ErrorCode::LimitExceeded, "more than " + std::to_string(cap) + " words");
        partial = std::move(next);
      }
      auto& out = lang[p.head];
      for (const auto& w : partial) changed = out.insert(w).second || changed;
      if (out.size() > cap) fail(ErrorCode::LimitExceeded, "more than " + std::to_string(cap) + " words");
    }
  }
  const auto& words = lang[g.start];
  return {words.begin(), words.end()};
}

// ---------------------------------------------------------------------------
// CYK

namespace {

struct Cnf {
  std::vector<std::string> names;
  std::size_t start = 0;
  /// terminal → nonterminals producing it
  std::map<std::string, std::vector<std::size_t>> unit_terminal;
  /// (A, B, C) for A → B C
  std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> binary;
};

Cnf to_cnf(const Grammar& grammar) {
  for (const auto& p : grammar.productions)
    if (p.body.empty()) fail(ErrorCode::EpsilonProduction, p.head + " has an epsilon production");
  Grammar g = cleanup(grammar);
  std::map<std::string, std::size_t> id;
  Cnf cnf;
  auto intern = [&](const std::string& n) {
    auto [it, inserted] = id.emplace(n, cnf.names.size());
    if (inserted) cnf.names.push_back(n);
    return it->second;
  };
  cnf.start = intern(g.start);
  for (const auto& a : g.nonterminals) intern(a);

  // Productions over ids: terminals become wrapper nonterminals inside long bodies.
  std::vector<std::pair<std::size_t, std::vector<std::size_t>>> long_bodies;
  std::vector<std::pair<std::size_t, std::size_t>> units;
  std::vector<std::pair<std::size_t, std::string>> terminal_rules;
  for (const auto& p : g.productions) {
    std::size_t head = intern(p.head);
    if (p.body.size() == 1) {
      if (g.is_nonterminal(p.body[0])) {
        units.emplace_back(head, intern(p.body[0]));
      } else {
        terminal_rules.emplace_back(head, p.body[0]);
      }
      continue;
    }
    std::vector<std::size_t> body;
    for (const auto& s : p.body) {
      if (g.is_nonterminal(s)) {
        body.push_back(intern(s));
      } else {
        std::size_t wrap = intern("#t:" + s);
        terminal_rules.emplace_back(wrap, s);
        body.push_back(wrap);
      }
    }
    long_bodies.emplace_back(head, std::move(body));
  }
  std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> bin;
  std::size_t fresh = 0;
  for (const auto& [head, body] : long_bodies) {
    std::size_t cur = head;
    for (std::size_t i = 0; i + 2 < body.size(); ++i) {
      std::size_t next = intern("#b:" + std::to_string(fresh++));
      bin.emplace_back(cur, body[i], next);
      cur = next;
    }
    bin.emplace_back(cur, body[body.size() - 2], body.back());
  }
  // Unit closure: A inherits the non-unit productions of every B with A ⇒* B.
  std::size_t n = cnf.names.size();
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (std::size_t a = 0; a < n; ++a) reach[a][a] = true;
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& [a, b] : units)
      for (std::size_t c = 0; c < n; ++c)
        if (reach[b][c] && !reach[a][c]) {
          for (std::size_t x = 0; x < n; ++x)
            if (reach[x][a] && !reach[x][c]) reach[x][c] = true;
          changed = true;
        }
  }
  std::set<std::pair<std::size_t, std::string>> term_set;
  std::set<std::tuple<std::size_t, std::size_t, std::size_t>> bin_set;
  for (std::size_t a = 0; a < n; ++a) {
    for (const auto& [h, t] : terminal_rules)
      if (reach[a][h]) term_set.emplace(a, t);
    for (const auto& [h, l, r] : bin)
      if (reach[a][h]) bin_set.emplace(a, l, r);
  }
  for (const auto& [a, t] : term_set) cnf.unit_terminal[t].push_back(a);
  cnf.binary.assign(bin_set.begin(), bin_set.end());
  return cnf;
}

}  // namespace

bool cyk_accepts(const Grammar& g, const Word& w) {
  Cnf cnf = to_cnf(g);
  std::size_t n = w.size();
  if (n == 0) return false;
  std::size_t k = cnf.names.size();
  // table[i][len - 1][A]
  std::vector<std::vector<std::vector<bool>>> table(n, std::vector<std::vector<bool>>(n, std::vector<bool>(k, false)));
  for (std::size_t i = 0; i < n; ++i) {
    auto it = cnf.unit_terminal.find(w[i]);
    if (it == cnf.unit_terminal.end()) continue;
    for (std::size_t a : it->second) table[i][0][a] = true;
  }
  for (std::size_t len = 2; len <= n; ++len) {
    for (std::size_t i = 0; i + len <= n; ++i) {
      for (std::size_t split = 1; split < len; ++split) {
        const auto& left = table[i][split - 1];
        const auto& right = table[i + split][len - split - 1];
        for (const auto& [a, b, c] : cnf.binary)
          if (left[b] && right[c]) table[i][len - 1][a] = true;
      }
    }
  }
  return table[0][n - 1][cnf.start];
}

bool is_left_linear(const Grammar& g) {
  for (const auto& p : g.productions) {
    for (std::size_t i = 0; i < p.body.size(); ++i)
      if (i > 0 && g.is_nonterminal(p.body[i])) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Automata

std::optional<std::size_t> Dfa::symbol(std::string_view a) const {
  auto it = std::lower_bound(alphabet.begin(), alphabet.end(), a);
  if (it == alphabet.end() || *it != a) return std::nullopt;
  return static_cast<std::size_t>(it - alphabet.begin());
}

bool Dfa::accepts(const Word& w) const {
  std::size_t q = start;
  for (const auto& a : w) {
    auto s = symbol(a);
    if (!s) return false;
    q = delta[q][*s];
  }
  return accepting[q];
}

Dfa to_dfa(const Grammar& g) {
  if (!is_left_linear(g)) fail(ErrorCode::NotRegularForm, "grammar is not left-linear");
  Dfa dfa;
  dfa.alphabet.assign(g.terminals.begin(), g.terminals.end());
  std::size_t sigma = dfa.alphabet.size();

  // NFA: state 0 is the initial state, then one state per nonterminal, then
  // intermediates for multi-letter bodies. Reading w from 0 can end in A iff w ∈ L(A).
  std::map<std::string, std::size_t> nt;
  std::size_t count = 1;
  for (const auto& a : g.nonterminals) nt[a] = count++;
  std::vector<std::vector<std::size_t>> eps;
  std::vector<std::vector<std::vector<std::size_t>>> step;
  auto grow = [&]() {
    eps.resize(count);
    step.resize(count, std::vector<std::vector<std::size_t>>(sigma));
  };
  grow();
  for (const auto& p : g.productions) {
    std::size_t from = 0;
    std::size_t first = 0;
    if (!p.body.empty() && g.is_nonterminal(p.body[0])) {
      from = nt.at(p.body[0]);
      first = 1;
    }
    std::size_t target = nt.at(p.head);
    if (first == p.body.size()) {
      eps[from].push_back(target);
      continue;
    }
    for (std::size_t i = first; i < p.body.size(); ++i) {
      std::size_t to = i + 1 == p.body.size() ? target : count++;
      grow();
      step[from][*dfa.symbol(p.body[i])].push_back(to);
      from = to;
    }
  }
  auto closure = [&](std::vector<std::size_t> set) {
    std::vector<bool> in(count, false);
    for (std::size_t s : set) in[s] = true;
    for (std::size_t i = 0; i < set.size(); ++i)
      for (std::size_t t : eps[set[i]])
        if (!in[t]) {
          in[t] = true;
          set.push_back(t);
        }
    std::sort(set.begin(), set.end());
    return set;
  };

  std::map<std::vector<std::size_t>, std::size_t> subset_id;
  std::vector<std::vector<std::size_t>> subsets;
  std::vector<std::vector<std::size_t>> delta;
  auto intern = [&](std::vector<std::size_t> s) {
    auto [it, inserted] = subset_id.emplace(s, subsets.size());
    if (inserted) subsets.push_back(std::move(s));
    return it->second;
  };
  intern(closure({0}));
  for (std::size_t i = 0; i < subsets.size(); ++i) {
    std::vector<std::size_t> row(sigma);
    for (std::size_t a = 0; a < sigma; ++a) {
      std::vector<std::size_t> next;
      for (std::size_t s : subsets[i]) next.insert(next.end(), step[s][a].begin(), step[s][a].end());
      std::sort(next.begin(), next.end());
      next.erase(std::unique(next.begin(), next.end()), next.end());
      row[a] = intern(closure(std::move(next)));
    }
    delta.push_back(std::move(row));
  }
  std::size_t accept_state = nt.at(g.start);
  std::vector<bool> accepting(subsets.size());
  for (std::size_t i = 0; i < subsets.size(); ++i)
    accepting[i] = std::binary_search(subsets[i].begin(), subsets[i].end(), accept_state);

  // Moore partition refinement.
  std::vector<std::size_t> cls(subsets.size());
  for (std::size_t i = 0; i < subsets.size(); ++i) cls[i] = accepting[i] ? 1 : 0;
  for (;;) {
    std::map<std::vector<std::size_t>, std::size_t> sig_id;
    std::vector<std::size_t> next(subsets.size());
    for (std::size_t i = 0; i < subsets.size(); ++i) {
      std::vector<std::size_t> sig{cls[i]};
      for (std::size_t a = 0; a < sigma; ++a) sig.push_back(cls[delta[i][a]]);
      next[i] = sig_id.emplace(sig, sig_id.size()).first->second;
    }
    std::size_t before = std::set<std::size_t>(cls.begin(), cls.end()).size();
    cls = std::move(next);
    if (sig_id.size() == before) break;
  }
  // Renumber classes breadth-first from the start class.
  std::map<std::size_t, std::size_t> order;
  std::vector<std::size_t> rep;
  std::vector<std::size_t> queue{cls[0]};
  std::map<std::size_t, std::size_t> class_rep;
  for (std::size_t i = 0; i < subsets.size(); ++i) class_rep.emplace(cls[i], i);
  order[cls[0]] = 0;
  for (std::size_t h = 0; h < queue.size(); ++h) {
    std::size_t r = class_rep[queue[h]];
    rep.push_back(r);
    for (std::size_t a = 0; a < sigma; ++a) {
      std::size_t c = cls[delta[r][a]];
      if (order.emplace(c, order.size()).second) queue.push_back(c);
    }
  }
  dfa.start = 0;
  dfa.delta.assign(rep.size(), std::vector<std::size_t>(sigma));
  dfa.accepting.assign(rep.size(), false);
  for (std::size_t q = 0; q < rep.size(); ++q) {
    dfa.accepting[q] = accepting[rep[q]];
    for (std::size_t a = 0; a < sigma; ++a) dfa.delta[q][a] = order[cls[delta[rep[q]][a]]];
  }
  return dfa;
}

std::optional<std::size_t> ProductGraph::find(std::size_t v, std::size_t q) const {
  for (std::size_t i = 0; i < state.size(); ++i)
    if (state[i] == std::make_pair(v, q)) return i;
  return std::nullopt;
}

ProductGraph product_graph(const Graph& g, const Dfa& dfa) {
  ProductGraph pg;
  std::size_t nq = dfa.num_states();
  for (std::size_t v = 0; v < g.num_vertices(); ++v) {
    for (std::size_t q = 0; q < nq; ++q) {
      pg.graph.vertex(g.name(v) + "|" + std::to_string(q));
      pg.state.emplace_back(v, q);
    }
  }
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    const Edge& edge = g.edge(e);
    auto a = dfa.symbol(edge.label);
    if (!a) fail(ErrorCode::UnknownLabel, "label '" + edge.label + "' is not in the grammar's alphabet");
    for (std::size_t q = 0; q < nq; ++q) {
      pg.graph.add_edge(edge.src * nq + q, edge.dst * nq + dfa.delta[q][*a], edge.label, edge.var);
      pg.projection.push_back(e);
    }
  }
  return pg;
}

GateId emit_rpq_via_tc(CircuitBuilder& b, const Graph& g, const Dfa& dfa, std::size_t s, std::size_t t,
                       Strategy strategy) {
  ProductGraph pg = product_graph(g, dfa);
  std::size_t nq = dfa.num_states();
  std::size_t source = s * nq + dfa.start;
  std::size_t n = pg.graph.num_vertices();
  auto sweep = [&](std::vector<std::size_t> seeds, bool forward) {
    std::vector<bool> seen(n, false);
    for (std::size_t v : seeds) seen[v] = true;
    while (!seeds.empty()) {
      std::size_t v = seeds.back();
      seeds.pop_back();
      const auto& edges = forward ? pg.graph.out_edges(v) : pg.graph.in_edges(v);
      for (std::size_t e : edges) {
        std::size_t w = forward ? pg.graph.edge(e).dst : pg.graph.edge(e).src;
        if (!seen[w]) {
          seen[w] = true;
          seeds.push_back(w);
        }
      }
    }
    return seen;
  };
  std::vector<std::size_t> targets;
  for (std::size_t q = 0; q < nq; ++q)
    if (dfa.accepting[q]) targets.push_back(t * nq + q);
  auto fwd = sweep({source}, true);
  auto bwd = sweep(targets, false);
  // Pruned product: only vertices on some source → accepting-target walk.
  Graph pruned;
  std::vector<std::optional<std::size_t>> keep(n);
  for (std::size_t v = 0; v < n; ++v)
    if (fwd[v] && bwd[v]) keep[v] = pruned.vertex(pg.graph.name(v));
  for (const auto& e : pg.graph.edges())
    if (keep[e.src] && keep[e.dst]) pruned.add_edge(*keep[e.src], *keep[e.dst], e.label, e.var);
  if (!keep[source]) return b.zero();
  std::vector<GateId> outs;
  for (std::size_t target : targets) {
    if (!keep[target]) continue;
    switch (strategy) {
      case Strategy::BellmanFord: outs.push_back(emit_bellman_ford(b, pruned, *keep[source], *keep[target])); break;
      case Strategy::Squaring: outs.push_back(emit_repeated_squaring(b, pruned, *keep[source], *keep[target])); break;
      case Strategy::LayeredGraph: outs.push_back(emit_layered_graph(b, pruned, *keep[source], *keep[target])); break;
      default: fail(ErrorCode::InvalidArgument, "rpq needs bellman-ford, squaring or layered-graph");
    }
  }
  return b.add_all(outs);
}

Circuit rpq_via_tc(const Graph& g, const Grammar& grammar, std::size_t s, std::size_t t, Strategy strategy) {
  Dfa dfa = to_dfa(grammar);
  CircuitBuilder b;
  GateId out = emit_rpq_via_tc(b, g, dfa, s, t, strategy);
  return b.finalize(out);
}

// ---------------------------------------------------------------------------
// Pumping

Word pump(const RegularDecomposition& d, std::size_t i) {
  Word w = d.x;
  for (std::size_t k = 0; k < i; ++k) w = concat(w, d.y);
  return concat(w, d.z);
}

Word pump(const CfgDecomposition& d, std::size_t i) {
  Word out = d.u;
  for (std::size_t k = 0; k < i; ++k) out = concat(out, d.v);
  out = concat(out, d.w);
  for (std::size_t k = 0; k < i; ++k) out = concat(out, d.x);
  return concat(out, d.y);
}

namespace {

/// Breadth-first over (length, lexicographic) order from `from`; returns the
/// first word reaching a state accepted by `done`, skipping the empty word when
/// `nonempty` is set.
std::optional<Word> first_word(const Dfa& dfa, std::size_t from, const std::function<bool(std::size_t)>& done,
                               bool nonempty) {
  if (!nonempty && done(from)) return Word{};
  std::vector<std::optional<std::pair<std::size_t, std::size_t>>> parent(dfa.num_states());
  std::vector<bool> seen(dfa.num_states(), false);
  std::vector<std::size_t> queue;
  // Words are rebuilt by walking parents; the first level is stored separately
  // so that `from` itself can be reached again as a target.
  std::vector<std::pair<std::size_t, std::size_t>> first_level;
  auto rebuild = [&](std::size_t q) {
    Word w;
    while (parent[q]) {
      w.push_back(dfa.alphabet[parent[q]->second]);
      q = parent[q]->first;
    }
    std::reverse(w.begin(), w.end());
    return w;
  };
  for (std::size_t a = 0; a < dfa.alphabet.size(); ++a) {
    std::size_t q = dfa.delta[from][a];
    if (done(q)) {
      return Word{dfa.alphabet[a]};
    }
    if (!seen[q] && q != from) {
      seen[q] = true;
      parent[q] = std::make_pair(from, a);
      queue.push_back(q);
    }
  }
  seen[from] = true;
  for (std::size_t h = 0; h < queue.size(); ++h) {
    std::size_t q = queue[h];
    for (std::size_t a = 0; a < dfa.alphabet.size(); ++a) {
      std::size_t r = dfa.delta[q][a];
      if (done(r)) {
        Word w = rebuild(q);
        w.push_back(dfa.alphabet[a]);
        return w;
      }
      if (!seen[r]) {
        seen[r] = true;
        parent[r] = std::make_pair(q, a);
        queue.push_back(r);
      }
    }
  }
  return std::nullopt;
}

}  // namespace

RegularDecomposition find_pumping_regular(const Grammar& g) {
  Dfa dfa = to_dfa(g);
  auto is_accepting = [&](std::size_t q) { return static_cast<bool>(dfa.accepting[q]); };
  std::optional<std::tuple<std::size_t, Word, RegularDecomposition>> best;
  for (std::size_t q = 0; q < dfa.num_states(); ++q) {
    auto x = first_word(dfa, dfa.start, [&](std::size_t r) { return r == q; }, false);
    auto z = first_word(dfa, q, is_accepting, false);
    auto y = first_word(dfa, q, [&](std::size_t r) { return r == q; }, true);
    if (!x || !y || !z) continue;
    RegularDecomposition d{*x, *y, *z};
    bool pumps = true;
    for (std::size_t i = 0; i <= 4 && pumps; ++i) pumps = dfa.accepts(pump(d, i));
    if (!pumps) continue;
    auto key = std::make_tuple(x->size() + y->size() + z->size(), concat(concat(*x, *y), *z), d);
    if (!best || std::tie(std::get<0>(key), std::get<1>(key)) < std::tie(std::get<0>(*best), std::get<1>(*best)) ||
        (std::tie(std::get<0>(key), std::get<1>(key)) == std::tie(std::get<0>(*best), std::get<1>(*best)) &&
         std::tie(d.x, d.y, d.z) < std::tie(std::get<2>(*best).x, std::get<2>(*best).y, std::get<2>(*best).z))) {
      best = key;
    }
  }
  if (!best) fail(ErrorCode::FiniteLanguage, "no pumpable cycle: the language is finite");
  return std::get<2>(*best);
}

namespace {

struct Context {
  Word left;
  Word right;
};

bool context_less(const Context& a, const Context& b) {
  return std::make_tuple(a.left.size() + a.right.size(), a.left, a.right) <
         std::make_tuple(b.left.size() + b.right.size(), b.left, b.right);
}

std::map<std::string, Word> shortest_words(const Grammar& g) {
  std::map<std::string, Word> best;
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& p : g.productions) {
      Word w;
      bool ok = true;
      for (const auto& s : p.body) {
        if (!g.is_nonterminal(s)) {
          w.push_back(s);
        } else if (auto it = best.find(s); it != best.end()) {
          w = concat(w, it->second);
        } else {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      auto it = best.find(p.head);
      if (it == best.end() || w.size() < it->second.size() || (w.size() == it->second.size() && w < it->second)) {
        best[p.head] = w;
        changed = true;
      }
    }
  }
  return best;
}

/// Best contexts (left, right) with root ⇒^{≥steps} left · B · right, keyed by
/// (B, left nonempty, right nonempty).
std::map<std::tuple<std::string, bool, bool>, Context> contexts(const Grammar& g,
                                                                const std::map<std::string, Word>& sw,
                                                                const std::string& root, bool at_least_one) {
  using Key = std::tuple<std::string, bool, bool>;
  std::map<Key, Context> settled;
  std::vector<std::pair<Key, Context>> frontier;
  auto expand = [&](const std::string& from, const Context& ctx) {
    for (const auto& p : g.productions) {
      if (p.head != from) continue;
      for (std::size_t i = 0; i < p.body.size(); ++i) {
        if (!g.is_nonterminal(p.body[i])) continue;
        Context next{ctx.left, {}};
        for (std::size_t j = 0; j < i; ++j)
          next.left = concat(next.left, g.is_nonterminal(p.body[j]) ? sw.at(p.body[j]) : Word{p.body[j]});
        for (std::size_t j = i + 1; j < p.body.size(); ++j)
          next.right = concat(next.right, g.is_nonterminal(p.body[j]) ? sw.at(p.body[j]) : Word{p.body[j]});
        next.right = concat(next.right, ctx.right);
        frontier.emplace_back(Key{p.body[i], !next.left.empty(), !next.right.empty()}, std::move(next));
      }
    }
  };
  if (at_least_one) {
    expand(root, Context{});
  } else {
    frontier.emplace_back(Key{root, false, false}, Context{});
  }
  while (!frontier.empty()) {
    auto it = std::min_element(frontier.begin(), frontier.end(), [](const auto& a, const auto& b) {
      return context_less(a.second, b.second) || (!context_less(b.second, a.second) && a.first < b.first);
    });
    auto [key, ctx] = *it;
    frontier.erase(it);
    if (settled.contains(key)) continue;
    settled.emplace(key, ctx);
    expand(std::get<0>(key), ctx);
    // Contexts only grow, so the frontier stays bounded by the settled keys.
    std::erase_if(frontier, [&](const auto& e) { return settled.contains(e.first); });
  }
  return settled;
}

}  // namespace

CfgDecomposition find_pumping_cfg(const Grammar& grammar) {
  for (const auto& p : grammar.productions)
    if (p.body.empty()) fail(ErrorCode::EpsilonProduction, p.head + " has an epsilon production");
  Grammar g = cleanup(grammar);
  if (is_finite(g)) fail(ErrorCode::FiniteLanguage, "the language is finite");
  auto sw = shortest_words(g);
  auto outer = contexts(g, sw, g.start, false);

  std::optional<CfgDecomposition> best;
  auto rank = [](const CfgDecomposition& d) {
    std::size_t total = d.u.size() + d.v.size() + d.w.size() + d.x.size() + d.y.size();
    return std::make_tuple(d.v.empty(), total, d.u, d.v, d.w, d.x, d.y);
  };
  for (const auto& a : g.nonterminals) {
    auto cycles = contexts(g, sw, a, true);
    std::optional<Context> around;
    for (const auto& [key, ctx] : outer) {
      if (std::get<0>(key) != a) continue;
      if (!around || context_less(ctx, *around)) around = ctx;
    }
    if (!around) continue;
    for (const auto& [key, ctx] : cycles) {
      if (std::get<0>(key) != a || (ctx.left.empty() && ctx.right.empty())) continue;
      CfgDecomposition d{around->left, ctx.left, sw.at(a), ctx.right, around->right};
      bool pumps = true;
      for (std::size_t i = 0; i <= 3 && pumps; ++i) pumps = cyk_accepts(g, pump(d, i));
      if (!pumps) continue;
      if (!best || rank(d) < rank(*best)) best = d;
    }
  }
  if (!best) fail(ErrorCode::FiniteLanguage, "no self-embedding nonterminal found");
  return *best;
}

}  // namespace provcirc
