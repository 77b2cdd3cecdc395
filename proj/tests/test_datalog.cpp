#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "provcirc/datalog.hpp"
#include "provcirc/graph.hpp"
#include "test_util.hpp"

using namespace provcirc;

namespace {

const char* kTc = "T(x,y) :- E(x,y). T(x,y) :- T(x,z), E(z,y).";
const char* kDyck = "S(x,y) :- L(x,z), R(z,y). S(x,y) :- L(x,w), S(w,z), R(z,y). S(x,y) :- S(x,z), S(z,y).";

Database worked() {
  static const Program tc = parse_program(kTc);
  return parse_database(read_data("worked.tsv"), &tc);
}

/// Answers of a CQ on `db` by trying every assignment of its variables.
std::set<GroundAtom> answers(const ConjunctiveQuery& q, const Database& db) {
  std::vector<std::string> vars;
  auto collect = [&](const Atom& a) {
    for (const auto& t : a.args)
      if (t.is_var() && std::find(vars.begin(), vars.end(), t.name) == vars.end()) vars.push_back(t.name);
  };
  collect(q.head);
  for (const auto& a : q.body) collect(a);
  auto cs = db.constants();
  std::vector<std::string> dom(cs.begin(), cs.end());
  std::set<GroundAtom> out;
  if (dom.empty()) return out;
  std::vector<std::size_t> idx(vars.size(), 0);
  while (true) {
    std::map<std::string, std::string> bind;
    for (std::size_t i = 0; i < vars.size(); ++i) bind[vars[i]] = dom[idx[i]];
    auto inst = [&](const Atom& a) {
      GroundAtom g{a.predicate, {}};
      for (const auto& t : a.args) g.args.push_back(t.is_var() ? bind[t.name] : t.name);
      return g;
    };
    bool ok = std::all_of(q.body.begin(), q.body.end(), [&](const Atom& a) { return db.find(inst(a)).has_value(); });
    if (ok) out.insert(inst(q.head));
    std::size_t k = 0;
    while (k < idx.size() && ++idx[k] == dom.size()) idx[k++] = 0;
    if (k == idx.size()) break;
  }
  return out;
}

}  // namespace

TEST_CASE("parse and classify") {
  Program tc = parse_program(kTc);
  CHECK(tc.target() == "T");
  CHECK(tc.classification() == Classification{true, false, true, false, true});

  Program dyck = parse_program(kDyck);
  CHECK(dyck.classification().chain);
  CHECK_FALSE(dyck.classification().linear);
  CHECK_FALSE(dyck.classification().left_linear);

  Program reach = parse_program("U(x) :- A(x). U(x) :- U(y), E(x,y).");
  CHECK(reach.classification().linear);
  CHECK(reach.classification().monadic);
  CHECK(reach.classification().connected);
  CHECK_FALSE(reach.classification().chain);
  CHECK(classify(reach) == reach.classification());

  Program bounded = parse_program(read_data("bounded.dl"));
  CHECK(bounded.classification().linear);
  CHECK_FALSE(bounded.classification().connected);
}

TEST_CASE("parse errors") {
  CHECK(error_of([] { parse_program(""); }) == ErrorCode::EmptyProgram);
  CHECK(error_of([] { parse_program("% only a comment\n"); }) == ErrorCode::EmptyProgram);
  CHECK(error_of([] { parse_program("T(x,y) :- E(x)."); }) == ErrorCode::UnsafeRule);
  CHECK(error_of([] { parse_program("T(x,y) :- E(x,y). T(x) :- E(x,x)."); }) == ErrorCode::ArityMismatch);
  CHECK(error_of([] { parse_program("@target Q\nT(x,y) :- E(x,y)."); }) == ErrorCode::UndeclaredTarget);
  try {
    parse_program("T(x,y) :- E(x,y).\nT(x y) :- E(x,y).");
    FAIL("expected a syntax error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SyntaxError);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("constants and target directive") {
  Program p = parse_program("@target R\nT(x) :- E(\"a\", x).\nR(x) :- T(x), E(x, 3).");
  CHECK(p.target() == "R");
  Database db = parse_database("E\ta\tb\nE\tb\t3\n", &p);
  auto r = naive_eval(p, db, builtin("boolean"), [&] {
    Assignment a;
    for (const auto& f : db.facts()) a[f.var] = true;
    return a;
  }());
  CHECK(r.value({"R", {"b"}}, builtin("boolean")) == Element{true});
  CHECK(r.value({"R", {"a"}}, builtin("boolean")) == Element{false});
}

TEST_CASE("database parsing") {
  Program tc = parse_program(kTc);
  Database db = parse_database("E\ta\tb\t4\nE,b,c,5\nE c d\n", &tc);
  REQUIRE(db.size() == 3);
  CHECK(db.fact(0).weight == std::optional<std::string>("4"));
  CHECK(db.fact(1).atom == GroundAtom{"E", {"b", "c"}});
  CHECK_FALSE(db.fact(2).weight.has_value());
  CHECK(error_of([&] { weights_assignment(db, builtin("tropical")); }) == ErrorCode::MissingAssignment);
  CHECK(db.add({"E", {"a", "b"}}, std::string("4")) == 0);
  CHECK(error_of([&] { db.add({"E", {"a", "b"}}, std::string("9")); }) == ErrorCode::InvalidArgument);
  CHECK(error_of([&] { db.add({"E", {"a"}}); }) == ErrorCode::ArityMismatch);
}

TEST_CASE("grounding") {
  Program tc = parse_program(kTc);
  auto small = ground(tc, parse_database("E\ta\tb\n", &tc));
  std::size_t init = 0;
  for (const auto& r : small.rules) init += r.rule == 0 ? 1 : 0;
  CHECK(init == 1);
  CHECK(small.find_idb({"T", {"a", "b"}}).has_value());

  CHECK(ground(tc, Database{}).rules.empty());

  auto g = ground(tc, worked());
  init = 0;
  for (const auto& r : g.rules) init += r.rule == 0 ? 1 : 0;
  CHECK(init == 7);

  Database bad;
  bad.add({"T", {"a", "b"}});
  CHECK(error_of([&] { ground(tc, bad); }) == ErrorCode::InvalidArgument);
  Database wrong;
  wrong.add({"E", {"a"}});
  CHECK(error_of([&] { ground(tc, wrong); }) == ErrorCode::ArityMismatch);
}

TEST_CASE("naive evaluation on the worked example") {
  Program tc = parse_program(kTc);
  Database db = worked();
  auto boolean = builtin("boolean");
  Assignment ones;
  for (const auto& f : db.facts()) ones[f.var] = true;
  auto r = naive_eval(tc, db, boolean, ones);
  CHECK(r.value({"T", {"s", "t"}}, boolean) == Element{true});
  CHECK(r.iterations <= 4);

  auto tropical = builtin("tropical");
  Database unit;
  for (const auto& f : db.facts()) unit.add(f.atom, std::string("1"));
  auto rt = naive_eval(tc, unit, tropical);
  CHECK(rt.value({"T", {"s", "t"}}, tropical) == Element{Tropical{3}});

  auto weighted = naive_eval(tc, db, tropical);
  CHECK(weighted.value({"T", {"s", "t"}}, tropical) == Element{Tropical{5}});

  auto empty = naive_eval(tc, Database{}, tropical);
  CHECK(empty.valuation.empty());
  CHECK(empty.iterations == 0);
  CHECK(empty.applications == 1);
}

TEST_CASE("counting semiring does not stabilize on cycles") {
  Program tc = parse_program(kTc);
  Database db;
  db.add({"E", {"a", "b"}}, std::string("1"));
  db.add({"E", {"b", "a"}}, std::string("1"));
  CHECK(error_of([&] { naive_eval(tc, db, builtin("counting"), 50); }) == ErrorCode::NotStable);
  Database dag;
  dag.add({"E", {"a", "b"}}, std::string("1"));
  dag.add({"E", {"b", "c"}}, std::string("1"));
  dag.add({"E", {"a", "c"}}, std::string("1"));
  auto r = naive_eval(tc, dag, builtin("counting"));
  CHECK(r.value({"T", {"a", "c"}}, builtin("counting")) == Element{Count{2}});
}

TEST_CASE("naive evaluation agrees with the brute-force ICO") {
  std::mt19937_64 rng(7);
  Program tc = parse_program(kTc);
  Program dyck = parse_program(kDyck);
  for (int trial = 0; trial < 30; ++trial) {
    GraphInstance gi = random_graph(4, 0.4, 100 + trial);
    for (const char* name : {"boolean", "tropical", "minmax"}) {
      auto spec = builtin(name);
      Assignment w;
      for (const auto& f : gi.db.facts()) {
        std::uint64_t x = std::stoull(*f.weight);
        if (spec.name == "boolean") w[f.var] = x % 3 != 0;
        if (spec.name == "tropical") w[f.var] = Tropical{x};
        if (spec.name == "minmax") w[f.var] = Fuzzy{static_cast<double>(x) / 9.0};
      }
      auto fast = naive_eval(tc, gi.db, spec, w);
      auto slow = oracle::brute_force_ico(tc, gi.db, spec, w);
      CHECK(fast.iterations == slow.iterations);
      std::size_t nonzero = 0;
      for (const auto& [atom, value] : fast.valuation) {
        if (spec.is_zero(value)) continue;
        ++nonzero;
        REQUIRE(slow.values.contains(to_string(atom)));
        CHECK(slow.values.at(to_string(atom)) == value);
      }
      CHECK(nonzero == slow.values.size());
      CHECK(fast.iterations <= ground(tc, gi.db).idb_facts.size());
    }
    // Dyck over a random L/R labelling of the same graph.
    Database labeled;
    Assignment w;
    for (const auto& f : gi.db.facts()) {
      GroundAtom a{rng() % 2 ? "L" : "R", f.atom.args};
      w[labeled.add(a)] = true;
    }
    auto fast = naive_eval(dyck, labeled, builtin("boolean"), w);
    auto slow = oracle::brute_force_ico(dyck, labeled, builtin("boolean"), w);
    CHECK(fast.iterations == slow.iterations);
    std::size_t nonzero = 0;
    for (const auto& [atom, value] : fast.valuation) nonzero += value == Element{true} ? 1 : 0;
    CHECK(nonzero == slow.values.size());
  }
}

TEST_CASE("valuations grow monotonically across iterations") {
  Program tc = parse_program(kTc);
  auto tropical = builtin("tropical");
  for (int trial = 0; trial < 10; ++trial) {
    GraphInstance gi = random_graph(5, 0.35, 500 + trial);
    // Tropical values can only decrease, i.e. grow in the natural order.
    auto g = ground(tc, gi.db);
    std::vector<Element> edb;
    for (const auto& f : gi.db.facts()) edb.push_back(tropical.parse(*f.weight));
    std::vector<Element> idb(g.idb_facts.size(), tropical.zero);
    for (std::size_t k = 0; k < 8; ++k) {
      auto next = ico_step(g, tropical, edb, idb);
      for (std::size_t i = 0; i < idb.size(); ++i) CHECK(tropical.add(idb[i], next[i]) == next[i]);
      idb = next;
    }
  }
}

TEST_CASE("expansions") {
  Program tc = parse_program(kTc);
  auto e0 = expansions(tc, 0);
  REQUIRE(e0.size() == 1);
  CHECK(to_string(e0[0].query) == "T(x,y) :- E(x,y).");
  auto e1 = expansions(tc, 1);
  REQUIRE(e1.size() == 2);
  CHECK(to_string(e1[1].query) == "T(x,y) :- E(x,z1), E(z1,y).");
  CHECK(e1[1].level == 1);
  CHECK(expansions(tc, 2).size() == 3);

  Program dyck = parse_program(kDyck);
  auto d1 = expansions(dyck, 1);
  CHECK(d1.size() == 3);
  bool found = false;
  for (const auto& x : d1) {
    if (x.query.body.size() != 4) continue;
    std::vector<std::string> preds;
    for (const auto& a : x.query.body) preds.push_back(a.predicate);
    if (preds == std::vector<std::string>{"L", "L", "R", "R"}) found = true;
  }
  CHECK(found);
  CHECK(error_of([&] { expansions(dyck, 4, 50); }) == ErrorCode::LimitExceeded);
}

TEST_CASE("expansions up to depth d match d+1 naive iterations") {
  Program tc = parse_program(kTc);
  Program dyck = parse_program(kDyck);
  auto boolean = builtin("boolean");
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 8; ++trial) {
    GraphInstance gi = random_graph(4, 0.45, 900 + trial);
    Database labeled;
    for (const auto& f : gi.db.facts()) labeled.add({rng() % 2 ? "L" : "R", f.atom.args});
    for (auto* pair : {&tc, &dyck}) {
      const Program& p = *pair;
      const Database& db = pair == &tc ? gi.db : labeled;
      Assignment ones;
      for (const auto& f : db.facts()) ones[f.var] = true;
      for (std::size_t d = 0; d <= 2; ++d) {
        std::set<GroundAtom> via_cq;
        for (const auto& x : expansions(p, d)) {
          auto a = answers(x.query, db);
          via_cq.insert(a.begin(), a.end());
        }
        // d+1 ICO applications from zero, via the brute-force ICO capped at d+1 steps.
        auto g = ground(p, db);
        std::vector<Element> edb(db.size(), true);
        std::vector<Element> idb(g.idb_facts.size(), false);
        for (std::size_t k = 0; k <= d; ++k) idb = ico_step(g, boolean, edb, idb);
        std::set<GroundAtom> via_ico;
        for (std::size_t i = 0; i < idb.size(); ++i)
          if (idb[i] == Element{true} && g.idb_facts[i].predicate == p.target()) via_ico.insert(g.idb_facts[i]);
        CHECK(via_cq == via_ico);
      }
    }
  }
}

TEST_CASE("conjunctive query parsing") {
  auto q = parse_cq("C(X,Y) :- E(X,Z), E(Z,Y).");
  CHECK(q.body.size() == 2);
  CHECK(error_of([] { parse_cq("A(x) :- B(x). C(x) :- B(x)."); }) == ErrorCode::SyntaxError);
}
