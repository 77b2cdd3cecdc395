#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "provcirc/builders.hpp"
#include "provcirc/grammar.hpp"
#include "test_util.hpp"

using namespace provcirc;

namespace {

const char* kTc = "T(x,y) :- E(x,y). T(x,y) :- T(x,z), E(z,y).";
const char* kDyck = "S(x,y) :- L(x,z), R(z,y). S(x,y) :- L(x,w), S(w,z), R(z,y). S(x,y) :- S(x,z), S(z,y).";

GraphInstance worked() { return parse_graph(read_data("worked_graph.tsv")); }

Polynomial produced(const Circuit& c) { return symbolic_polynomial(c, false); }

bool is_zero_circuit(const Circuit& c) { return c.gate(c.output()).op == GateOp::Zero; }

}  // namespace

TEST_CASE("every builder reproduces the worked example") {
  Program tc = parse_program(kTc);
  GraphInstance gi = worked();
  GroundAtom fact{"T", {"s", "t"}};
  Polynomial oracle = oracle_polynomial(tc, gi.db, fact, false);
  REQUIRE(oracle.size() == 3);
  std::size_t s = *gi.graph.find_vertex("s");
  std::size_t t = *gi.graph.find_vertex("t");
  CHECK(produced(build_layered_naive(tc, gi.db, fact, 4)) == oracle);
  CHECK(produced(build_layered_graph(gi.graph, s, t)) == oracle);
  CHECK(produced(build_bellman_ford(gi.graph, s, t)) == oracle);
  CHECK(produced(build_repeated_squaring(gi.graph, s, t)) == oracle);
  CHECK(produced(build_uvg(tc, gi.db, fact)) == oracle);

  auto boolean = builtin("boolean");
  Assignment ones;
  for (const auto& f : gi.db.facts()) ones[f.var] = true;
  CHECK(evaluate(build_bellman_ford(gi.graph, s, t), boolean, ones) == Element{true});
  auto tropical = builtin("tropical");
  Assignment unit;
  for (const auto& f : gi.db.facts()) unit[f.var] = Tropical{1};
  CHECK(evaluate(build_bellman_ford(gi.graph, s, t), tropical, unit) == Element{Tropical{3}});

  // Truncated layering misses the length-3 paths entirely.
  CHECK(produced(build_layered_naive(tc, gi.db, fact, 1)).is_zero());
  CHECK(produced(build_layered_naive(tc, gi.db, fact, 2)).is_zero());
  CHECK(produced(build_layered_naive(tc, gi.db, fact, 3)) == oracle);
}

TEST_CASE("layered-graph builder") {
  GraphInstance one;
  one.add_edge("s", "t", "E");
  Circuit c = build_layered_graph(one.graph, 0, 1);
  CHECK(c.size() == 1);
  CHECK(c.gate(c.output()).op == GateOp::Input);

  GraphInstance two;
  two.add_edge("s", "a", "E");
  two.add_edge("s", "b", "E");
  two.add_edge("a", "t", "E");
  two.add_edge("b", "t", "E");
  Polynomial p = produced(build_layered_graph(two.graph, 0, *two.graph.find_vertex("t")));
  CHECK(p.size() == 2);
  for (const auto& m : p.monomials) CHECK(m.size() == 2);

  GraphInstance layered = layered_graph(2, 3);
  std::size_t s = *layered.graph.find_vertex("s");
  std::size_t t = *layered.graph.find_vertex("t");
  Circuit lc = build_layered_graph(layered.graph, s, t);
  CHECK(*oracle::as_sets(produced(lc)) == oracle::simple_paths(layered.graph, s, t));
  CHECK(produced(lc).size() == 8);
  // m inputs, at most m products and at most m sums.
  CHECK(metrics(lc).size <= 3 * layered.graph.num_edges());

  GraphInstance skew;
  skew.add_edge("s", "a", "E");
  skew.add_edge("a", "t", "E");
  skew.add_edge("s", "t", "E");
  CHECK(error_of([&] { build_layered_graph(skew.graph, 0, *skew.graph.find_vertex("t")); }) ==
        ErrorCode::NotLayered);
}

TEST_CASE("path builders on trivial graphs") {
  GraphInstance single;
  single.graph.vertex("v");
  CHECK(is_zero_circuit(build_bellman_ford(single.graph, 0, 0)));
  CHECK(is_zero_circuit(build_repeated_squaring(single.graph, 0, 0)));
  GraphInstance loop;
  loop.add_edge("v", "v", "E");
  CHECK(produced(build_repeated_squaring(loop.graph, 0, 0)) == poly_var(0));
  CHECK(produced(build_bellman_ford(loop.graph, 0, 0)) == poly_var(0));
}

TEST_CASE("path builders equal the simple-path oracle on random graphs") {
  Program tc = parse_program(kTc);
  for (int trial = 0; trial < 40; ++trial) {
    GraphInstance gi = random_graph(5, 0.3, 300 + trial);
    for (std::size_t s = 0; s < 5; ++s) {
      for (std::size_t t = 0; t < 5; ++t) {
        auto paths = oracle::simple_paths(gi.graph, s, t);
        auto bf = oracle::as_sets(produced(build_bellman_ford(gi.graph, s, t)));
        auto sq = oracle::as_sets(produced(build_repeated_squaring(gi.graph, s, t)));
        REQUIRE(bf.has_value());
        REQUIRE(sq.has_value());
        CHECK(*bf == paths);
        CHECK(*sq == paths);
      }
    }
  }
}

TEST_CASE("program builders equal the tight-tree oracle for every IDB fact") {
  Program tc = parse_program(kTc);
  Program dyck = parse_program(kDyck);
  Program bounded = parse_program(read_data("bounded.dl"));
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 12; ++trial) {
    GraphInstance gi = random_graph(4, 0.35, 700 + trial);
    Database labeled;
    Database with_a = gi.db;
    for (const auto& f : gi.db.facts()) labeled.add({rng() % 2 ? "L" : "R", f.atom.args});
    with_a.add({"A", {"v" + std::to_string(rng() % 4)}});
    for (const Program* p : {&tc, &dyck, &bounded}) {
      const Database& db = p == &dyck ? labeled : (p == &bounded ? with_a : gi.db);
      auto g = ground(*p, db);
      for (const auto& fact : g.idb_facts) {
        if (fact.predicate != p->target()) continue;
        Polynomial oracle = oracle_polynomial(g, db, fact, false);
        INFO(to_string(fact));
        CHECK(produced(build_layered_naive(*p, db, fact, g.idb_facts.size())) == oracle);
        CHECK(produced(build_uvg(*p, db, fact)) == oracle);
      }
    }
  }
}

TEST_CASE("cross-builder evaluation agrees with Dijkstra and BFS") {
  Program tc = parse_program(kTc);
  auto tropical = builtin("tropical");
  auto boolean = builtin("boolean");
  for (int trial = 0; trial < 25; ++trial) {
    GraphInstance gi = random_graph(6, 0.3, 1000 + trial);
    Assignment w = weights_assignment(gi.db, tropical);
    Assignment ones;
    for (const auto& f : gi.db.facts()) ones[f.var] = true;
    for (std::size_t s = 0; s < 6; ++s) {
      for (std::size_t t = 0; t < 6; ++t) {
        auto d = oracle::shortest_walk(gi.graph, gi.db, s, t);
        Element expected = d ? Element{Tropical{*d}} : tropical.zero;
        Circuit bf = build_bellman_ford(gi.graph, s, t);
        Circuit sq = build_repeated_squaring(gi.graph, s, t);
        GroundAtom fact{"T", {gi.graph.name(s), gi.graph.name(t)}};
        Circuit naive = build_layered_naive(tc, gi.db, fact, 6);
        for (const Circuit* c : {&bf, &sq, &naive}) {
          CHECK(evaluate(*c, tropical, w) == expected);
          CHECK(evaluate(*c, boolean, ones) == Element{oracle::reachable(gi.graph, s, t)});
        }
      }
    }
  }
}

TEST_CASE("magic builder") {
  Program ab = parse_program(read_data("ab_chain.dl"));
  Database db;
  db.add({"a", {"s", "m"}});
  db.add({"b", {"m", "t"}});
  db.add({"b", {"s", "t"}});
  Polynomial p = produced(build_magic_bounded(ab, db, {"S", {"s", "t"}}));
  CHECK(p == absorb_reduce({Monomial{{0, 1}, {1, 1}}}));

  Program two = parse_program("S(x,y) :- a(x,z), b(z,y). S(x,y) :- c(x,y).");
  db.add({"c", {"s", "t"}});
  GroundAtom fact{"S", {"s", "t"}};
  CHECK(produced(build_magic_bounded(two, db, fact)) == oracle_polynomial(two, db, fact, false));
  CHECK(produced(build_magic_bounded(two, db, fact)).size() == 2);

  Program tc = parse_program(kTc);
  CHECK(error_of([&] { build_magic_bounded(tc, Database{}, {"T", {"s", "t"}}); }) == ErrorCode::NotFinite);
  Program right = parse_program("S(x,y) :- a(x,z), B(z,y). B(x,y) :- b(x,y).");
  CHECK(error_of([&] { build_magic_bounded(right, db, fact); }) == ErrorCode::NotLeftLinear);
  CHECK(error_of([&] { build_magic_bounded(parse_program(read_data("bounded.dl")), db, {"T", {"s", "t"}}); }) ==
        ErrorCode::NotChain);
}

TEST_CASE("UvG builder") {
  Program dyck = parse_program(kDyck);
  Database db;
  FactVar l = db.add({"L", {"a", "b"}});
  FactVar r = db.add({"R", {"b", "c"}});
  GroundAtom fact{"S", {"a", "c"}};
  Monomial lr{{l, 1}, {r, 1}};
  CHECK(produced(build_uvg(dyck, db, fact)) == absorb_reduce({lr}));
  CHECK(is_zero_circuit(build_uvg(dyck, db, fact, 0)));

  Database nested;
  nested.add({"L", {"p0", "p1"}});
  nested.add({"L", {"p1", "p2"}});
  nested.add({"R", {"p2", "p3"}});
  nested.add({"R", {"p3", "p4"}});
  GroundAtom outer{"S", {"p0", "p4"}};
  Polynomial oracle = oracle_polynomial(dyck, nested, outer, false);
  CHECK(oracle.size() == 1);
  CHECK(produced(build_uvg(dyck, nested, outer)) == oracle);
  CHECK(default_uvg_stages(dyck, nested, outer) >= 1);
}

TEST_CASE("reports and strategy names") {
  for (Strategy s : {Strategy::LayeredNaive, Strategy::LayeredGraph, Strategy::BellmanFord, Strategy::Squaring,
                     Strategy::Magic, Strategy::Uvg})
    CHECK(parse_strategy(to_string(s)) == s);
  CHECK(parse_strategy("naive") == Strategy::LayeredNaive);
  CHECK(error_of([] { parse_strategy("dfs"); }) == ErrorCode::InvalidArgument);
  GraphInstance gi = worked();
  auto report = make_report(build_bellman_ford(gi.graph, 0, *gi.graph.find_vertex("t")), Strategy::BellmanFord, 5);
  CHECK(report.size == metrics(report.circuit).size);
  CHECK(report.depth == metrics(report.circuit).depth);
  CHECK(report.strategy == "bellman-ford");
  CHECK(ceil_log2(1) == 0);
  CHECK(ceil_log2(5) == 3);
  CHECK(ceil_log2(64) == 6);
  CHECK(is_zero_circuit(build_layered_naive(parse_program(kTc), Database{}, {"T", {"s", "t"}}, 1)));
}
