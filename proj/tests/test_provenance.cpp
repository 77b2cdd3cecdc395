#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "provcirc/graph.hpp"
#include "provcirc/provenance.hpp"
#include "test_util.hpp"

using namespace provcirc;

namespace {

const char* kTc = "T(x,y) :- E(x,y). T(x,y) :- T(x,z), E(z,y).";

}  // namespace

TEST_CASE("tight proof trees of the worked example") {
  Program tc = parse_program(kTc);
  Database db = parse_database(read_data("worked.tsv"), &tc);
  auto trees = enumerate_tight_trees(tc, db, {"T", {"s", "t"}});
  CHECK(trees.size() == 3);
  for (const auto& t : trees) CHECK(is_tight(t));

  auto p = oracle_polynomial(tc, db, {"T", {"s", "t"}}, false);
  auto var = [&](const char* a, const char* b) { return *db.find({"E", {a, b}}); };
  std::vector<Monomial> expected{
      Monomial{{var("s", "u1"), 1}, {var("u1", "v1"), 1}, {var("v1", "t"), 1}},
      Monomial{{var("s", "u1"), 1}, {var("u1", "v2"), 1}, {var("v2", "t"), 1}},
      Monomial{{var("s", "u2"), 1}, {var("u2", "v2"), 1}, {var("v2", "t"), 1}},
  };
  for (auto& m : expected) std::sort(m.begin(), m.end());
  CHECK(p == absorb_reduce(expected));
  CHECK(p.size() == 3);
  CHECK(to_string(p, &db) == "E(s,u1)*E(u1,v1)*E(v1,t) + E(s,u1)*E(u1,v2)*E(v2,t) + E(s,u2)*E(u2,v2)*E(v2,t)");
  CHECK(oracle_polynomial(tc, db, {"T", {"t", "s"}}, false).is_zero());
}

TEST_CASE("tight trees on a cycle and the enumeration limit") {
  Program tc = parse_program(kTc);
  Database db;
  db.add({"E", {"a", "b"}});
  db.add({"E", {"b", "a"}});
  CHECK(enumerate_tight_trees(tc, db, {"T", {"a", "a"}}).size() == 1);
  CHECK(enumerate_tight_trees(tc, db, {"T", {"a", "b"}}).size() == 1);
  CHECK(oracle_polynomial(tc, db, {"T", {"a", "b"}}, false).size() == 1);

  GraphInstance k6 = complete_digraph(6);
  CHECK(error_of([&] { enumerate_tight_trees(tc, k6.db, {"T", {"v0", "v5"}}, 10); }) == ErrorCode::LimitExceeded);
}

TEST_CASE("oracle antichain equals simple paths") {
  Program tc = parse_program(kTc);
  for (int trial = 0; trial < 40; ++trial) {
    GraphInstance gi = random_graph(5, 0.35, 40 + trial);
    for (std::size_t s = 0; s < 5; ++s) {
      for (std::size_t t = 0; t < 5; ++t) {
        auto p = oracle_polynomial(tc, gi.db, {"T", {gi.graph.name(s), gi.graph.name(t)}}, false);
        auto sets = oracle::as_sets(p);
        REQUIRE(sets.has_value());
        CHECK(*sets == oracle::simple_paths(gi.graph, s, t));
      }
    }
  }
}

TEST_CASE("absorption and arithmetic") {
  Monomial x{{0, 1}};
  Monomial xy{{0, 1}, {1, 1}};
  Monomial x2{{0, 2}};
  Monomial y{{1, 1}};
  CHECK(divides(x, xy));
  CHECK_FALSE(divides(xy, x));
  CHECK(divides(x, x2));
  CHECK(absorb_reduce({xy, x, x2, x}).monomials == std::vector<Monomial>{x});
  CHECK(absorb_reduce({xy, y, x}).monomials == std::vector<Monomial>{x, y});
  CHECK(flatten(x2) == x);

  auto px = poly_var(0);
  auto py = poly_var(1);
  CHECK(poly_mul(px, px, false).monomials == std::vector<Monomial>{x2});
  CHECK(poly_mul(px, px, true).monomials == std::vector<Monomial>{x});
  CHECK(poly_add(px, poly_mul(px, py, false)) == px);
  CHECK(poly_add(poly_one(), px) == poly_one());
  CHECK(poly_mul(poly_zero(), px, false).is_zero());
  CHECK(error_of([&] { poly_add(px, py, 1); }) == ErrorCode::CapExceeded);
}

TEST_CASE("reduced polynomials are antichains and JSON round-trips") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Monomial> ms;
    for (int i = 0; i < 8; ++i) {
      std::map<FactVar, std::uint32_t> m;
      for (int j = 0; j < 3; ++j) m[rng() % 5] += 1 + rng() % 2;
      ms.emplace_back(m.begin(), m.end());
    }
    Polynomial p = absorb_reduce(ms);
    for (std::size_t i = 0; i < p.monomials.size(); ++i)
      for (std::size_t j = 0; j < p.monomials.size(); ++j)
        if (i != j) CHECK_FALSE(divides(p.monomials[i], p.monomials[j]));
    for (const auto& m : ms)
      CHECK(std::any_of(p.monomials.begin(), p.monomials.end(), [&](const Monomial& k) { return divides(k, m); }));
    CHECK(std::is_sorted(p.monomials.begin(), p.monomials.end()));
    CHECK(polynomial_from_json(to_json(p)) == p);
  }
}

TEST_CASE("polynomial evaluation") {
  auto tropical = builtin("tropical");
  Polynomial p = absorb_reduce({Monomial{{0, 1}, {1, 1}}, Monomial{{2, 2}}});
  Assignment a{{0, Tropical{3}}, {1, Tropical{4}}, {2, Tropical{2}}};
  CHECK(evaluate(p, tropical, a) == Element{Tropical{4}});
  CHECK(evaluate(poly_zero(), tropical, a) == tropical.zero);
  CHECK(evaluate(poly_one(), tropical, a) == tropical.one);
}

TEST_CASE("homomorphisms between conjunctive queries") {
  auto c0 = parse_cq("T(x,y) :- E(x,y).");
  auto c1 = parse_cq("T(x,y) :- E(x,z), E(z,y).");
  auto loop = parse_cq("T(x,y) :- E(x,y), E(y,y).");
  CHECK_FALSE(find_homomorphism(c0, c1).has_value());
  CHECK_FALSE(find_homomorphism(c1, c0).has_value());
  auto h = find_homomorphism(c1, loop);
  REQUIRE(h.has_value());
  CHECK(h->at("z").name == "y");

  auto b0 = parse_cq("T(x,y) :- E(x,y).");
  auto b1 = parse_cq("T(x,y) :- A(x), E(z,y).");
  auto b2 = parse_cq("T(x,y) :- A(x), A(z), E(w,y).");
  CHECK(find_homomorphism(b1, b2).has_value());
  CHECK_FALSE(find_homomorphism(b0, b1).has_value());
}
