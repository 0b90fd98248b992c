#include <doctest.h>

#include "forge/corpus.hpp"
#include "oracles.hpp"
#include "random_exprs.hpp"

using namespace forge;
using namespace forge::testing;

TEST_CASE("parse builds left-associated applications") {
  ExprStore s;
  NodeId e = parse(s, "(+ 3 2)");
  CHECK(e == s.app(s.app(s.prim("+"), s.prim("3")), s.prim("2")));
  CHECK(parse(s, "(lam (+ $0 3))") == s.lam(s.app(s.app(s.prim("+"), s.var(0)), s.prim("3"))));
  CHECK(parse(s, "(lam + $0)") == parse(s, "(lam (+ $0))"));
  CHECK(parse(s, "((f a) b)") == parse(s, "(f a b)"));
  CHECK_NOTHROW(parse(s, "(lam (+ 3 (* (+ 2 4) 2)))"));
}

TEST_CASE("parse rejects malformed input") {
  ExprStore s;
  CHECK_THROWS_AS(parse(s, "(+ 3 2"), ParseError);
  CHECK_THROWS_AS(parse(s, "(+ 3 2))"), ParseError);
  CHECK_THROWS_AS(parse(s, "()"), ParseError);
  CHECK_THROWS_AS(parse(s, "$x"), ParseError);
  CHECK_THROWS_AS(parse(s, "$"), ParseError);
  CHECK_THROWS_AS(parse(s, "$-1"), ParseError);
  CHECK_THROWS_AS(parse(s, ""), ParseError);
  CHECK_THROWS_AS(parse(s, "(lam)"), ParseError);
}

TEST_CASE("printing uses the surface syntax") {
  ExprStore s;
  CHECK(print(s, parse(s, "((+ 3) 2)")) == "(+ 3 2)");
  CHECK(print(s, parse(s, "(lam (map (lam (f $0 $1)) $0))")) == "(lam (map (lam (f $0 $1)) $0))");
  CHECK(print(s, s.shifted_var(-1)) == "#-1");
  CHECK(print(s, s.app(s.prim("f"), s.absvar(0))) == "(f α0)");
  CHECK(print(s, s.app(s.prim("f"), s.hole(2))) == "(f ??2)");
  CHECK(print(s, parse(s, "((f a) ((g b) c))")) == "(f a (g b c))");
  CHECK(print(s, parse(s, "(($0 a) b)")) == "($0 a b)");
  CHECK(print(s, parse(s, "((lam $0) a)")) == "((lam $0) a)");
}

TEST_CASE("cost under default parameters") {
  ExprStore s;
  CHECK(s.cost(parse(s, "3")) == 100);
  CHECK(s.cost(parse(s, "(+ 3 2)")) == 302);
  CHECK(s.cost(parse(s, "(lam (+ 3 (* (+ 2 4) 2)))")) == 707);
  NodeId a = s.app(s.app(s.prim("+"), s.prim("3")), s.absvar(0));
  CHECK(s.cost(a) == 302);
  CHECK(cost_star(s, a, s.params()) == 202);
  CHECK(s.cost(s.hole(0)) == 0);
}

TEST_CASE("custom primitive costs") {
  CostParams p;
  p.cost_prim["+"] = 7;
  ExprStore s(p);
  CHECK(s.cost(parse(s, "(+ 3 2)")) == 209);
  CostParams bad;
  bad.cost_app = -1;
  CHECK_THROWS_AS(ExprStore{bad}, std::invalid_argument);
}

TEST_CASE("corpus statistics") {
  ExprStore s;
  Corpus one;
  add_program(s, one, parse(s, "3"));
  auto st = corpus_stats(s, one);
  CHECK(st.count == 1);
  CHECK(st.mean_length == 1.0);
  CHECK(st.mean_depth == 0.0);

  Corpus two;
  add_program(s, two, parse(s, "(+ 3 2)"));
  st = corpus_stats(s, two);
  CHECK(st.mean_length == 3.0);
  CHECK(st.mean_depth == 2.0);

  Corpus lam;
  add_program(s, lam, parse(s, "(lam $0)"));
  st = corpus_stats(s, lam);
  CHECK(st.mean_length == 1.0);
  CHECK(st.mean_depth == 1.0);

  CHECK(corpus_stats(s, Corpus{}).count == 0);
}

TEST_CASE("subtree enumeration") {
  ExprStore s;
  Corpus c;
  add_program(s, c, parse(s, "3"));
  CHECK(subtrees(s, c).size() == 1);

  Corpus d;
  add_program(s, d, parse(s, "(+ 3 2)"));
  auto subs = subtrees(s, d);
  REQUIRE(subs.size() == 5);
  CHECK(print(s, subs[0].node) == "(+ 3 2)");
  CHECK(print(s, subs[1].node) == "(+ 3)");
  CHECK(print(s, subs[2].node) == "+");
  CHECK(print(s, subs[3].node) == "3");
  CHECK(print(s, subs[4].node) == "2");

  // Shared structure is still reported per occurrence.
  Corpus e;
  add_program(s, e, parse(s, "(f (g a) (g a))"));
  CHECK(subtrees(s, e).size() == 9);
}

TEST_CASE("overview corpus contains the four (+ 3 _) subtrees") {
  ExprStore s;
  Corpus c;
  add_program(s, c, parse(s, "(lam (+ 3 (* (+ 2 4) 2)))"));
  add_program(s, c, parse(s, "(lam (map (lam (+ 3 (* 4 (+ 3 $0)))) $0))"));
  add_program(s, c, parse(s, "(lam (* 2 (+ 3 (* $0 (+ 2 1)))))"));
  NodeId plus3 = parse(s, "(+ 3)");
  int found = 0;
  for (const auto& ref : subtrees(s, c)) {
    const Node& n = s.node(ref.node);
    if (n.kind == ExprKind::App && n.left == plus3) ++found;
  }
  CHECK(found == 4);
}

TEST_CASE("corpus JSON in both layouts") {
  ExprStore s;
  Corpus flat = corpus_from_json(s, nlohmann::json::parse(R"j(["(f a)", "(lam $0)"])j"));
  CHECK(flat.size() == 2);
  CHECK(flat.programs[0].task == "prog_0");
  CHECK(flat.task_count() == 2);
  Corpus tasked = corpus_from_json(
      s, nlohmann::json::parse(R"j({"programs":[{"body":"(f a)","task":"t"},{"body":"(f b)","task":"t"}]})j"));
  CHECK(tasked.task_count() == 1);
  CHECK_THROWS(corpus_from_json(s, nlohmann::json::parse(R"j(["(lam $1)"])j")));
  CHECK_THROWS(corpus_from_json(s, nlohmann::json::parse(R"j(["(f ??0)"])j")));
  CHECK_THROWS(corpus_from_json(s, nlohmann::json::parse(R"j({"nothing": 1})j")));
  Corpus back = corpus_from_json(s, corpus_to_json(s, tasked));
  CHECK(back.programs[1].root == tasked.programs[1].root);
  CHECK(back.programs[1].task == "t");
}

TEST_CASE("hash-consing gives one id per structure") {
  ExprStore s;
  CHECK(parse(s, "(f (g a) b)") == parse(s, "(f (g a) b)"));
  CHECK(parse(s, "(f (g a) b)") != parse(s, "(f (g b) a)"));
  Rng rng(11);
  std::map<std::string, NodeId> seen;
  ExprShape shape;
  shape.allow_free = true;
  shape.allow_shifted = true;
  for (int i = 0; i < 2000; ++i) {
    NodeId e = random_expr(s, rng, shape);
    auto [it, fresh] = seen.emplace(print(s, e), e);
    CHECK(it->second == e);
  }
}

TEST_CASE("cached metrics agree with direct evaluation") {
  ExprStore s;
  Rng rng(3);
  ExprShape shape;
  shape.max_nodes = 30;
  shape.allow_free = true;
  shape.allow_shifted = true;
  for (int i = 0; i < 10000; ++i) {
    NodeId e = random_expr(s, rng, shape);
    REQUIRE(s.cost(e) == direct_cost(s, e));
    REQUIRE(s.cost(e) == cost(s, e, s.params()));
  }
}

TEST_CASE("print and parse round trip") {
  ExprStore s;
  Rng rng(5);
  ExprShape shape;
  shape.max_nodes = 25;
  shape.allow_free = true;
  shape.allow_shifted = true;
  for (int i = 0; i < 3000; ++i) {
    NodeId e = random_expr(s, rng, shape);
    REQUIRE(parse(s, print(s, e)) == e);
  }
  NodeId pattern = s.app(s.app(s.prim("f"), s.absvar(1)), s.hole(3));
  CHECK(parse(s, print(s, pattern)) == pattern);
}

TEST_CASE("shift_free lowers free variables") {
  ExprStore s;
  CHECK(shift_free(s, parse(s, "(f $2 (lam $3))"), 2) == parse(s, "(f $0 (lam $1))"));
  CHECK(shift_free(s, parse(s, "(lam $0)"), 3) == parse(s, "(lam $0)"));
  CHECK_THROWS_AS(shift_free(s, parse(s, "$0"), 1), std::logic_error);
  CHECK(equal_modulo_shift(s, parse(s, "(f $1)"), 1, parse(s, "(f $0)"), 0));
  CHECK_FALSE(equal_modulo_shift(s, parse(s, "(f $1)"), 0, parse(s, "(f $0)"), 0));
}
