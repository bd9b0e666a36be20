#include <doctest.h>

#include <set>

#include "helpers.hpp"
#include "noisynth/enumerate.hpp"
#include "noisynth/errors.hpp"
#include "noisynth/program.hpp"

using namespace noisynth;
using namespace noisynth::testing;

namespace {

int node_count(const Program& p) {
  int c = 1;
  for (const Program& ch : p.children) c += node_count(ch);
  return c;
}

}  // namespace

TEST_CASE("evaluate follows the execution semantics") {
  Grammar g = arith_grammar();
  Program x = parse_sexpr(g, "x");
  CHECK(evaluate(g, x, int_env(1)) == Value(int64_t{1}));

  Program p = parse_sexpr(g, "(mul (add x 3) 3)");
  CHECK(evaluate(g, p, int_env(1)) == Value(int64_t{12}));
  CHECK(p.height() == 2);

  Grammar sp = pair_grammar();
  Program prepend = parse_sexpr(sp, "(concat \"a\" x)");
  CHECK(evaluate(sp, prepend, str_env("bc")) == Value(std::string("abc")));
}

TEST_CASE("evaluate error paths") {
  Grammar g = arith_grammar();
  Program x = parse_sexpr(g, "x");
  CHECK_THROWS_AS(evaluate(g, x, InputEnv{}), EvalError);
  CHECK_THROWS_AS(evaluate(g, x, {{"x", Value(std::string("oops"))}}),
                  EvalError);

  // Overflow is an evaluation error, not silent wraparound.
  Program doubling = parse_sexpr(g, "(mul x 2)");
  CHECK_THROWS_AS(evaluate(g, doubling, int_env(INT64_MAX / 2 + 1)), EvalError);
}

TEST_CASE("evaluate_vec is elementwise and length preserving") {
  Grammar g = arith_grammar();
  Program p = parse_sexpr(g, "(mul x 2)");
  auto out = evaluate_vec(g, p, {int_env(1), int_env(2)});
  REQUIRE(out.size() == 2);
  CHECK(out[0] == Value(int64_t{2}));
  CHECK(out[1] == Value(int64_t{4}));

  CHECK(evaluate_vec(g, parse_sexpr(g, "x"), {}).empty());

  auto plus2 = evaluate_vec(g, parse_sexpr(g, "(add x 2)"), {int_env(1)});
  CHECK(plus2 == std::vector<Value>{Value(int64_t{3})});

  // Errors carry the failing index.
  Program doubling = parse_sexpr(g, "(mul x 2)");
  try {
    evaluate_vec(g, doubling, {int_env(0), int_env(INT64_MAX)});
    FAIL("expected overflow");
  } catch (const EvalError& e) {
    CHECK(std::string(e.what()).find("index 1") != std::string::npos);
  }
}

TEST_CASE("complexity is the recursive cost sum") {
  Grammar g = arith_grammar();
  CostModel size = CostModel::size_costs(g);
  CHECK(complexity(g, parse_sexpr(g, "x"), size) == 1.0);

  Program p = parse_sexpr(g, "(mul (add x 3) 3)");
  CHECK(complexity(g, p, size) == 5.0);

  CostModel expensive_mul =
      CostModel::from_json(g, nlohmann::json{{"mul", 2.0}});
  CHECK(complexity(g, p, expensive_mul) == 6.0);
}

TEST_CASE("enumerate_programs is exact, ordered, and monotone in d") {
  Grammar g = arith_grammar();

  auto d0 = enumerate_programs(g, 0);
  REQUIRE(d0.size() == 1);
  CHECK(to_sexpr(g, d0[0]) == "x");

  auto d2 = enumerate_programs(g, 2);
  CHECK(d2.size() == 21);

  // Heights respect the bound and the order is bottom-up by height.
  int last_height = 0;
  std::set<std::string> seen;
  for (const Program& p : d2) {
    CHECK(p.height() <= 2);
    CHECK(p.height() >= last_height);
    last_height = p.height();
    CHECK(seen.insert(to_sexpr(g, p)).second);  // exactly once
    CHECK(conforms(g, p, g.start));
  }

  // d2 is a prefix-closed subset of d3.
  auto d3 = enumerate_programs(g, 3);
  std::set<std::string> d3_set;
  for (const Program& p : d3) d3_set.insert(to_sexpr(g, p));
  for (const Program& p : d2) CHECK(d3_set.count(to_sexpr(g, p)));

  // Distinct output vectors at x=1 match the accepting labels of the
  // height-2 automaton.
  std::set<int64_t> outputs;
  for (const Program& p : d2) {
    outputs.insert(evaluate(g, p, int_env(1)).as_int());
  }
  CHECK(outputs == std::set<int64_t>{1, 2, 3, 4, 5, 6, 7, 8, 9, 12});
}

TEST_CASE("size equals node count at unit costs") {
  Grammar g = arith_grammar();
  CostModel size = CostModel::size_costs(g);
  for (const Program& p : enumerate_programs(g, 2)) {
    CHECK(complexity(g, p, size) == doctest::Approx(node_count(p)));
  }
}

TEST_CASE("sexpr round trip") {
  Grammar g = ab_grammar();
  auto programs = enumerate_programs(g, 2);
  REQUIRE(programs.size() == 2);
  for (const Program& p : programs) {
    Program back = parse_sexpr(g, to_sexpr(g, p));
    CHECK(back == p);
  }
}

TEST_CASE("grammar validation rejects bad inputs") {
  nlohmann::json j = arith_grammar().to_json();
  j["start"] = "zzz";
  CHECK_THROWS_AS(Grammar::from_json(j), ConfigError);

  nlohmann::json dup = arith_grammar().to_json();
  dup["productions"].push_back(dup["productions"][1]);
  CHECK_THROWS_AS(Grammar::from_json(dup), ConfigError);

  nlohmann::json neg = arith_grammar().to_json();
  neg["weights"] = {{"x", -1.0}};
  CHECK_THROWS_AS(Grammar::from_json(neg), ConfigError);

  nlohmann::json badw = arith_grammar().to_json();
  badw["weights"] = {{"nosuch", 2.0}};
  CHECK_THROWS_AS(Grammar::from_json(badw), ConfigError);
}

TEST_CASE("determinism: repeated evaluation agrees") {
  Grammar g = suffix_grammar();
  Program p = parse_sexpr(g, "(concat (concat x \"a\") \"b\")");
  for (int i = 0; i < 3; ++i) {
    CHECK(evaluate(g, p, str_env("zz")) == Value(std::string("zzab")));
  }
}

TEST_CASE("grammar JSON round trip keeps weights and costs") {
  nlohmann::json j = arith_grammar().to_json();
  j["weights"] = {{"x", 2.5}, {"n:mul", 0.5}};
  j["costs"] = {{"mul", 3.0}, {"2", 0.25}};
  Grammar g = Grammar::from_json(j);
  Grammar back = Grammar::from_json(g.to_json());
  CHECK(back.terminals[g.terminal_index("x")].weight == 2.5);
  CHECK(back.terminals[g.terminal_index("2")].cost == 0.25);
  CHECK(back.builtin_cost("mul") == 3.0);
  CHECK(back.to_json() == g.to_json());
}
