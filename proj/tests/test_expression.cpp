#include <doctest.h>

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "support/oracles.hpp"
#include "varigap/error.hpp"
#include "varigap/expression.hpp"

using namespace varigap;
using namespace varigap::expr;

namespace {

double run(const std::string& text, double y, double v) {
  const Program p = Program::compile(parse(text, Context::Lagrangian));
  const std::array<double, 2> vars{y, v};
  return p.run(vars);
}

Error parse_error(const std::string& text) {
  try {
    parse(text, Context::Lagrangian);
  } catch (const Error& e) {
    return e;
  }
  FAIL("expected a parse error for " << text);
  return Error(ErrorCode::Internal, "");
}

}  // namespace

TEST_CASE("parse shapes") {
  const Expression e = parse("v^2", Context::Lagrangian);
  const Node& root = e.node(e.root());
  CHECK(root.op == Op::Pow);
  CHECK(e.node(root.kids[0]).op == Op::Variable);
  CHECK(e.variables()[static_cast<std::size_t>(e.node(root.kids[0]).var)] == "v");
  CHECK(e.node(root.kids[1]).number == 2.0);

  const Expression g = parse("if(y==0, 1, (v^2 - 1/(4*y^2))^2 * v^2)", Context::Lagrangian);
  const Node& gr = g.node(g.root());
  CHECK(gr.op == Op::If);
  REQUIRE(gr.kids.size() == 3);
  CHECK(g.node(gr.kids[0]).op == Op::Compare);
  CHECK(g.node(gr.kids[0]).cmp == Cmp::Eq);
  CHECK(g.node(gr.kids[2]).op == Op::Mul);
}

TEST_CASE("parse errors carry positions") {
  const Error e = parse_error("1 + * 2");
  CHECK(e.code() == ErrorCode::Parse);
  CHECK(e.position() == 5);
  CHECK(parse_error("w + 1").position() == 1);
  CHECK(parse_error("sqrt(1, 2)").code() == ErrorCode::Parse);
  CHECK(parse_error("foo(1)").position() == 1);
  CHECK(parse_error("(y + 1").code() == ErrorCode::Parse);
  CHECK(parse_error("").code() == ErrorCode::Parse);
  CHECK(parse_error("y v").position() == 3);
  CHECK_THROWS_AS(parse("y", Context::Rho), Error);
  CHECK(run("2^3^2", 0, 0) == 512.0);
  CHECK(run("-2^2", 0, 0) == -4.0);
}

TEST_CASE("evaluation contract") {
  CHECK(run("1/y", 0, 0) == HUGE_VAL);
  CHECK_THROWS_AS(run("y/y", 0, 0), Error);
  CHECK_THROWS_AS(run("-1/y", 0, 1), Error);
  CHECK_THROWS_AS(run("(1/y) * y", 0, 0), Error);
  CHECK_THROWS_AS(run("1/y - 1/y", 0, 0), Error);
  CHECK_THROWS_AS(run("sqrt(y)", -1, 0), Error);
  CHECK(run("if(y == 0, 1, 1/y - 1/y)", 0, 0) == 1.0);
  CHECK(run("if(y >= 0, sqrt(y), 7)", -4, 0) == 7.0);
  CHECK(run("min(y, v) + max(y, v)", 2, 5) == 7.0);
  CHECK(run("abs(v) + exp(0) + log(1)", 0, -3) == 4.0);
}

TEST_CASE("pretty print round trip over a corpus") {
  const std::vector<std::string> corpus = {
      "v^2", "abs(v)", "if(y==0, 1, (v^2 - 1/(4*y^2))^2 * v^2)", "1 + * 2 + 3",
      "y - (v - 1)", "(y - v) - 1", "y / (v / 2)", "(y / v) / 2", "-(y + v)", "-y^2",
      "(-y)^2", "2^3^4", "(2^3)^4", "min(y, max(v, 1))", "sqrt(abs(y)) * exp(-v)",
      "log(1 + y^2)", "if(y < 1, y, if(v >= 2, v, 0))", "y * (v + 1) * 2",
      "y * ((v + 1) * 2)", "1 - -y", "0.1 + 0.2", "1e-300 * y", "1.5e10 / v",
      "if(y <= v, 1, 2) + 3", "abs(y - v) ^ 1.5", "-(-(-y))", "(y)", "((v))",
      "y + v * 2 - 3 / 4 ^ 5", "max(min(y, 1), -1)", "if(y > 0, 1/y, 0)",
      "exp(y) * exp(-y)", "(1 + y)^(1 + v)", "y^-1", "-y * v", "-(y * v)",
      "2 * -v", "if(v != 0, y / v, 0)", "sqrt(y^2 + v^2)", "v^2 / (1 + v^2)",
      "y^2 * v^2 + 1", "(y - 1) * (y + 1)", "1 / (1 / (1 / y))", "abs(abs(v))",
      "if(y == 0, 0, y * log(abs(y)))", "min(1, 2, 3)", "log(0.5) + log(2)",
      "v - v - v", "v - (v - v)", "3.14159 * y^2", "0.000001", "12345678901234567",
      "(y + v) / (y - v)", "if(y >= 0.5, (2*y - 1)^2, 0)", "-1", "--y"};
  int checked = 0;
  for (const std::string& s : corpus) {
    Expression e;
    try {
      e = parse(s, Context::Lagrangian);
    } catch (const Error&) {
      continue;
    }
    const std::string text = pretty_print(e);
    const Expression back = parse(text, Context::Lagrangian);
    CHECK_MESSAGE(structurally_equal(e, back), s << " -> " << text);
    CHECK(pretty_print(back) == text);
    ++checked;
  }
  CHECK(checked >= 50);
}

TEST_CASE("random expressions round trip and agree with the tree-walking oracle") {
  oracle::Rng rng(2024);
  int points = 0, errors = 0;
  for (int tree = 0; tree < 200; ++tree) {
    const oracle::TreePtr t = oracle::random_tree(rng, 4);
    const std::string text = oracle::render(*t);
    const Expression e = parse(text, Context::Lagrangian);
    CHECK(structurally_equal(e, parse(pretty_print(e), Context::Lagrangian)));
    const Program prog = Program::compile(e);
    for (int k = 0; k < 50; ++k) {
      const double y = oracle::uniform(rng, -3, 3);
      const double v = k % 10 == 0 ? 0.0 : oracle::uniform(rng, -3, 3);
      bool oracle_failed = false, lib_failed = false;
      double a = 0, b = 0;
      try {
        a = oracle::eval(*t, y, v);
      } catch (const oracle::EvalError&) {
        oracle_failed = true;
      }
      try {
        const std::array<double, 2> vars{y, v};
        b = prog.run(vars);
      } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::Evaluation);
        lib_failed = true;
      }
      CHECK_MESSAGE(oracle_failed == lib_failed, text << " at " << y << ", " << v);
      if (!oracle_failed && !lib_failed) CHECK_MESSAGE(a == b, text << " at " << y << ", " << v);
      errors += oracle_failed ? 1 : 0;
      ++points;
    }
  }
  CHECK(points == 10000);
  CHECK(errors < points / 2);
}
