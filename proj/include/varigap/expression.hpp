#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace varigap::expr {

enum class Op { Number, Variable, Neg, Add, Sub, Mul, Div, Pow, Call, If, Compare };
enum class Func { Abs, Sqrt, Min, Max, Exp, Log };
enum class Cmp { Eq, Ne, Lt, Le, Gt, Ge };

const char* function_name(Func f) noexcept;
int function_arity(Func f) noexcept;
const char* compare_symbol(Cmp c) noexcept;

struct Node {
  Op op = Op::Number;
  double number = 0.0;  // Op::Number
  int var = -1;         // Op::Variable: index into Expression::variables()
  Func func = Func::Abs;
  Cmp cmp = Cmp::Eq;
  std::vector<int> kids;  // node indices
  int pos = 0;            // 1-based source position (0 when built programmatically)
};

/// Which variables an expression may reference.
enum class Context { Lagrangian, Rho };

/// Immutable abstract syntax tree stored as a node arena.
class Expression {
 public:
  Expression() = default;
  Expression(std::vector<Node> nodes, int root, std::vector<std::string> variables);

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const Node& node(int i) const { return nodes_.at(static_cast<std::size_t>(i)); }
  int root() const noexcept { return root_; }
  const std::vector<std::string>& variables() const noexcept { return vars_; }

 private:
  std::vector<Node> nodes_;
  int root_ = -1;
  std::vector<std::string> vars_;
};

/// Syntax, unknown-identifier and arity errors throw Error(Parse) with the
/// 1-based position of the offending token.
Expression parse(std::string_view text, std::vector<std::string> variables);
Expression parse(std::string_view text, Context context);

/// Canonical text with minimal parentheses; parse(pretty_print(e)) is
/// structurally equal to e.
std::string pretty_print(const Expression& e);

/// Compares tree shape, operators, literals and variable indices; ignores
/// source positions.
bool structurally_equal(const Expression& a, const Expression& b);

/// Stack-machine form of an expression. Conditionals compile to jumps, so
/// the branch not taken is never evaluated.
class Program {
 public:
  Program() = default;
  static Program compile(const Expression& e);

  /// Throws Error(Evaluation) for indeterminate forms (0/0, 0*inf, inf-inf),
  /// division of a non-positive value by zero and out-of-domain function
  /// arguments. Division x/0 with x > 0 yields +inf.
  double run(std::span<const double> vars) const;

  std::size_t variable_count() const noexcept { return nvars_; }

 private:
  enum class Code : unsigned char {
    Const, Var, Neg, Add, Sub, Mul, Div, Pow, Abs, Sqrt, Exp, Log, Min, Max,
    Compare, JumpIfFalse, Jump
  };
  struct Instr {
    Code code;
    Cmp cmp;
    int arg;
    double value;
    int pos;
  };
  void emit(const Expression& e, int node, int depth);

  std::vector<Instr> code_;
  std::size_t max_stack_ = 0;
  std::size_t nvars_ = 0;
};

}  // namespace varigap::expr
