#include "varigap/expression.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <functional>

#include "checked_ops.hpp"
#include "varigap/error.hpp"

namespace varigap::expr {

const char* function_name(Func f) noexcept {
  switch (f) {
    case Func::Abs: return "abs";
    case Func::Sqrt: return "sqrt";
    case Func::Min: return "min";
    case Func::Max: return "max";
    case Func::Exp: return "exp";
    case Func::Log: return "log";
  }
  return "?";
}

int function_arity(Func f) noexcept { return f == Func::Min || f == Func::Max ? 2 : 1; }

const char* compare_symbol(Cmp c) noexcept {
  switch (c) {
    case Cmp::Eq: return "==";
    case Cmp::Ne: return "!=";
    case Cmp::Lt: return "<";
    case Cmp::Le: return "<=";
    case Cmp::Gt: return ">";
    case Cmp::Ge: return ">=";
  }
  return "?";
}

Expression::Expression(std::vector<Node> nodes, int root, std::vector<std::string> variables)
    : nodes_(std::move(nodes)), root_(root), vars_(std::move(variables)) {}

namespace {

constexpr std::array<Func, 6> kFunctions = {Func::Abs, Func::Sqrt, Func::Min,
                                            Func::Max, Func::Exp,  Func::Log};

enum class Tok {
  Number, Ident, LParen, RParen, Comma, Plus, Minus, Star, Slash, Caret,
  EqEq, Ne, Lt, Le, Gt, Ge, End
};

struct Token {
  Tok kind;
  std::string_view text;
  double number = 0.0;
  int pos = 0;  // 1-based
};

[[noreturn]] void syntax_error(const std::string& msg, int pos) {
  throw Error(ErrorCode::Parse, "syntax error at position " + std::to_string(pos) + ": " + msg,
              pos);
}

std::string describe(const Token& t) {
  if (t.kind == Tok::End) return "end of input";
  return "'" + std::string(t.text) + "'";
}

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    const int pos = static_cast<int>(i) + 1;
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t j = i;
      while (j < s.size() && (std::isdigit(static_cast<unsigned char>(s[j])) || s[j] == '.')) ++j;
      if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
        if (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) {
          while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) ++k;
          j = k;
        }
      }
      const std::string lit(s.substr(i, j - i));
      char* end = nullptr;
      const double v = std::strtod(lit.c_str(), &end);
      if (end != lit.c_str() + lit.size()) syntax_error("malformed number '" + lit + "'", pos);
      if (!std::isfinite(v)) syntax_error("numeric literal out of range '" + lit + "'", pos);
      out.push_back({Tok::Number, s.substr(i, j - i), v, pos});
      i = j;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      out.push_back({Tok::Ident, s.substr(i, j - i), 0.0, pos});
      i = j;
      continue;
    }
    auto two = [&](char next) { return i + 1 < s.size() && s[i + 1] == next; };
    Tok kind;
    std::size_t len = 1;
    switch (c) {
      case '(': kind = Tok::LParen; break;
      case ')': kind = Tok::RParen; break;
      case ',': kind = Tok::Comma; break;
      case '+': kind = Tok::Plus; break;
      case '-': kind = Tok::Minus; break;
      case '*': kind = Tok::Star; break;
      case '/': kind = Tok::Slash; break;
      case '^': kind = Tok::Caret; break;
      case '=':
        if (!two('=')) syntax_error("expected '==' ", pos);
        kind = Tok::EqEq;
        len = 2;
        break;
      case '!':
        if (!two('=')) syntax_error("expected '!='", pos);
        kind = Tok::Ne;
        len = 2;
        break;
      case '<':
        kind = two('=') ? Tok::Le : Tok::Lt;
        len = two('=') ? 2 : 1;
        break;
      case '>':
        kind = two('=') ? Tok::Ge : Tok::Gt;
        len = two('=') ? 2 : 1;
        break;
      default: syntax_error(std::string("unexpected character '") + c + "'", pos);
    }
    out.push_back({kind, s.substr(i, len), 0.0, pos});
    i += len;
  }
  out.push_back({Tok::End, {}, 0.0, static_cast<int>(s.size()) + 1});
  return out;
}

class Parser {
 public:
  Parser(std::string_view text, std::vector<std::string> vars)
      : toks_(tokenize(text)), vars_(std::move(vars)) {}

  Expression run() {
    const int root = additive();
    if (peek().kind != Tok::End) syntax_error("unexpected " + describe(peek()), peek().pos);
    return Expression(std::move(nodes_), root, std::move(vars_));
  }

 private:
  const Token& peek() const { return toks_[at_]; }
  const Token& take() { return toks_[at_++]; }
  bool accept(Tok k) {
    if (peek().kind != k) return false;
    ++at_;
    return true;
  }
  void expect(Tok k, const char* what) {
    if (peek().kind != k) syntax_error(std::string("expected ") + what + ", found " + describe(peek()),
                                       peek().pos);
    ++at_;
  }

  int add(Node n) {
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
  }
  int binary(Op op, int l, int r, int pos) {
    Node n;
    n.op = op;
    n.kids = {l, r};
    n.pos = pos;
    return add(std::move(n));
  }

  int additive() {
    int lhs = multiplicative();
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      const Token& t = take();
      lhs = binary(t.kind == Tok::Plus ? Op::Add : Op::Sub, lhs, multiplicative(), t.pos);
    }
    return lhs;
  }

  int multiplicative() {
    int lhs = unary();
    while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
      const Token& t = take();
      lhs = binary(t.kind == Tok::Star ? Op::Mul : Op::Div, lhs, unary(), t.pos);
    }
    return lhs;
  }

  int unary() {
    if (peek().kind == Tok::Minus) {
      const Token& t = take();
      Node n;
      n.op = Op::Neg;
      n.pos = t.pos;
      n.kids = {unary()};
      return add(std::move(n));
    }
    return power();
  }

  // '^' binds tighter than unary minus and is right-associative; its
  // exponent may itself carry a unary minus (2^-1).
  int power() {
    const int base = primary();
    if (peek().kind == Tok::Caret) {
      const Token& t = take();
      return binary(Op::Pow, base, unary(), t.pos);
    }
    return base;
  }

  int primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Number: {
        take();
        Node n;
        n.op = Op::Number;
        n.number = t.number;
        n.pos = t.pos;
        return add(std::move(n));
      }
      case Tok::LParen: {
        take();
        const int inner = additive();
        expect(Tok::RParen, "')'");
        return inner;
      }
      case Tok::Ident: return identifier();
      default: syntax_error("unexpected " + describe(t), t.pos);
    }
  }

  int identifier() {
    const Token& t = take();
    const bool call = peek().kind == Tok::LParen;
    if (!call) {
      for (std::size_t i = 0; i < vars_.size(); ++i) {
        if (vars_[i] == t.text) {
          Node n;
          n.op = Op::Variable;
          n.var = static_cast<int>(i);
          n.pos = t.pos;
          return add(std::move(n));
        }
      }
    }
    if (t.text == "if") {
      if (!call) syntax_error("'if' requires arguments", t.pos);
      take();
      const int cond = condition();
      expect(Tok::Comma, "','");
      const int a = additive();
      expect(Tok::Comma, "','");
      const int b = additive();
      if (peek().kind == Tok::Comma) {
        throw Error(ErrorCode::Parse,
                    "arity error at position " + std::to_string(t.pos) + ": 'if' expects 3 arguments",
                    t.pos);
      }
      expect(Tok::RParen, "')'");
      Node n;
      n.op = Op::If;
      n.kids = {cond, a, b};
      n.pos = t.pos;
      return add(std::move(n));
    }
    for (Func f : kFunctions) {
      if (t.text != function_name(f)) continue;
      if (!call) {
        syntax_error("function '" + std::string(t.text) + "' requires arguments", t.pos);
      }
      take();
      std::vector<int> args;
      if (peek().kind != Tok::RParen) {
        args.push_back(additive());
        while (accept(Tok::Comma)) args.push_back(additive());
      }
      expect(Tok::RParen, "')'");
      if (static_cast<int>(args.size()) != function_arity(f)) {
        throw Error(ErrorCode::Parse,
                    "arity error at position " + std::to_string(t.pos) + ": '" +
                        std::string(t.text) + "' expects " + std::to_string(function_arity(f)) +
                        " argument(s), got " + std::to_string(args.size()),
                    t.pos);
      }
      Node n;
      n.op = Op::Call;
      n.func = f;
      n.kids = std::move(args);
      n.pos = t.pos;
      return add(std::move(n));
    }
    throw Error(ErrorCode::Parse,
                "unknown identifier at position " + std::to_string(t.pos) + ": '" +
                    std::string(t.text) + "'",
                t.pos);
  }

  int condition() {
    const int lhs = additive();
    Cmp cmp;
    switch (peek().kind) {
      case Tok::EqEq: cmp = Cmp::Eq; break;
      case Tok::Ne: cmp = Cmp::Ne; break;
      case Tok::Lt: cmp = Cmp::Lt; break;
      case Tok::Le: cmp = Cmp::Le; break;
      case Tok::Gt: cmp = Cmp::Gt; break;
      case Tok::Ge: cmp = Cmp::Ge; break;
      default: syntax_error("expected comparison, found " + describe(peek()), peek().pos);
    }
    const Token& t = take();
    const int rhs = additive();
    Node n;
    n.op = Op::Compare;
    n.cmp = cmp;
    n.kids = {lhs, rhs};
    n.pos = t.pos;
    return add(std::move(n));
  }

  std::vector<Token> toks_;
  std::size_t at_ = 0;
  std::vector<std::string> vars_;
  std::vector<Node> nodes_;
};

// Precedence levels used by the printer.
constexpr int kAdditive = 1, kMultiplicative = 2, kUnary = 3, kPower = 4, kPrimary = 5;

int precedence(const Node& n) {
  switch (n.op) {
    case Op::Add:
    case Op::Sub: return kAdditive;
    case Op::Mul:
    case Op::Div: return kMultiplicative;
    case Op::Neg: return kUnary;
    case Op::Pow: return kPower;
    default: return kPrimary;
  }
}

std::string format_number(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

void print(const Expression& e, int idx, int min_prec, std::string& out) {
  const Node& n = e.node(idx);
  const bool paren = precedence(n) < min_prec;
  if (paren) out += '(';
  switch (n.op) {
    case Op::Number: out += format_number(n.number); break;
    case Op::Variable: out += e.variables().at(static_cast<std::size_t>(n.var)); break;
    case Op::Neg:
      out += '-';
      print(e, n.kids[0], kUnary, out);
      break;
    case Op::Add:
    case Op::Sub:
      print(e, n.kids[0], kAdditive, out);
      out += n.op == Op::Add ? " + " : " - ";
      print(e, n.kids[1], kMultiplicative, out);
      break;
    case Op::Mul:
    case Op::Div:
      print(e, n.kids[0], kMultiplicative, out);
      out += n.op == Op::Mul ? "*" : "/";
      print(e, n.kids[1], kUnary, out);
      break;
    case Op::Pow:
      print(e, n.kids[0], kPrimary, out);
      out += '^';
      print(e, n.kids[1], kUnary, out);
      break;
    case Op::Call:
      out += function_name(n.func);
      out += '(';
      for (std::size_t i = 0; i < n.kids.size(); ++i) {
        if (i > 0) out += ", ";
        print(e, n.kids[i], kAdditive, out);
      }
      out += ')';
      break;
    case Op::If:
      out += "if(";
      print(e, n.kids[0], kAdditive, out);
      out += ", ";
      print(e, n.kids[1], kAdditive, out);
      out += ", ";
      print(e, n.kids[2], kAdditive, out);
      out += ')';
      break;
    case Op::Compare:
      print(e, n.kids[0], kAdditive, out);
      out += ' ';
      out += compare_symbol(n.cmp);
      out += ' ';
      print(e, n.kids[1], kAdditive, out);
      break;
  }
  if (paren) out += ')';
}

bool equal_at(const Expression& a, int i, const Expression& b, int j) {
  const Node& x = a.node(i);
  const Node& y = b.node(j);
  if (x.op != y.op || x.kids.size() != y.kids.size()) return false;
  switch (x.op) {
    case Op::Number:
      if (x.number != y.number) return false;
      break;
    case Op::Variable:
      if (x.var != y.var) return false;
      break;
    case Op::Call:
      if (x.func != y.func) return false;
      break;
    case Op::Compare:
      if (x.cmp != y.cmp) return false;
      break;
    default: break;
  }
  for (std::size_t k = 0; k < x.kids.size(); ++k) {
    if (!equal_at(a, x.kids[k], b, y.kids[k])) return false;
  }
  return true;
}

}  // namespace

Expression parse(std::string_view text, std::vector<std::string> variables) {
  return Parser(text, std::move(variables)).run();
}

Expression parse(std::string_view text, Context context) {
  if (context == Context::Lagrangian) return parse(text, std::vector<std::string>{"y", "v"});
  return parse(text, std::vector<std::string>{"z"});
}

std::string pretty_print(const Expression& e) {
  std::string out;
  print(e, e.root(), kAdditive, out);
  return out;
}

bool structurally_equal(const Expression& a, const Expression& b) {
  if (a.root() < 0 || b.root() < 0) return a.root() == b.root();
  return equal_at(a, a.root(), b, b.root());
}

// ---------------------------------------------------------------------------
// Program

Program Program::compile(const Expression& e) {
  Program p;
  p.nvars_ = e.variables().size();
  p.emit(e, e.root(), 0);
  return p;
}

void Program::emit(const Expression& e, int idx, int depth) {
  const Node& n = e.node(idx);
  auto push = [&](Code c, int arg = 0, double value = 0.0, Cmp cmp = Cmp::Eq) {
    code_.push_back({c, cmp, arg, value, n.pos});
  };
  max_stack_ = std::max(max_stack_, static_cast<std::size_t>(depth) + 1);
  switch (n.op) {
    case Op::Number: push(Code::Const, 0, n.number); return;
    case Op::Variable: push(Code::Var, n.var); return;
    case Op::Neg:
      emit(e, n.kids[0], depth);
      push(Code::Neg);
      return;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div:
    case Op::Pow: {
      emit(e, n.kids[0], depth);
      emit(e, n.kids[1], depth + 1);
      const Code c = n.op == Op::Add   ? Code::Add
                     : n.op == Op::Sub ? Code::Sub
                     : n.op == Op::Mul ? Code::Mul
                     : n.op == Op::Div ? Code::Div
                                       : Code::Pow;
      push(c);
      return;
    }
    case Op::Call: {
      for (std::size_t k = 0; k < n.kids.size(); ++k)
        emit(e, n.kids[k], depth + static_cast<int>(k));
      switch (n.func) {
        case Func::Abs: push(Code::Abs); break;
        case Func::Sqrt: push(Code::Sqrt); break;
        case Func::Exp: push(Code::Exp); break;
        case Func::Log: push(Code::Log); break;
        case Func::Min: push(Code::Min); break;
        case Func::Max: push(Code::Max); break;
      }
      return;
    }
    case Op::Compare:
      emit(e, n.kids[0], depth);
      emit(e, n.kids[1], depth + 1);
      push(Code::Compare, 0, 0.0, n.cmp);
      return;
    case Op::If: {
      emit(e, n.kids[0], depth);
      const std::size_t jf = code_.size();
      push(Code::JumpIfFalse);
      emit(e, n.kids[1], depth);
      const std::size_t jend = code_.size();
      push(Code::Jump);
      code_[jf].arg = static_cast<int>(code_.size());
      emit(e, n.kids[2], depth);
      code_[jend].arg = static_cast<int>(code_.size());
      return;
    }
  }
}

double Program::run(std::span<const double> vars) const {
  using namespace detail;
  if (vars.size() != nvars_) {
    throw Error(ErrorCode::InvalidArgument, "expression expects " + std::to_string(nvars_) +
                                                " variable(s), got " + std::to_string(vars.size()));
  }
  for (double v : vars) {
    if (std::isnan(v)) eval_fail("NaN input", 0);
  }
  constexpr std::size_t kInline = 64;
  std::array<double, kInline> small{};
  std::vector<double> big;
  double* st = small.data();
  if (max_stack_ > kInline) {
    big.resize(max_stack_);
    st = big.data();
  }
  std::size_t sp = 0;
  std::size_t pc = 0;
  while (pc < code_.size()) {
    const Instr& in = code_[pc++];
    switch (in.code) {
      case Code::Const: st[sp++] = in.value; break;
      case Code::Var: st[sp++] = vars[static_cast<std::size_t>(in.arg)]; break;
      case Code::Neg: st[sp - 1] = -st[sp - 1]; break;
      case Code::Add: --sp; st[sp - 1] = checked_add(st[sp - 1], st[sp], in.pos); break;
      case Code::Sub: --sp; st[sp - 1] = checked_sub(st[sp - 1], st[sp], in.pos); break;
      case Code::Mul: --sp; st[sp - 1] = checked_mul(st[sp - 1], st[sp], in.pos); break;
      case Code::Div: --sp; st[sp - 1] = checked_div(st[sp - 1], st[sp], in.pos); break;
      case Code::Pow: --sp; st[sp - 1] = checked_pow(st[sp - 1], st[sp], in.pos); break;
      case Code::Abs: st[sp - 1] = std::abs(st[sp - 1]); break;
      case Code::Sqrt: st[sp - 1] = checked_sqrt(st[sp - 1], in.pos); break;
      case Code::Exp: st[sp - 1] = std::exp(st[sp - 1]); break;
      case Code::Log: st[sp - 1] = checked_log(st[sp - 1], in.pos); break;
      case Code::Min: --sp; st[sp - 1] = std::min(st[sp - 1], st[sp]); break;
      case Code::Max: --sp; st[sp - 1] = std::max(st[sp - 1], st[sp]); break;
      case Code::Compare: {
        --sp;
        const double a = st[sp - 1], b = st[sp];
        bool r = false;
        switch (in.cmp) {
          case Cmp::Eq: r = a == b; break;
          case Cmp::Ne: r = a != b; break;
          case Cmp::Lt: r = a < b; break;
          case Cmp::Le: r = a <= b; break;
          case Cmp::Gt: r = a > b; break;
          case Cmp::Ge: r = a >= b; break;
        }
        st[sp - 1] = r ? 1.0 : 0.0;
        break;
      }
      case Code::JumpIfFalse:
        --sp;
        if (st[sp] == 0.0) pc = static_cast<std::size_t>(in.arg);
        break;
      case Code::Jump: pc = static_cast<std::size_t>(in.arg); break;
    }
  }
  return st[0];
}

}  // namespace varigap::expr
