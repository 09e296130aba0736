#include "varigap/lagrangian.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "checked_ops.hpp"
#include "varigap/error.hpp"

namespace varigap {

using NativeFn = double (*)(double, double);

struct Lagrangian::Impl {
  std::string name;
  std::string source;
  std::vector<std::string> variables;
  NativeFn native = nullptr;
  expr::Program program;
};

namespace {

using namespace detail;

// Same operation order as the parsed text
// "if(y==0, 1, (v^2 - 1/(4*y^2))^2 * v^2)", so both agree bit for bit.
double gap_example(double y, double v) {
  if (y == 0.0) return 1.0;
  const double v2 = checked_pow(v, 2.0, 0);
  const double y2 = checked_pow(y, 2.0, 0);
  const double inner = checked_sub(v2, checked_div(1.0, checked_mul(4.0, y2, 0), 0), 0);
  return checked_mul(checked_pow(inner, 2.0, 0), checked_pow(v, 2.0, 0), 0);
}

double quadratic(double, double v) { return checked_pow(v, 2.0, 0); }

double abs_velocity(double, double v) { return std::abs(v); }

struct BuiltinEntry {
  const char* name;
  const char* source;
  NativeFn fn;
};

constexpr std::array<BuiltinEntry, 3> kBuiltins = {{
    {"gap_example", "if(y == 0, 1, (v^2 - 1/(4*y^2))^2*v^2)", &gap_example},
    {"quadratic", "v^2", &quadratic},
    {"abs_velocity", "abs(v)", &abs_velocity},
}};

std::string fmt(double x) {
  std::array<char, 64> buf{};
  const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), r.ptr);
}

}  // namespace

Lagrangian Lagrangian::builtin(std::string_view name) {
  for (const auto& b : kBuiltins) {
    if (name == b.name) {
      auto impl = std::make_shared<Impl>();
      impl->name = b.name;
      impl->source = b.source;
      impl->variables = {"y", "v"};
      impl->native = b.fn;
      return Lagrangian(std::move(impl));
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown builtin Lagrangian '" + std::string(name) + "'");
}

Lagrangian Lagrangian::parse(std::string_view text, std::vector<std::string> variables) {
  if (variables.size() != 2 || variables[0] == variables[1])
    throw Error(ErrorCode::InvalidArgument, "a Lagrangian needs two distinct variable names");
  const expr::Expression e = expr::parse(text, variables);
  auto impl = std::make_shared<Impl>();
  impl->source = std::string(text);
  impl->variables = std::move(variables);
  impl->program = expr::Program::compile(e);
  return Lagrangian(std::move(impl));
}

const std::vector<std::string>& Lagrangian::builtin_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& b : kBuiltins) n.emplace_back(b.name);
    return n;
  }();
  return names;
}

double Lagrangian::eval_double(double y, double v) const {
  double r;
  if (impl_->native != nullptr) {
    if (std::isnan(y) || std::isnan(v)) eval_fail("NaN input", 0);
    r = impl_->native(y, v);
  } else {
    const std::array<double, 2> vars = {y, v};
    r = impl_->program.run(vars);
  }
  if (std::isnan(r)) eval_fail("NaN result", 0);
  if (r < 0.0) {
    throw Error(ErrorCode::Nonnegativity, "nonnegativity violated: L(" + fmt(y) + ", " + fmt(v) +
                                              ") = " + fmt(r));
  }
  return r;
}

ExtendedValue Lagrangian::operator()(double y, double v) const {
  return ExtendedValue::from_double(eval_double(y, v));
}

const std::string& Lagrangian::builtin_name() const noexcept { return impl_->name; }
const std::string& Lagrangian::source() const noexcept { return impl_->source; }
const std::vector<std::string>& Lagrangian::variables() const noexcept {
  return impl_->variables;
}

ExtendedValue eval_L(const Lagrangian& L, double y, double v) { return L(y, v); }

// ---------------------------------------------------------------------------

const char* to_string(RhoSide side) noexcept { return side == RhoSide::Plus ? "plus" : "minus"; }

RhoPair::RhoPair(std::string_view minus, std::string_view plus)
    : minus_src_(minus),
      plus_src_(plus),
      minus_(expr::parse(minus, expr::Context::Rho)),
      plus_(expr::parse(plus, expr::Context::Rho)),
      minus_prog_(expr::Program::compile(minus_)),
      plus_prog_(expr::Program::compile(plus_)) {}

RhoPair RhoPair::constant(double minus, double plus) { return RhoPair(fmt(minus), fmt(plus)); }

double RhoPair::eval_unchecked(RhoSide side, double z) const {
  const std::array<double, 1> vars = {z};
  return side == RhoSide::Plus ? plus_prog_.run(vars) : minus_prog_.run(vars);
}

double RhoPair::eval(RhoSide side, double z) const {
  const double r = eval_unchecked(side, z);
  if (!std::isfinite(r)) {
    eval_fail(std::string("rho") + (side == RhoSide::Plus ? "+" : "-") + "(" + fmt(z) +
                  ") is not finite",
              0);
  }
  const bool ok = side == RhoSide::Plus ? r > 0.0 : r < 0.0;
  if (!ok) {
    throw Error(ErrorCode::ConditionSign,
                std::string("condition R sign failure: rho") + (side == RhoSide::Plus ? "+" : "-") +
                    "(" + fmt(z) + ") = " + fmt(r));
  }
  return r;
}

double eval_rho(const RhoPair& rho, RhoSide side, double z) { return rho.eval(side, z); }

}  // namespace varigap
