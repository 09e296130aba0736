#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "varigap/expression.hpp"
#include "varigap/extreal.hpp"

namespace varigap {

/// Autonomous Lagrangian L(y, v) with values in [0, +inf].
///
/// Builtins: "gap_example" (the one-end-point gap Lagrangian, equal to 1 on
/// y = 0 and to (v^2 - 1/(4y^2))^2 v^2 elsewhere), "quadratic" (v^2) and
/// "abs_velocity" (|v|).
class Lagrangian {
 public:
  static Lagrangian builtin(std::string_view name);
  /// `variables` names the state and velocity variables, in that order.
  static Lagrangian parse(std::string_view text,
                          std::vector<std::string> variables = {"y", "v"});
  static const std::vector<std::string>& builtin_names();

  /// Throws Error(Nonnegativity) for a negative result, Error(Evaluation)
  /// for indeterminate forms.
  ExtendedValue operator()(double y, double v) const;
  /// Same contract, returning +inf as a double.
  double eval_double(double y, double v) const;

  /// Builtin name, or empty for parsed expressions.
  const std::string& builtin_name() const noexcept;
  bool is_builtin(std::string_view name) const noexcept { return builtin_name() == name; }
  /// Expression text (canonical form for builtins).
  const std::string& source() const noexcept;
  const std::vector<std::string>& variables() const noexcept;

 private:
  struct Impl;
  explicit Lagrangian(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

ExtendedValue eval_L(const Lagrangian& L, double y, double v);

enum class RhoSide { Minus, Plus };

const char* to_string(RhoSide side) noexcept;

/// Slope fields rho- < 0 < rho+ as expressions in z.
class RhoPair {
 public:
  RhoPair(std::string_view minus, std::string_view plus);
  static RhoPair constant(double minus, double plus);

  /// Throws Error(ConditionSign) with the witness z when the sign contract
  /// fails, Error(Evaluation) when the value is not finite.
  double eval(RhoSide side, double z) const;
  /// Raw value, no sign contract (for verdicts that report the failure).
  double eval_unchecked(RhoSide side, double z) const;

  const std::string& minus_source() const noexcept { return minus_src_; }
  const std::string& plus_source() const noexcept { return plus_src_; }
  const expr::Expression& minus_expression() const noexcept { return minus_; }
  const expr::Expression& plus_expression() const noexcept { return plus_; }

 private:
  std::string minus_src_, plus_src_;
  expr::Expression minus_, plus_;
  expr::Program minus_prog_, plus_prog_;
};

double eval_rho(const RhoPair& rho, RhoSide side, double z);

}  // namespace varigap
