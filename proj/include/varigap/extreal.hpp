#pragma once

#include <compare>
#include <limits>

namespace varigap {

/// A value in [0, +inf]: the codomain of a Lagrangian and of the energy
/// functional. Arithmetic saturates at +inf and never produces NaN.
class ExtendedValue {
 public:
  constexpr ExtendedValue() noexcept = default;

  /// Throws Error(Domain) unless `v` is finite and >= 0.
  static ExtendedValue finite(double v);
  static constexpr ExtendedValue infinity() noexcept {
    ExtendedValue e;
    e.infinite_ = true;
    return e;
  }
  /// Accepts +inf as the infinite value; otherwise behaves like finite().
  static ExtendedValue from_double(double v);

  constexpr bool is_finite() const noexcept { return !infinite_; }
  constexpr bool is_infinite() const noexcept { return infinite_; }

  /// Finite payload; throws Error(Domain) on the infinite value.
  double value() const;
  /// Finite payload, or +inf.
  constexpr double to_double() const noexcept {
    return infinite_ ? std::numeric_limits<double>::infinity() : value_;
  }

  friend constexpr bool operator==(const ExtendedValue& a, const ExtendedValue& b) noexcept {
    if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
    return a.value_ == b.value_;
  }
  friend constexpr std::partial_ordering operator<=>(const ExtendedValue& a,
                                                     const ExtendedValue& b) noexcept {
    if (a.infinite_ && b.infinite_) return std::partial_ordering::equivalent;
    if (a.infinite_) return std::partial_ordering::greater;
    if (b.infinite_) return std::partial_ordering::less;
    return a.value_ <=> b.value_;
  }

 private:
  bool infinite_ = false;
  double value_ = 0.0;
};

/// Saturating sum. A finite overflow saturates to +inf.
ExtendedValue add(ExtendedValue a, ExtendedValue b) noexcept;

/// c * a for a finite c >= 0, with 0 * inf = 0 (zero-measure convention).
/// Throws Error(Domain) for negative or non-finite c.
ExtendedValue scale(ExtendedValue a, double c);

inline ExtendedValue operator+(ExtendedValue a, ExtendedValue b) noexcept { return add(a, b); }

}  // namespace varigap
