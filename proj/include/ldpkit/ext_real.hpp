#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <string>

#include "ldpkit/errors.hpp"

namespace ldp {

/// A value in [-inf, +inf]. Infinities are tagged explicitly; the stored
/// double is always finite.
class ExtReal {
 public:
  enum class Kind : std::uint8_t { neg_inf, finite, pos_inf };

  constexpr ExtReal() = default;
  // Implicit on purpose: finite doubles flow into ExtReal arithmetic freely.
  ExtReal(double v) : value_(v) {  // NOLINT(google-explicit-constructor)
    if (!std::isfinite(v)) throw DomainError("ExtReal: non-finite double " + std::to_string(v));
  }

  static constexpr ExtReal inf() { return ExtReal(Kind::pos_inf); }
  static constexpr ExtReal neg_inf() { return ExtReal(Kind::neg_inf); }

  constexpr Kind kind() const { return kind_; }
  constexpr bool is_finite() const { return kind_ == Kind::finite; }
  constexpr bool is_pos_inf() const { return kind_ == Kind::pos_inf; }
  constexpr bool is_neg_inf() const { return kind_ == Kind::neg_inf; }

  /// Finite value; throws on infinities.
  double value() const {
    if (!is_finite()) throw DomainError("ExtReal::value on an infinite value");
    return value_;
  }

  /// IEEE view for output and bindings only.
  double to_double() const {
    switch (kind_) {
      case Kind::pos_inf: return std::numeric_limits<double>::infinity();
      case Kind::neg_inf: return -std::numeric_limits<double>::infinity();
      default: return value_;
    }
  }

  std::string to_string() const;

  friend ExtReal operator-(ExtReal a) {
    if (a.is_pos_inf()) return neg_inf();
    if (a.is_neg_inf()) return inf();
    return ExtReal(-a.value_);
  }

  /// inf + (-inf) is rejected; no convention is defined for it here.
  friend ExtReal operator+(ExtReal a, ExtReal b) {
    if (a.is_finite() && b.is_finite()) return ExtReal(a.value_ + b.value_);
    if ((a.is_pos_inf() && b.is_neg_inf()) || (a.is_neg_inf() && b.is_pos_inf()))
      throw DomainError("ExtReal: inf - inf is undefined");
    return a.is_finite() ? b : a;
  }
  friend ExtReal operator-(ExtReal a, ExtReal b) { return a + (-b); }

  /// Scalar scaling with the convex-analysis convention 0 * inf = 0.
  friend ExtReal operator*(double s, ExtReal a) {
    if (a.is_finite()) return ExtReal(s * a.value_);
    if (s == 0.0) return ExtReal(0.0);
    return (s > 0) == a.is_pos_inf() ? inf() : neg_inf();
  }
  friend ExtReal operator*(ExtReal a, double s) { return s * a; }

  /// Product of two extended reals, 0 * inf = 0.
  friend ExtReal mul(ExtReal a, ExtReal b) {
    if (a.is_finite()) return a.value_ * b;
    if (b.is_finite()) return b.value_ * a;
    return a.kind_ == b.kind_ ? inf() : neg_inf();
  }

  /// a / b for b >= 0 with c/0 = +inf for c > 0 and 0/0 = 0.
  friend ExtReal div_nonneg(ExtReal a, double b) {
    if (b < 0) throw DomainError("div_nonneg: negative divisor");
    if (b == 0.0) {
      if (a.is_finite() && a.value_ == 0.0) return ExtReal(0.0);
      return a.is_neg_inf() || (a.is_finite() && a.value_ < 0) ? neg_inf() : inf();
    }
    return (1.0 / b) * a;
  }

  friend bool operator==(ExtReal a, ExtReal b) {
    return a.kind_ == b.kind_ && (!a.is_finite() || a.value_ == b.value_);
  }
  friend std::partial_ordering operator<=>(ExtReal a, ExtReal b) {
    if (a.kind_ != b.kind_) return a.kind_ <=> b.kind_;
    if (!a.is_finite()) return std::partial_ordering::equivalent;
    return a.value_ <=> b.value_;
  }

 private:
  constexpr explicit ExtReal(Kind k) : kind_(k) {}

  Kind kind_ = Kind::finite;
  double value_ = 0.0;
};

inline ExtReal min(ExtReal a, ExtReal b) { return b < a ? b : a; }
inline ExtReal max(ExtReal a, ExtReal b) { return a < b ? b : a; }

/// Absolute difference of two extended reals, +inf unless both are finite
/// (equal infinities give 0).
inline ExtReal abs_diff(ExtReal a, ExtReal b) {
  if (a.is_finite() && b.is_finite()) return std::abs(a.value() - b.value());
  if (a == b) return 0.0;
  return ExtReal::inf();
}

}  // namespace ldp
