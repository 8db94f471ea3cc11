#pragma once

#include <string>

#include "ldpkit/ext_real.hpp"

namespace ldp {

/// An interval of the real line with possibly infinite endpoints. Closed
/// endpoints are finite, and the interval always contains a neighbourhood of
/// zero when it describes an effective domain.
struct DomainInterval {
  ExtReal lower = ExtReal::neg_inf();
  ExtReal upper = ExtReal::inf();
  bool lower_closed = false;
  bool upper_closed = false;

  static DomainInterval real_line() { return {}; }
  static DomainInterval make(ExtReal lo, ExtReal hi, bool lo_closed, bool hi_closed);

  bool contains(double u) const;
  bool interior(double u) const;
  bool bounded_above() const { return upper.is_finite(); }
  bool bounded_below() const { return lower.is_finite(); }
  bool contains_zero_neighbourhood() const { return interior(0.0); }

  /// Scales the interval by s > 0.
  DomainInterval scaled(double s) const;
  DomainInterval intersect(const DomainInterval& other) const;

  std::string to_string() const;
  friend bool operator==(const DomainInterval&, const DomainInterval&) = default;
};

}  // namespace ldp
