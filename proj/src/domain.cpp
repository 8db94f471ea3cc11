#include "ldpkit/domain.hpp"

#include "ldpkit/errors.hpp"

namespace ldp {

DomainInterval DomainInterval::make(ExtReal lo, ExtReal hi, bool lo_closed, bool hi_closed) {
  if (!(lo < hi)) throw DomainError("DomainInterval: lower must be below upper");
  if ((lo_closed && !lo.is_finite()) || (hi_closed && !hi.is_finite()))
    throw DomainError("DomainInterval: closed endpoints must be finite");
  return {lo, hi, lo_closed, hi_closed};
}

bool DomainInterval::contains(double u) const {
  const ExtReal x(u);
  const bool above = lower_closed ? lower <= x : lower < x;
  const bool below = upper_closed ? x <= upper : x < upper;
  return above && below;
}

bool DomainInterval::interior(double u) const {
  const ExtReal x(u);
  return lower < x && x < upper;
}

DomainInterval DomainInterval::scaled(double s) const {
  if (!(s > 0)) throw DomainError("DomainInterval::scaled needs s > 0");
  return {s * lower, s * upper, lower_closed, upper_closed};
}

DomainInterval DomainInterval::intersect(const DomainInterval& other) const {
  DomainInterval out = *this;
  if (other.lower > lower || (other.lower == lower && !other.lower_closed)) {
    out.lower = other.lower;
    out.lower_closed = other.lower == lower ? (lower_closed && other.lower_closed) : other.lower_closed;
  }
  if (other.upper < upper || (other.upper == upper && !other.upper_closed)) {
    out.upper = other.upper;
    out.upper_closed = other.upper == upper ? (upper_closed && other.upper_closed) : other.upper_closed;
  }
  if (!(out.lower < out.upper)) throw DomainError("DomainInterval::intersect: empty interior");
  return out;
}

std::string DomainInterval::to_string() const {
  return std::string(lower_closed ? "[" : "(") + lower.to_string() + ", " + upper.to_string() +
         (upper_closed ? "]" : ")");
}

}  // namespace ldp
