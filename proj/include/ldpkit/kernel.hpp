#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ldp {

/// A maximiser set of a piecewise-linear function: a point when lo == hi,
/// otherwise a closed interval on which the function is constant.
struct ArgmaxSet {
  double lo = 0.0;
  double hi = 0.0;
  bool is_point() const { return lo == hi; }
};

/// Continuous piecewise-linear weight function f on [0, 1], given by its
/// values at sorted breakpoints 0 = t_0 < ... < t_m = 1. Never identically 0.
class Kernel {
 public:
  Kernel(std::vector<double> breakpoints, std::vector<double> values);

  static Kernel affine(double a, double b);  // f(t) = a + b t
  static Kernel constant(double c);

  const std::vector<double>& breakpoints() const { return t_; }
  const std::vector<double>& values() const { return v_; }
  std::size_t pieces() const { return t_.size() - 1; }

  double operator()(double t) const;
  /// Integral of f over [a, b] (exact).
  double integral(double a, double b) const;
  /// Integral of f^2 over [a, b] (exact).
  double integral_sq(double a, double b) const;

  double max_plus() const { return max_plus_; }    // max f_+
  double max_minus() const { return max_minus_; }  // max f_-
  double lipschitz() const { return lipschitz_; }
  double m1() const { return m1_; }
  double m2() const { return m2_; }

  /// Maximisers of f_+ (empty when max f_+ = 0), in increasing time order.
  std::vector<ArgmaxSet> argmax_plus() const;
  /// Maximisers of f_- (empty when max f_- = 0).
  std::vector<ArgmaxSet> argmax_minus() const;

  /// Canonical text form, parseable by parse_kernel.
  std::string spec() const;

 private:
  std::vector<ArgmaxSet> argmax_of(double sign) const;

  std::vector<double> t_;
  std::vector<double> v_;
  double max_plus_ = 0.0;
  double max_minus_ = 0.0;
  double lipschitz_ = 0.0;
  double m1_ = 0.0;
  double m2_ = 0.0;
};

/// `affine:a,b` (f = a + b t), `const:c`, `pwl:t0:v0,t1:v1,...`.
Kernel parse_kernel(std::string_view spec);

}  // namespace ldp
