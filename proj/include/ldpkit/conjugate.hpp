#pragma once

#include <functional>
#include <optional>

#include "ldpkit/cgf.hpp"
#include "ldpkit/domain.hpp"
#include "ldpkit/ext_real.hpp"
#include "ldpkit/linalg.hpp"

namespace ldp {

/// A closed convex function given by evaluation callbacks. In one dimension
/// the effective domain is `domain`; for dimension > 1 it is all of R^d.
///
/// `grad` must be valid on the interior, and at a closed finite endpoint it
/// returns the one-sided derivative. `hessian` is optional.
struct ConvexOracle {
  int dimension = 1;
  DomainInterval domain = DomainInterval::real_line();
  std::function<ExtReal(const Vec&)> eval;
  std::function<Vec(const Vec&)> grad;
  std::function<Mat(const Vec&)> hessian;
  /// Strictly convex on the interior.
  bool strict = true;
};

struct ConjugateResult {
  ExtReal value = 0.0;
  /// Maximiser of x . u - g(u); empty when the supremum is not attained.
  std::optional<Vec> argmax;
  bool at_boundary = false;
};

struct ConjugateOptions {
  /// Default 1e-10 in one dimension, 1e-8 above.
  double tol = 0.0;
  int max_iter = 200;
};

/// sup_u (x . u - g(u)). One dimension: safeguarded Newton on g'(u) = x with
/// bisection fallback, and boundary evaluation when the derivative equation
/// has no interior root. Dimension > 1: damped Newton on the concave
/// objective. Returns +inf when the objective grows without bound.
ConjugateResult legendre(const ConvexOracle& g, const Vec& x, ConjugateOptions opt = {});
ConjugateResult legendre(const ConvexOracle& g, double x, ConjugateOptions opt = {});

struct GradInverse {
  enum class Status { ok, below_range, above_range, no_convergence };
  Status status = Status::ok;
  std::optional<Vec> lambda;
};

/// Solves grad g(lambda) = x inside the interior of the domain. In one
/// dimension a target outside grad(int dom) is reported by the side it falls
/// on. Non-strict oracles are rejected.
GradInverse grad_inverse(const ConvexOracle& g, const Vec& x, ConjugateOptions opt = {});

/// One-sided limit of g' at an end of a one-dimensional domain. A closed
/// finite end is evaluated directly; otherwise the derivative is probed along
/// b - w 2^{-k} (or b + w 2^{-k}), and declared infinite when it exceeds 1e12
/// or its increments stop shrinking geometrically.
ExtReal endpoint_slope(const ConvexOracle& g, bool upper, double tol = 1e-12);

/// The oracle of K itself.
ConvexOracle cgf_oracle(const CgfModel& model);

/// I(v): the closed form when the model has one, the numerical conjugate
/// otherwise.
ExtReal rate_value(const CgfModel& model, const Vec& v);

}  // namespace ldp
