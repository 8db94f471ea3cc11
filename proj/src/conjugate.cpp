#include "ldpkit/conjugate.hpp"

#include <cmath>
#include <string>

#include "ldpkit/errors.hpp"

namespace ldp {

namespace {

constexpr double kSlopeInfinity = 1e12;
constexpr double kFarAway = 1e15;

double default_tol(int dim, double tol) {
  if (tol > 0) return tol;
  return dim == 1 ? 1e-10 : 1e-8;
}

double slope1(const ConvexOracle& g, double u) { return g.grad(scalar_vec(u))[0]; }
ExtReal eval1(const ConvexOracle& g, double u) { return g.eval(scalar_vec(u)); }

/// A point well inside a one-dimensional domain.
double reference_point(const DomainInterval& dom) {
  if (dom.interior(0.0)) return 0.0;
  if (dom.lower.is_finite() && dom.upper.is_finite()) return 0.5 * (dom.lower.value() + dom.upper.value());
  if (dom.lower.is_finite()) return dom.lower.value() + 1.0;
  return dom.upper.value() - 1.0;
}

/// g(-u), so every search can run towards the upper end.
ConvexOracle reflect(const ConvexOracle& g) {
  ConvexOracle r;
  r.dimension = 1;
  r.strict = g.strict;
  r.domain = {-g.domain.upper, -g.domain.lower, g.domain.upper_closed, g.domain.lower_closed};
  r.eval = [&g](const Vec& u) { return g.eval(-u); };
  r.grad = [&g](const Vec& u) { return Vec(-g.grad(-u)); };
  if (g.hessian) r.hessian = [&g](const Vec& u) { return g.hessian(-u); };
  return r;
}

/// Upper-end slope limit of a one-dimensional oracle.
ExtReal upper_slope(const ConvexOracle& g, double tol) {
  const auto& dom = g.domain;
  if (dom.upper.is_finite() && dom.upper_closed) return slope1(g, dom.upper.value());

  const double c = reference_point(dom);
  double prev = slope1(g, c);
  double prev_inc = 0.0;
  int stalled = 0;
  for (int k = 1; k <= 60; ++k) {
    double u;
    if (dom.upper.is_finite()) {
      const double b = dom.upper.value();
      u = b - (b - c) * std::ldexp(1.0, -k);
      if (!(u < b) || k > 50) break;
    } else {
      u = c + std::ldexp(std::max(1.0, std::abs(c)), k);
    }
    const double s = slope1(g, u);
    if (!std::isfinite(s) || s > kSlopeInfinity) return ExtReal::inf();
    const double inc = s - prev;
    if (k > 1 && inc <= tol * std::max(1.0, std::abs(s))) return s;
    if (k > 1 && inc > 0.75 * prev_inc) ++stalled;
    else stalled = 0;
    // Increments that no longer shrink geometrically mean divergence
    // (logarithmic growth never reaches kSlopeInfinity in range).
    if (k >= 6 && stalled >= 4) return ExtReal::inf();
    prev = s;
    prev_inc = inc;
  }
  if (dom.upper.is_finite()) return ExtReal::inf();
  return prev;
}

/// Bracketed safeguarded Newton for g'(u) = x with g'(lo) < x <= g'(hi).
double solve_slope(const ConvexOracle& g, double x, double lo, double hi, double tol, int max_iter) {
  double u = 0.5 * (lo + hi);
  double prev_u = lo;
  double prev_r = slope1(g, lo) - x;
  for (int iter = 0; iter < max_iter; ++iter) {
    const double r = slope1(g, u) - x;
    if (std::abs(r) <= tol) return u;
    if (r < 0) lo = u;
    else hi = u;
    if (hi - lo <= 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(u))) return u;
    double next = std::numeric_limits<double>::quiet_NaN();
    if (g.hessian) {
      const double h = g.hessian(scalar_vec(u))(0, 0);
      if (std::isfinite(h) && h > 0) next = u - r / h;
    } else if (r != prev_r) {
      next = u - r * (u - prev_u) / (r - prev_r);
    }
    prev_u = u;
    prev_r = r;
    // Newton must land strictly inside the bracket and shrink it reasonably.
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    u = next;
  }
  throw ConvergenceError("legendre: slope equation did not converge in " + std::to_string(max_iter) +
                         " iterations");
}

ConjugateResult legendre_up(const ConvexOracle& g, double x, double tol, int max_iter) {
  const auto& dom = g.domain;
  const double c = reference_point(dom);
  auto objective = [&](double u) { return x * u - eval1(g, u); };

  if (std::abs(slope1(g, c) - x) <= tol) return {objective(c), scalar_vec(c), false};

  double lo = c;
  double hi;
  if (dom.upper.is_finite()) {
    const double b = dom.upper.value();
    const ExtReal sb = upper_slope(g, 1e-12);
    if (sb <= ExtReal(x)) {
      if (dom.upper_closed) return {objective(b), scalar_vec(b), true};
      // Open end with a finite slope limit: the supremum is a limit.
      ExtReal val = objective(c);
      for (int k = 1; k <= 50; ++k) {
        const double u = b - (b - c) * std::ldexp(1.0, -k);
        const ExtReal v = objective(u);
        if (abs_diff(v, val) <= ExtReal(tol)) return {v, std::nullopt, true};
        val = v;
      }
      return {val, std::nullopt, true};
    }
    if (dom.upper_closed && slope1(g, b) >= x) {
      hi = b;
    } else {
      hi = b;
      for (int k = 1; k <= 1100; ++k) {
        const double u = b - (b - c) * std::ldexp(1.0, -k);
        if (!(u < b)) break;
        if (slope1(g, u) >= x) {
          hi = u;
          break;
        }
        lo = u;
      }
    }
  } else {
    double prev_val = objective(c).value();
    double prev_inc = 0.0;
    int stalled = 0;
    bool found = false;
    hi = c;
    for (int k = 0; k <= 60; ++k) {
      const double u = c + std::ldexp(std::max(1.0, std::abs(c)), k);
      const double gap = x - slope1(g, u);
      if (gap <= 0) {
        hi = u;
        found = true;
        break;
      }
      const ExtReal val = objective(u);
      if (!val.is_finite()) return {ExtReal::inf(), std::nullopt, true};
      // Not attained: the objective is still rising with vanishing slope.
      if (gap <= tol && std::abs(val.value() - prev_val) <= tol) return {val, std::nullopt, true};
      // Gains per doubling that stop shrinking geometrically mean the limit
      // is infinite (e.g. logarithmic growth).
      const double inc = val.value() - prev_val;
      if (k > 0 && inc > 0.75 * prev_inc) ++stalled;
      else stalled = 0;
      prev_inc = inc;
      if (u > kFarAway) {
        if (gap > tol || stalled >= 4) return {ExtReal::inf(), std::nullopt, true};
        return {val, std::nullopt, true};
      }
      lo = u;
      prev_val = val.value();
    }
    if (!found) return {ExtReal::inf(), std::nullopt, true};
  }
  const double u = solve_slope(g, x, lo, hi, tol, max_iter);
  const bool at_bd = dom.upper_closed && dom.upper.is_finite() && u == dom.upper.value();
  return {objective(u), scalar_vec(u), at_bd};
}

ConjugateResult legendre_1d(const ConvexOracle& g, double x, double tol, int max_iter) {
  const double c = reference_point(g.domain);
  if (slope1(g, c) <= x) return legendre_up(g, x, tol, max_iter);
  const ConvexOracle r = reflect(g);
  auto res = legendre_up(r, -x, tol, max_iter);
  if (res.argmax) *res.argmax = -*res.argmax;
  return res;
}

/// Damped Newton ascent of x . u - g(u) over R^d with minimal-norm steps.
ConjugateResult legendre_nd(const ConvexOracle& g, const Vec& x, double tol, int max_iter) {
  const auto d = x.size();
  auto objective = [&](const Vec& u) { return ExtReal(x.dot(u)) - g.eval(u); };
  Vec u = Vec::Zero(d);
  ExtReal val = objective(u);
  for (int iter = 0; iter < max_iter; ++iter) {
    const Vec r = x - g.grad(u);
    if (r.norm() <= tol) return {val, u, false};
    Vec p;
    if (g.hessian) {
      const Mat h = g.hessian(u);
      Eigen::CompleteOrthogonalDecomposition<Mat> cod(h);
      cod.setThreshold(1e-12);
      p = cod.solve(r);
      const Vec off = r - h * p;
      if (off.norm() > 1e-9 * std::max(1.0, r.norm())) {
        // The gradient misses the range of the Hessian: check that the
        // objective grows linearly along that direction.
        const Vec n = off / off.norm();
        const ExtReal base = objective(u);
        bool grows = true;
        for (int k = 10; k <= 40 && grows; k += 10) {
          const double s = std::ldexp(1.0, k);
          const ExtReal v = objective(u + s * n);
          grows = v.is_pos_inf() || (v.is_finite() && v.value() - base.value() >= 0.5 * s * r.dot(n));
        }
        if (grows) return {ExtReal::inf(), std::nullopt, true};
      }
    } else {
      p = r;
    }
    double alpha = 1.0;
    const double slope = r.dot(p);
    ExtReal cand = objective(u + p);
    while (!(cand.is_finite() && cand.value() >= val.value() + 1e-4 * alpha * slope) && alpha > 1e-20) {
      if (cand.is_pos_inf()) return {ExtReal::inf(), std::nullopt, true};
      alpha *= 0.5;
      cand = objective(u + alpha * p);
    }
    if (alpha <= 1e-20) {
      // No ascent possible at double precision; accept if close.
      if (r.norm() <= std::sqrt(tol)) return {val, u, false};
      throw ConvergenceError("legendre: line search failed");
    }
    u += alpha * p;
    val = cand;
    if (u.norm() > kFarAway) return {ExtReal::inf(), std::nullopt, true};
  }
  throw ConvergenceError("legendre: Newton did not converge in " + std::to_string(max_iter) + " iterations");
}

}  // namespace

ConjugateResult legendre(const ConvexOracle& g, const Vec& x, ConjugateOptions opt) {
  if (x.size() != g.dimension) throw ConfigError("legendre: dimension mismatch");
  const double tol = default_tol(g.dimension, opt.tol);
  if (g.dimension == 1) return legendre_1d(g, x[0], tol, opt.max_iter);
  return legendre_nd(g, x, tol, opt.max_iter);
}

ConjugateResult legendre(const ConvexOracle& g, double x, ConjugateOptions opt) {
  return legendre(g, scalar_vec(x), opt);
}

ExtReal endpoint_slope(const ConvexOracle& g, bool upper, double tol) {
  if (g.dimension != 1) throw UnsupportedError("endpoint_slope: one-dimensional oracles only");
  if (upper) return upper_slope(g, tol);
  return -upper_slope(reflect(g), tol);
}

GradInverse grad_inverse(const ConvexOracle& g, const Vec& x, ConjugateOptions opt) {
  if (!g.strict) throw UnsupportedError("grad_inverse: oracle is not strictly convex");
  if (x.size() != g.dimension) throw ConfigError("grad_inverse: dimension mismatch");
  const double tol = default_tol(g.dimension, opt.tol);
  GradInverse out;
  if (g.dimension == 1) {
    const double xv = x[0];
    if (ExtReal(xv) >= endpoint_slope(g, true)) {
      out.status = GradInverse::Status::above_range;
      return out;
    }
    if (ExtReal(xv) <= endpoint_slope(g, false)) {
      out.status = GradInverse::Status::below_range;
      return out;
    }
    const auto res = legendre_1d(g, xv, tol, opt.max_iter);
    if (!res.argmax || !g.domain.interior((*res.argmax)[0])) {
      out.status = GradInverse::Status::no_convergence;
      return out;
    }
    out.lambda = res.argmax;
    return out;
  }
  try {
    const auto res = legendre_nd(g, x, tol, opt.max_iter);
    if (res.argmax && (g.grad(*res.argmax) - x).norm() <= 10 * tol) {
      out.lambda = res.argmax;
      return out;
    }
  } catch (const ConvergenceError&) {
  }
  out.status = GradInverse::Status::no_convergence;
  return out;
}

ConvexOracle cgf_oracle(const CgfModel& model) {
  ConvexOracle g;
  g.dimension = model.dimension();
  g.domain = model.domain();
  g.eval = [&model](const Vec& u) { return model.cumulant(u); };
  g.grad = [&model](const Vec& u) { return model.gradient(u); };
  g.hessian = [&model](const Vec& u) { return model.hessian(u); };
  if (const auto* gauss = dynamic_cast<const GaussianModel*>(&model))
    g.strict = gauss->support_rank() == gauss->dimension();
  return g;
}

ExtReal rate_value(const CgfModel& model, const Vec& v) {
  if (auto closed = model.closed_rate(v)) return *closed;
  return legendre(cgf_oracle(model), v).value;
}

}  // namespace ldp
