#include "ldpkit/kernel_rate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ldpkit/errors.hpp"
#include "ldpkit/quadrature.hpp"

namespace ldp {

std::string to_string(Branch b) {
  switch (b) {
    case Branch::interior: return "interior";
    case Branch::singular_plus: return "singular_plus";
    case Branch::singular_minus: return "singular_minus";
    case Branch::infinite: return "infinite";
  }
  return "unknown";
}

namespace {

constexpr double kTouch = 1e-14;

bool near(double u, double b) { return std::abs(u - b) <= kTouch * std::max(1.0, std::abs(b)); }

bool touches(const DomainInterval& dom, double u) {
  return (dom.upper.is_finite() && near(u, dom.upper.value())) ||
         (dom.lower.is_finite() && near(u, dom.lower.value()));
}

bool touches_open(const DomainInterval& dom, double u) {
  return (dom.upper.is_finite() && !dom.upper_closed && near(u, dom.upper.value())) ||
         (dom.lower.is_finite() && !dom.lower_closed && near(u, dom.lower.value()));
}

/// Pulls a rounding-level overshoot back into the closure (closed end) or the
/// interior (open end) of the domain.
double clamp_in(const DomainInterval& dom, double u) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  if (dom.upper.is_finite()) {
    const double b = dom.upper.value();
    if (u > b || (u == b && !dom.upper_closed)) u = dom.upper_closed ? b : std::nextafter(b, -kInf);
  }
  if (dom.lower.is_finite()) {
    const double a = dom.lower.value();
    if (u < a || (u == a && !dom.lower_closed)) u = dom.lower_closed ? a : std::nextafter(a, kInf);
  }
  return u;
}

void check_dims(const CgfModel& model, const Vec& v, const char* what) {
  if (v.size() != model.dimension())
    throw ConfigError(std::string(what) + ": expected dimension " + std::to_string(model.dimension()) + ", got " +
                      std::to_string(v.size()));
}

/// int_0^1 fn(lambda f(t), f(t)) dt, piece by piece over the kernel. Empty
/// when lambda f leaves the closure of D_L on a set of positive measure.
template <class R, class Fn>
std::optional<R> kernel_integral(const CgfModel& model, const Kernel& kernel, const Vec& lambda, R acc, Fn fn) {
  const auto& t = kernel.breakpoints();
  const auto& v = kernel.values();
  if (model.full_space()) {
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
      const double t0 = t[i], t1 = t[i + 1], v0 = v[i], dv = v[i + 1] - v[i];
      acc += integrate(
          [&](double s) {
            const double ft = v0 + (s - t0) / (t1 - t0) * dv;
            return R(fn(Vec(lambda * ft), ft));
          },
          t0, t1);
    }
    return acc;
  }
  const DomainInterval dom = model.domain();
  const double l = lambda[0];
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const double t0 = t[i], t1 = t[i + 1], v0 = v[i], dv = v[i + 1] - v[i];
    const double ua = l * v0, ub = l * v[i + 1];
    const bool ta = touches(dom, ua), tb = touches(dom, ub);
    if (!(dom.contains(ua) || ta) || !(dom.contains(ub) || tb)) return std::nullopt;
    // A constant piece resting on an open end leaves D_L on the whole piece.
    if (ua == ub && touches_open(dom, ua)) return std::nullopt;
    acc += integrate_graded(
        [&](double s) {
          const double ft = v0 + (s - t0) / (t1 - t0) * dv;
          return R(fn(scalar_vec(clamp_in(dom, l * ft)), ft));
        },
        t0, t1, ta && ua != ub, tb && ua != ub);
  }
  return acc;
}

/// Integrals of f_+ and f_- and the measures of {f > 0}, {f < 0}, {f = 0}.
struct SignParts {
  double pos_int = 0.0, neg_int = 0.0;
  double pos_len = 0.0, neg_len = 0.0, zero_len = 0.0;
};

SignParts sign_parts(const Kernel& kernel) {
  SignParts s;
  const auto& t = kernel.breakpoints();
  const auto& v = kernel.values();
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const double a = v[i], b = v[i + 1], len = t[i + 1] - t[i];
    if (a == 0.0 && b == 0.0) {
      s.zero_len += len;
    } else if (a >= 0.0 && b >= 0.0) {
      s.pos_int += 0.5 * (a + b) * len;
      s.pos_len += len;
    } else if (a <= 0.0 && b <= 0.0) {
      s.neg_int -= 0.5 * (a + b) * len;
      s.neg_len += len;
    } else {
      const double cut = len * std::abs(a) / (std::abs(a) + std::abs(b));
      const double la = cut, lb = len - cut;
      if (a > 0) {
        s.pos_int += 0.5 * a * la;
        s.pos_len += la;
        s.neg_int += 0.5 * -b * lb;
        s.neg_len += lb;
      } else {
        s.neg_int += 0.5 * -a * la;
        s.neg_len += la;
        s.pos_int += 0.5 * b * lb;
        s.pos_len += lb;
      }
    }
  }
  return s;
}

/// lim E_f'(lambda) as lambda -> +inf (sign > 0) or -inf, when D_f is
/// unbounded on that side.
ExtReal limit_slope(const CgfModel& model, const Kernel& kernel, double sign) {
  const auto s = sign_parts(kernel);
  const ExtReal up = model.boundary_slope(true);
  const ExtReal low = model.boundary_slope(false);
  if (sign > 0) return s.pos_int * up - s.neg_int * low;
  return s.pos_int * low - s.neg_int * up;
}

/// int I(lim K'(lambda f(t))) dt as lambda -> +-inf.
ExtReal limit_rate_integral(const CgfModel& model, const Kernel& kernel, double sign) {
  const auto s = sign_parts(kernel);
  const ExtReal up = model.boundary_slope(sign > 0);
  const ExtReal low = model.boundary_slope(sign < 0);
  ExtReal total = 0.0;
  auto add = [&](double len, ExtReal slope) {
    if (len <= 0.0) return;
    if (!slope.is_finite()) {
      total = ExtReal::inf();
      return;
    }
    total = total + len * rate_value(model, scalar_vec(slope.value()));
  };
  add(s.pos_len, up);
  add(s.neg_len, low);
  add(s.zero_len, model.mean()[0]);
  return total;
}

/// int I(grad K(lambda f(t))) dt.
ExtReal rate_integral(const CgfModel& model, const Kernel& kernel, const Vec& lambda) {
  const auto r = kernel_integral<double>(model, kernel, lambda, 0.0, [&](const Vec& u, double) {
    return rate_value(model, model.gradient(u)).to_double();
  });
  if (!r || !std::isfinite(*r)) return ExtReal::inf();
  return std::max(0.0, *r);
}

void fill_structure(const CgfModel& model, const Kernel& kernel, KernelRateResult& r) {
  if (model.dimension() != 1) return;
  const auto [mp, mm] = m_plus_minus(model, kernel);
  r.m_plus = mp;
  r.m_minus = mm;
  r.sup_ef_prime = sup_ef_prime(model, kernel);
  r.inf_ef_prime = inf_ef_prime(model, kernel);
}

}  // namespace

// ---------------------------------------------------------------------------
// E_f and its derivatives

ExtReal e_f(const CgfModel& model, const Kernel& kernel, const Vec& lambda) {
  check_dims(model, lambda, "e_f");
  const auto r = kernel_integral<double>(model, kernel, lambda, 0.0, [&](const Vec& u, double) {
    return model.cumulant(u).to_double();
  });
  if (!r || !std::isfinite(*r)) return ExtReal::inf();
  return *r;
}

Vec e_f_grad(const CgfModel& model, const Kernel& kernel, const Vec& lambda) {
  check_dims(model, lambda, "e_f_grad");
  const auto r = kernel_integral<Vec>(model, kernel, lambda, Vec::Zero(model.dimension()),
                                      [&](const Vec& u, double ft) { return Vec(ft * model.gradient(u)); });
  if (!r) throw DomainError("e_f_grad: lambda lies outside the closure of D_f");
  Vec g = *r;
  for (Eigen::Index i = 0; i < g.size(); ++i)
    if (!std::isfinite(g[i])) g[i] = std::numeric_limits<double>::infinity();
  return g;
}

Mat e_f_hessian(const CgfModel& model, const Kernel& kernel, const Vec& lambda) {
  check_dims(model, lambda, "e_f_hessian");
  const int d = model.dimension();
  const auto r = kernel_integral<Mat>(model, kernel, lambda, Mat::Zero(d, d),
                                      [&](const Vec& u, double ft) { return Mat(ft * ft * model.hessian(u)); });
  if (!r) throw DomainError("e_f_hessian: lambda lies outside the closure of D_f");
  return *r;
}

std::pair<ExtReal, ExtReal> m_plus_minus(const CgfModel& model, const Kernel& kernel) {
  if (model.dimension() != 1) throw UnsupportedError("m_plus_minus: defined for d = 1 only");
  const ExtReal ip = model.recession(scalar_vec(1.0));
  const ExtReal im = model.recession(scalar_vec(-1.0));
  const ExtReal mp = min(div_nonneg(ip, kernel.max_plus()), div_nonneg(im, kernel.max_minus()));
  const ExtReal mm = min(div_nonneg(ip, kernel.max_minus()), div_nonneg(im, kernel.max_plus()));
  return {mp, mm};
}

DomainInterval d_f(const CgfModel& model, const Kernel& kernel) {
  if (model.dimension() != 1) {
    if (model.full_space()) return DomainInterval::real_line();
    throw UnsupportedError("d_f: bounded effective domains are supported for d = 1 only");
  }
  const DomainInterval dom = model.domain();
  const ExtReal ip = model.recession(scalar_vec(1.0));
  const ExtReal im = model.recession(scalar_vec(-1.0));
  const auto [mp, mm] = m_plus_minus(model, kernel);

  // Each end of D_f is the smaller of two candidate bounds; the binding ones
  // decide whether it is closed.
  auto closed_end = [&](ExtReal m, ExtReal via_upper, ExtReal via_lower) {
    if (!m.is_finite()) return false;
    bool closed = true;
    if (via_upper == m) closed = closed && dom.upper_closed;
    if (via_lower == m) closed = closed && dom.lower_closed;
    return closed;
  };
  const bool upper_closed =
      closed_end(mp, div_nonneg(ip, kernel.max_plus()), div_nonneg(im, kernel.max_minus()));
  const bool lower_closed =
      closed_end(mm, div_nonneg(ip, kernel.max_minus()), div_nonneg(im, kernel.max_plus()));
  return DomainInterval::make(-mm, mp, lower_closed, upper_closed);
}

ConvexOracle ef_oracle(const CgfModel& model, const Kernel& kernel) {
  ConvexOracle g;
  g.dimension = model.dimension();
  g.domain = model.dimension() == 1 ? d_f(model, kernel) : DomainInterval::real_line();
  g.eval = [&model, &kernel](const Vec& l) { return e_f(model, kernel, l); };
  g.grad = [&model, &kernel](const Vec& l) { return e_f_grad(model, kernel, l); };
  g.hessian = [&model, &kernel](const Vec& l) { return e_f_hessian(model, kernel, l); };
  g.strict = cgf_oracle(model).strict;
  return g;
}

ExtReal sup_ef_prime(const CgfModel& model, const Kernel& kernel) {
  const auto [mp, mm] = m_plus_minus(model, kernel);
  if (mp.is_finite()) return endpoint_slope(ef_oracle(model, kernel), true);
  return limit_slope(model, kernel, 1.0);
}

ExtReal inf_ef_prime(const CgfModel& model, const Kernel& kernel) {
  const auto [mp, mm] = m_plus_minus(model, kernel);
  if (mm.is_finite()) return endpoint_slope(ef_oracle(model, kernel), false);
  return limit_slope(model, kernel, -1.0);
}

// ---------------------------------------------------------------------------
// I_f

KernelRateResult i_f_conjugate(const CgfModel& model, const Kernel& kernel, const Vec& x, double tol) {
  check_dims(model, x, "i_f_conjugate");
  KernelRateResult r;
  r.x = x;
  fill_structure(model, kernel, r);
  const Vec center = kernel.m1() * model.mean();
  if (x == center) {
    r.lambda_star = Vec::Zero(x.size());
    return r;
  }
  const ConvexOracle g = ef_oracle(model, kernel);
  const auto res = legendre(g, x, {tol});
  if (res.value.is_pos_inf()) {
    r.value = ExtReal::inf();
    r.branch = Branch::infinite;
    return r;
  }
  r.value = max(ExtReal(0.0), res.value);
  r.lambda_star = res.argmax;
  if (model.dimension() > 1 || (res.argmax && g.domain.interior((*res.argmax)[0]))) {
    r.branch = Branch::interior;
  } else {
    const bool upper = res.argmax ? (*res.argmax)[0] > 0.0 : x[0] > center[0];
    r.branch = upper ? Branch::singular_plus : Branch::singular_minus;
  }
  return r;
}

KernelRateResult i_f_explicit(const CgfModel& model, const Kernel& kernel, const Vec& x, double tol) {
  check_dims(model, x, "i_f_explicit");
  KernelRateResult r;
  r.x = x;
  fill_structure(model, kernel, r);
  const Vec center = kernel.m1() * model.mean();
  if (x == center) {
    r.lambda_star = Vec::Zero(x.size());
    return r;
  }
  const ConvexOracle g = ef_oracle(model, kernel);

  if (model.dimension() > 1) {
    std::optional<Vec> lam;
    if (g.strict) {
      const auto gi = grad_inverse(g, x, {tol});
      if (gi.status == GradInverse::Status::ok) lam = gi.lambda;
    } else {
      // Degenerate support: any preimage works; Newton from 0 with
      // minimal-norm steps picks the minimal-norm one.
      const auto res = legendre(g, x, {tol});
      if (res.value.is_finite() && res.argmax) lam = res.argmax;
    }
    if (!lam) throw UnsupportedError("i_f_explicit: x is outside grad E_f(int D_f); no explicit formula for d > 1");
    r.lambda_star = lam;
    r.value = rate_integral(model, kernel, *lam);
    return r;
  }

  const double xv = x[0];
  auto singular = [&](bool upper) {
    const ExtReal m = upper ? *r.m_plus : *r.m_minus;
    const ExtReal s = upper ? *r.sup_ef_prime : *r.inf_ef_prime;
    r.branch = upper ? Branch::singular_plus : Branch::singular_minus;
    if (!m.is_finite()) {
      if (s == ExtReal(xv)) {
        r.value = limit_rate_integral(model, kernel, upper ? 1.0 : -1.0);
        if (r.value.is_pos_inf()) r.branch = Branch::infinite;
      } else {
        r.value = ExtReal::inf();
        r.branch = Branch::infinite;
      }
      return r;
    }
    const double lam = upper ? m.value() : -m.value();
    const double excess = upper ? xv - s.value() : s.value() - xv;
    r.lambda_star = scalar_vec(lam);
    r.value = m * std::max(0.0, excess) + rate_integral(model, kernel, scalar_vec(lam));
    return r;
  };

  // Within rounding of sup/inf E_f' the inversion is ill-conditioned (E_f'
  // can have infinite slope there), while the boundary formula is exact.
  const double near = 1e-12 * std::max(1.0, std::abs(xv));
  if (ExtReal(xv + near) >= *r.sup_ef_prime && r.m_plus->is_finite()) return singular(true);
  if (ExtReal(xv - near) <= *r.inf_ef_prime && r.m_minus->is_finite()) return singular(false);
  if (ExtReal(xv) >= *r.sup_ef_prime) return singular(true);
  if (ExtReal(xv) <= *r.inf_ef_prime) return singular(false);
  const auto gi = grad_inverse(g, x, {tol});
  switch (gi.status) {
    case GradInverse::Status::ok: break;
    case GradInverse::Status::above_range: return singular(true);
    case GradInverse::Status::below_range: return singular(false);
    case GradInverse::Status::no_convergence:
      throw ConvergenceError("i_f_explicit: could not invert E_f' at x = " + std::to_string(xv));
  }
  r.lambda_star = gi.lambda;
  r.value = rate_integral(model, kernel, *gi.lambda);
  return r;
}

// ---------------------------------------------------------------------------
// Minimiser

CadlagPath minimizer(const CgfModel& model, const Kernel& kernel, const Vec& x, double tol, int cells) {
  if (cells < 1) throw ConfigError("minimizer: cells must be positive");
  const KernelRateResult res = i_f_explicit(model, kernel, x, tol);
  if (res.branch == Branch::infinite || res.value.is_pos_inf())
    throw DomainError("minimizer: I_f(x) is infinite, no path satisfies the constraint at finite cost");
  const int d = model.dimension();
  const bool singular = res.branch == Branch::singular_plus || res.branch == Branch::singular_minus;

  std::vector<double> grid;
  for (int i = 0; i <= cells; ++i) grid.push_back(static_cast<double>(i) / cells);
  grid.insert(grid.end(), kernel.breakpoints().begin(), kernel.breakpoints().end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  const DomainInterval dom = model.domain();
  auto slope = [&](double t) -> Vec {
    const double ft = kernel(t);
    if (res.lambda_star) {
      Vec u = *res.lambda_star * ft;
      if (d == 1) u[0] = clamp_in(dom, u[0]);
      return model.gradient(u);
    }
    // Unbounded D_f with x at the end of the range: the limit slopes.
    const bool upper = res.branch == Branch::singular_plus;
    if (ft == 0.0) return model.mean();
    return scalar_vec(model.boundary_slope((ft > 0) == upper).value());
  };

  std::vector<Vec> slopes;
  std::vector<double> weights;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double a = grid[i], b = grid[i + 1];
    slopes.push_back(Vec(integrate(slope, a, b) / (b - a)));
    weights.push_back(kernel.integral(a, b));
  }
  Vec paired = Vec::Zero(d);
  for (std::size_t i = 0; i < slopes.size(); ++i) paired += weights[i] * slopes[i];

  std::vector<Jump> jumps;
  if (singular && res.lambda_star) {
    const bool up = res.branch == Branch::singular_plus;
    const ExtReal ip = model.recession(scalar_vec(1.0));
    const ExtReal im = model.recession(scalar_vec(-1.0));
    // Raising the pairing: a positive jump where f_+ peaks, or a negative one
    // where f_- peaks, whichever attains M_+ (M_- mirrors this).
    const ExtReal m = up ? *res.m_plus : *res.m_minus;
    const bool at_plus_peak = up ? div_nonneg(ip, kernel.max_plus()) == m : div_nonneg(im, kernel.max_plus()) == m;
    const auto peaks = at_plus_peak ? kernel.argmax_plus() : kernel.argmax_minus();
    if (peaks.empty()) throw DomainError("minimizer: kernel has no maximiser on the binding side");
    for (const auto& p : peaks)
      if (!p.is_point())
        throw UnsupportedError("minimizer: the maximiser set of f has positive measure; the minimiser is not unique");
    const double tau = peaks.front().lo;
    const Vec size = (x - paired) / kernel(tau);
    jumps.push_back({tau, size});
  } else if (res.lambda_star) {
    // Cell averaging shifts the pairing by O(h^2); a correction along f
    // restores it exactly.
    double norm = 0.0;
    for (std::size_t i = 0; i < slopes.size(); ++i) norm += weights[i] * weights[i] / (grid[i + 1] - grid[i]);
    const Vec c = (x - paired) / norm;
    for (std::size_t i = 0; i < slopes.size(); ++i) slopes[i] += (weights[i] / (grid[i + 1] - grid[i])) * c;
  }
  return CadlagPath(d, std::move(grid), std::move(slopes), std::move(jumps));
}

// ---------------------------------------------------------------------------
// Variational oracle

namespace {

struct CellProblem {
  const CgfModel& model;
  std::vector<double> w;  // int of f over each cell
  double delta;           // cell width
  double tol;
};

ExtReal cell_objective(const CellProblem& p, const std::vector<Vec>& v) {
  ExtReal total = 0.0;
  for (const auto& vi : v) total = total + p.delta * rate_value(p.model, vi);
  return total;
}

/// min sum_i delta I(v_i) subject to sum_i w_i v_i = y, by infeasible-start
/// Newton: steps are KKT steps, first shortened to stay inside the rate
/// domain until the constraint holds, then globalised by backtracking.
ExtReal cell_minimum(const CellProblem& p, const Vec& y) {
  const CgfModel& model = p.model;
  const int d = model.dimension();
  const std::size_t m = p.w.size();
  DomainInterval rd = model.rate_domain();

  if (d == 1) {
    // Past the slope at a closed end of D_L the rate is affine, so mass there
    // is a jump in disguise; the outer search prices jumps separately.
    const auto dl = model.domain();
    if (dl.upper.is_finite() && dl.upper_closed) {
      const ExtReal s = model.boundary_slope(true);
      if (s < rd.upper) rd.upper = s, rd.upper_closed = true;
    }
    if (dl.lower.is_finite() && dl.lower_closed) {
      const ExtReal s = model.boundary_slope(false);
      if (s > rd.lower) rd.lower = s, rd.lower_closed = true;
    }
    ExtReal lo = 0.0, hi = 0.0;
    for (double wi : p.w) {
      lo = lo + (wi > 0 ? wi * rd.lower : wi * rd.upper);
      hi = hi + (wi > 0 ? wi * rd.upper : wi * rd.lower);
    }
    const double yv = y[0];
    auto at_end = [&](bool upper) -> ExtReal {
      ExtReal total = 0.0;
      for (double wi : p.w) {
        if (wi == 0.0) continue;
        const bool use_upper = (wi > 0) == upper;
        const ExtReal end = use_upper ? rd.upper : rd.lower;
        const bool closed = use_upper ? rd.upper_closed : rd.lower_closed;
        if (!end.is_finite() || !closed) return ExtReal::inf();
        total = total + p.delta * rate_value(model, scalar_vec(end.value()));
      }
      return total;
    };
    if (ExtReal(yv) > hi || ExtReal(yv) < lo) return ExtReal::inf();
    if (hi.is_finite() && near(yv, hi.value())) return at_end(true);
    if (lo.is_finite() && near(yv, lo.value())) return at_end(false);
  }

  // In d = 1 a cell that reaches an end where I' is finite is pinned there
  // and leaves the KKT system until the multiplier pushes it back inside.
  // Such ends come from closed ends of D_L, where I' equals that end.
  auto pinnable = [&](bool upper) {
    if (d != 1) return false;
    const auto dl = model.domain();
    return upper ? dl.upper.is_finite() && dl.upper_closed : dl.lower.is_finite() && dl.lower_closed;
  };
  const bool pin_hi = pinnable(true);
  const bool pin_lo = pinnable(false);

  std::vector<Vec> v(m, model.mean());
  std::vector<int> pinned(m, 0);  // +1 at the upper end, -1 at the lower end
  std::vector<Vec> g(m);
  std::vector<Mat> hinv(m);
  Vec nu = Vec::Zero(d);
  bool feasible = false;
  const double scale = std::max(1.0, y.norm());
  for (int iter = 0; iter < 2000; ++iter) {
    Vec r = y;
    for (std::size_t i = 0; i < m; ++i) r -= p.w[i] * v[i];
    feasible = feasible || r.norm() <= 1e-13 * scale;
    bool released = false;
    for (std::size_t i = 0; i < m; ++i) {
      g[i] = p.delta * model.rate_gradient(v[i]);
      if (pinned[i] == 0) continue;
      const double pull = g[i][0] + p.w[i] * nu[0];  // derivative of the Lagrangian
      if ((pinned[i] > 0 && pull > 0) || (pinned[i] < 0 && pull < 0)) pinned[i] = 0, released = true;
    }
    Mat s = Mat::Zero(d, d);
    Vec q = Vec::Zero(d);
    std::size_t free_cells = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (pinned[i] != 0) continue;
      ++free_cells;
      Mat h = p.delta * model.rate_hessian(v[i]);
      h += 1e-12 * p.delta * Mat::Identity(d, d);  // floor for affine stretches of I
      hinv[i] = h.inverse();
      s += p.w[i] * p.w[i] * hinv[i];
      q += p.w[i] * hinv[i] * g[i];
    }
    if (free_cells == 0) return feasible ? cell_objective(p, v) : ExtReal::inf();
    nu = -s.ldlt().solve(Vec(r + q));
    std::vector<Vec> step(m, Vec::Zero(d));
    double decrement = 0.0;
    double alpha_max = 1.0;
    std::size_t limiting = m;
    for (std::size_t i = 0; i < m; ++i) {
      if (pinned[i] != 0) continue;
      step[i] = -hinv[i] * (g[i] + p.w[i] * nu);
      decrement += step[i].dot(g[i] + p.w[i] * nu);  // p^T H p
      if (d != 1) continue;
      const double pi = step[i][0], vi = v[i][0];
      const bool up = pi > 0;
      const ExtReal end = up ? rd.upper : rd.lower;
      if (pi == 0.0 || !end.is_finite()) continue;
      const double reach = (end.value() - vi) / pi;
      const double cap = (up ? pin_hi : pin_lo) ? reach : 0.995 * reach;
      if (cap < alpha_max) alpha_max = cap, limiting = (up ? pin_hi : pin_lo) ? i : m;
    }
    decrement = std::abs(decrement);

    double alpha = std::max(0.0, alpha_max);
    std::vector<Vec> trial(m);
    if (feasible) {
      const ExtReal f0 = cell_objective(p, v);
      // The decrement bottoms out at the rounding level of the objective.
      const double floor = f0.is_finite() ? 1e-14 * (1.0 + std::abs(f0.value())) : 0.0;
      if (!released && decrement <= std::max(1e-4 * p.tol * p.tol, floor)) return f0;
      double slope = 0.0;
      for (std::size_t i = 0; i < m; ++i) slope += g[i].dot(step[i]);
      for (int bt = 0; bt < 60; ++bt) {
        for (std::size_t i = 0; i < m; ++i) trial[i] = v[i] + alpha * step[i];
        const ExtReal f1 = cell_objective(p, trial);
        if (f1.is_finite() && f1 <= f0 + ExtReal(0.25 * alpha * slope)) break;
        alpha *= 0.5;
      }
      if (alpha < 1e-15 && !released) return f0;  // no further progress in double precision
    } else {
      for (std::size_t i = 0; i < m; ++i) trial[i] = v[i] + alpha * step[i];
      if (alpha >= 1.0) feasible = true;
    }
    if (limiting < m && alpha == alpha_max) {
      const bool up = step[limiting][0] > 0;
      trial[limiting][0] = (up ? rd.upper : rd.lower).value();
      pinned[limiting] = up ? 1 : -1;
    }
    v = std::move(trial);
  }
  throw ConvergenceError("variational_rate: inner Newton did not converge");
}

}  // namespace

ExtReal variational_rate(const CgfModel& model, const Kernel& kernel, const Vec& x, int pieces, double tol) {
  check_dims(model, x, "variational_rate");
  if (pieces < 1) throw ConfigError("variational_rate: pieces must be positive");
  if (!model.closed_rate(model.mean())) throw UnsupportedError("variational_rate: needs a closed-form rate");
  CellProblem p{model, {}, 1.0 / pieces, tol};
  for (int i = 0; i < pieces; ++i)
    p.w.push_back(kernel.integral(static_cast<double>(i) / pieces, static_cast<double>(i + 1) / pieces));

  if (model.dimension() > 1) {
    if (!model.full_space()) throw UnsupportedError("variational_rate: bounded domains need d = 1");
    // I_inf is infinite off 0 when D_L = R^d, so jumps never pay off.
    return cell_minimum(p, x);
  }

  const auto [mp, mm] = m_plus_minus(model, kernel);
  const double xv = x[0];
  const double y0 = kernel.m1() * model.mean()[0];
  auto cost = [&](double y) {
    const ExtReal jumps = mp * std::max(0.0, xv - y) + mm * std::max(0.0, y - xv);
    if (jumps.is_pos_inf()) return ExtReal::inf();
    return jumps + cell_minimum(p, scalar_vec(y));
  };

  // The optimal absolutely continuous pairing lies between x and the mean
  // pairing; an infinite jump price pins it to one side of x.
  double lo = std::min(xv, y0), hi = std::max(xv, y0);
  if (mp.is_pos_inf()) lo = std::max(lo, xv);
  if (mm.is_pos_inf()) hi = std::min(hi, xv);
  if (lo >= hi) return cost(lo);

  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - ratio * (b - a), e = a + ratio * (b - a);
  ExtReal fc = cost(c), fe = cost(e);
  while (b - a > 1e-11 * std::max(1.0, std::abs(a) + std::abs(b))) {
    if (fc <= fe) {
      b = e;
      e = c;
      fe = fc;
      c = b - ratio * (b - a);
      fc = cost(c);
    } else {
      a = c;
      c = e;
      fc = fe;
      e = a + ratio * (b - a);
      fe = cost(e);
    }
  }
  return min(min(fc, fe), min(cost(lo), cost(hi)));
}

}  // namespace ldp
