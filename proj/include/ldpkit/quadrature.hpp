#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <type_traits>
#include <utility>

namespace ldp {

inline constexpr int kGaussNodes = 32;

struct GaussRule {
  std::array<double, kGaussNodes> nodes{};    // on [-1, 1]
  std::array<double, kGaussNodes> weights{};
};

/// 32-point Gauss-Legendre rule, computed once by Newton iteration on P_32.
const GaussRule& gauss_legendre_32();

struct QuadOptions {
  double abs_tol = 1e-13;
  /// Relative share; large integrands cannot meet abs_tol in double precision.
  double rel_tol = 1e-14;
  /// Dyadic refinement cap below the starting interval.
  int max_depth = 12;
};

namespace detail {

template <class F>
auto gauss_apply(F& f, double a, double b) {
  using R = std::decay_t<std::invoke_result_t<F&, double>>;
  const auto& rule = gauss_legendre_32();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  R acc = f(mid + half * rule.nodes[0]) * rule.weights[0];
  for (int i = 1; i < kGaussNodes; ++i) acc += f(mid + half * rule.nodes[i]) * rule.weights[i];
  return R(acc * half);
}

inline double magnitude(double x) { return std::abs(x); }
template <class V>
double magnitude(const V& v) {
  return v.norm();
}

template <class F, class R>
R adaptive(F& f, double a, double b, const R& whole, double tol, double rel, int depth) {
  const double mid = 0.5 * (a + b);
  const R left = gauss_apply(f, a, mid);
  const R right = gauss_apply(f, mid, b);
  const R halves = left + right;
  const double size = magnitude(halves);
  if (depth <= 0 || magnitude(R(halves - whole)) <= std::max(tol, rel * size)) return halves;
  // Non-finite refinements cannot improve; report what the rule gives.
  if (!std::isfinite(size)) return halves;
  return R(adaptive(f, a, mid, left, 0.5 * tol, rel, depth - 1) +
           adaptive(f, mid, b, right, 0.5 * tol, rel, depth - 1));
}

}  // namespace detail

/// Adaptive composite Gauss-Legendre on [a, b]: an interval is bisected while
/// the 32-point rule and its two-halves refinement disagree by more than the
/// local share of abs_tol. The integrand is only sampled at interior nodes,
/// so endpoint singularities are allowed. Works for double- or
/// Eigen-vector-valued integrands.
template <class F>
auto integrate(F&& f, double a, double b, const QuadOptions& opt = {}) {
  using R = std::decay_t<decltype(detail::gauss_apply(f, a, b))>;
  const R whole = detail::gauss_apply(f, a, b);
  if (a == b) return R(whole * 0.0);
  return detail::adaptive(f, a, b, whole, opt.abs_tol, opt.rel_tol, opt.max_depth);
}

/// Like integrate, but an end flagged as singular is approached through the
/// geometric cells [b - L 2^{1-k}, b - L 2^{-k}], k = 1..48, so integrable
/// endpoint singularities are resolved. The last sliver (about L 2^{-48}) is
/// dropped.
template <class F>
auto integrate_graded(F&& f, double a, double b, bool singular_a, bool singular_b, const QuadOptions& opt = {}) {
  using R = std::decay_t<decltype(detail::gauss_apply(f, a, b))>;
  if (!singular_a && !singular_b) return R(integrate(f, a, b, opt));
  const double mid = 0.5 * (a + b);
  if (singular_a && singular_b)
    return R(integrate_graded(f, a, mid, true, false, opt) + integrate_graded(f, mid, b, false, true, opt));
  const double len = b - a;
  // Cells are laid out from the singular end inwards.
  auto cell = [&](int k) {
    const double near = len * std::ldexp(1.0, -k);
    const double far = len * std::ldexp(1.0, 1 - k);
    return singular_b ? std::pair{b - far, b - near} : std::pair{a + near, a + far};
  };
  R acc = R(integrate(f, cell(1).first, cell(1).second, opt));
  int quiet = 0;
  for (int k = 2; k <= 48; ++k) {
    const auto [lo, hi] = cell(k);
    const R part = integrate(f, lo, hi, opt);
    acc += part;
    const double size = detail::magnitude(part);
    if (!std::isfinite(size)) break;
    quiet = size <= 1e-17 * std::max(1.0, detail::magnitude(acc)) ? quiet + 1 : 0;
    if (quiet >= 3) break;
  }
  return acc;
}

}  // namespace ldp
