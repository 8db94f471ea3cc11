#pragma once

#include <optional>
#include <string>
#include <utility>

#include "ldpkit/cgf.hpp"
#include "ldpkit/conjugate.hpp"
#include "ldpkit/domain.hpp"
#include "ldpkit/ext_real.hpp"
#include "ldpkit/kernel.hpp"
#include "ldpkit/linalg.hpp"
#include "ldpkit/path.hpp"

namespace ldp {

/// Rate of the kernel-weighted sums (1/n) sum_k f(k/n) X_k.
///
/// E_f(lambda) = int_0^1 K(lambda f(t)) dt, and I_f = E_f^*. In one dimension
/// I_f is affine with slope M_+ beyond sup E_f' (and slope M_- below
/// inf E_f'); these are the singular branches.
enum class Branch { interior, singular_plus, singular_minus, infinite };

std::string to_string(Branch b);

struct KernelRateResult {
  Vec x;
  ExtReal value = 0.0;
  Branch branch = Branch::interior;
  std::optional<Vec> lambda_star;
  // One-dimensional structure; empty for d > 1.
  std::optional<ExtReal> m_plus;
  std::optional<ExtReal> m_minus;
  std::optional<ExtReal> sup_ef_prime;
  std::optional<ExtReal> inf_ef_prime;
};

/// E_f(lambda); +inf when lambda f(t) leaves D_L on a set of positive measure.
ExtReal e_f(const CgfModel& model, const Kernel& kernel, const Vec& lambda);
/// int f(t) grad K(lambda f(t)) dt for lambda in the closure of D_f. Entries
/// may be infinite at an open end where the integral diverges.
Vec e_f_grad(const CgfModel& model, const Kernel& kernel, const Vec& lambda);
/// int f(t)^2 Hess K(lambda f(t)) dt on the interior of D_f.
Mat e_f_hessian(const CgfModel& model, const Kernel& kernel, const Vec& lambda);

/// D_f = D_L / max f_+  intersected with  (-D_L) / max f_-, with 1/0 = inf
/// and C/0 = R. Bounded D_L is supported only in one dimension.
DomainInterval d_f(const CgfModel& model, const Kernel& kernel);

/// (M_+, M_-) with M_+- = min(I_inf(1) / max f_+-, I_inf(-1) / max f_-+). d = 1.
std::pair<ExtReal, ExtReal> m_plus_minus(const CgfModel& model, const Kernel& kernel);

/// One-sided limits of E_f' at the ends of D_f (d = 1).
ExtReal sup_ef_prime(const CgfModel& model, const Kernel& kernel);
ExtReal inf_ef_prime(const CgfModel& model, const Kernel& kernel);

/// E_f as a convex oracle over D_f. The oracle holds references to model
/// and kernel, which must outlive it.
ConvexOracle ef_oracle(const CgfModel& model, const Kernel& kernel);

/// I_f(x) as the numerical Legendre transform of E_f.
KernelRateResult i_f_conjugate(const CgfModel& model, const Kernel& kernel, const Vec& x, double tol = 0.0);
/// I_f(x) from the integral formula int I(grad K(lambda* f(t))) dt, plus the
/// linear M_+- terms on the one-dimensional singular branches.
KernelRateResult i_f_explicit(const CgfModel& model, const Kernel& kernel, const Vec& x, double tol = 0.0);

/// The minimiser of I_D under the constraint int f dh = x, on a grid of
/// `cells` uniform cells merged with the kernel breakpoints. On a singular
/// branch the jump sits at the first maximiser of the binding sign of f.
CadlagPath minimizer(const CgfModel& model, const Kernel& kernel, const Vec& x, double tol = 0.0,
                     int cells = 4096);

/// Independent brute-force value of I_f(x): minimises
/// sum_i (1/m) I(v_i) + jump cost over slopes v_i on m uniform cells subject
/// to the pairing constraint. Jumps are priced in one dimension only.
ExtReal variational_rate(const CgfModel& model, const Kernel& kernel, const Vec& x, int pieces, double tol = 1e-10);

}  // namespace ldp
