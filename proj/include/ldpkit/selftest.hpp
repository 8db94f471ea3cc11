#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ldp {

/// Outcome of one property suite: `checks` individual assertions, of which
/// `failures` failed. `worst` is the largest observed violation (or error)
/// in the suite's own units.
struct SuiteResult {
  std::string name;
  long checks = 0;
  long failures = 0;
  double worst = 0.0;
  std::string note;
  bool passed() const { return checks > 0 && failures == 0; }
};

// Catalog identities: K(0) = 0, I(mean) = 0, I(K'(u)) = u K'(u) - K(u),
// finite-difference gradients, midpoint convexity and the linear minorant.
SuiteResult suite_cgf_identities(int count, std::uint64_t seed);
// Fenchel-Young equality and grad_inverse round trips for the catalog CGFs.
SuiteResult suite_conjugate(int count, std::uint64_t seed);
// |i_f_conjugate - i_f_explicit| <= 1e-6 on `grid` x-values per (model, kernel).
SuiteResult suite_route_agreement(int grid);
// With f = 1, i_f equals the closed-form rate within 1e-8.
SuiteResult suite_cramer_reduction(int grid);

// var(h) = var(h_a) + total mass of the directional decomposition of h_s.
SuiteResult suite_tv_additivity(int count, std::uint64_t seed, int dimension);
// sup_t |h(t)| <= var(h).
SuiteResult suite_sup_norm(int count, std::uint64_t seed, int dimension);
// i_d(h) >= c1 var(h) - c2 with the model's linear minorant.
SuiteResult suite_id_minorant(int count, std::uint64_t seed);
// Nested partitions: partition_action is nondecreasing and reaches i_d
// within 1e-6 (or keeps growing when i_d is infinite).
SuiteResult suite_id_partition(int count, std::uint64_t seed);

// Both inequalities of the L1 versus Hausdorff comparison on random pairs.
SuiteResult suite_l1_hausdorff(int count, std::uint64_t seed, int dimension);
// Symmetry (exact), identity and triangle inequality (slack 1e-9) for
// rho_2, rho_2' and rho_*.
SuiteResult suite_metric_axioms(int count, std::uint64_t seed, int dimension);
// rho_2'(g, h) <= max(rho_2(g, h), |g(0) - h(0)|) + 1e-9.
SuiteResult suite_modified_shorter(int count, std::uint64_t seed, int dimension);
// Oscillating paths with slope cos(2 pi n t): rho_*(g_n, 0) and the
// pairings with ten polynomials fall below 1e-2 by n = 64.
SuiteResult suite_oscillation();
// Two-bump versus one-bump indicators: rho_2' = 1/n and i_d(g_n) = i_d(h_n) / 2.
SuiteResult suite_bump_counterexample();

// Sampling identities: pair(f, trajectory) equals the weighted sum, var and
// terminal value of the trajectory match the increments, exactly.
SuiteResult suite_sampling(int count, std::uint64_t seed);

/// The fast invariant suites behind `ldpkit selftest`.
std::vector<SuiteResult> run_selftest(std::uint64_t seed = 1);

}  // namespace ldp
