#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ldpkit/cgf.hpp"
#include "ldpkit/kernel.hpp"
#include "ldpkit/linalg.hpp"
#include "ldpkit/path.hpp"

namespace ldp {

/// Importance-sampling estimate of log P(l . W_n >= a) for the weighted sum
/// W_n = (1/n) sum_k f(k/n) X_k.
struct McEstimate {
  int n = 0;
  std::size_t samples = 0;
  /// Tilt scale lambda*: step k is tilted by theta_k = lambda* f(k/n) l.
  double lambda = 0.0;
  /// lambda* was clamped to the end of D_f (the target lies on a singular branch).
  bool boundary_tilt = false;
  std::size_t hits = 0;
  double log_prob = 0.0;     // -inf when no sample hit the event
  double std_error = 0.0;    // standard error of log_prob (delta method)
  double rate_estimate = 0.0;  // -log_prob / n
  double rate_std_error = 0.0; // std_error / n
};

struct McOptions {
  /// Worker threads; 0 means LDPKIT_THREADS or the hardware concurrency.
  int threads = 0;
  /// false gives plain Monte Carlo (no tilt).
  bool tilted = true;
};

/// Number of workers used when McOptions::threads is 0.
int default_threads();

/// One draw of (1/n) sum_k f(k/n) X_k, accumulated as sum_k f(k/n) (X_k / n).
Vec sample_weighted_sum(const CgfModel& model, const Kernel& kernel, int n, std::uint64_t seed);

/// The rescaled walk t -> S_[nt] / n as a pure-jump path with jumps X_k / n
/// at k/n. Uses the same draws as sample_weighted_sum for a given seed.
CadlagPath sample_traj(const CgfModel& model, int n, std::uint64_t seed);

/// Tilted estimator of log P(l . W_n >= a). Samples are drawn in fixed blocks
/// with per-block seed streams, so the result does not depend on the worker
/// count.
McEstimate estimate_tail(const CgfModel& model, const Kernel& kernel, int n, double a, const Vec& l,
                         std::size_t samples, std::uint64_t seed, McOptions opt = {});

/// Exact log P(l . W_n >= a): any n for Gaussian models, constant kernels for
/// Rademacher (binomial sum), any kernel for Rademacher with n <= 24
/// (enumeration). Nullopt when no exact oracle applies.
std::optional<double> exact_tail_oracle(const CgfModel& model, const Kernel& kernel, int n, double a, const Vec& l);

/// I_f of the projected problem, inf{I_f(x) : l . x >= a} for a at or above
/// the mean pairing.
double projected_rate(const CgfModel& model, const Kernel& kernel, double a, const Vec& l);

struct RateRow {
  int n = 0;
  double a = 0.0;
  double rate_estimate = 0.0;
  double std_error = 0.0;  // of rate_estimate
  double i_f = 0.0;
  std::optional<double> exact_rate;
};

/// One row per (n, a): estimated rate -log P / n beside I_f(a) and, where an
/// oracle exists, the exact -log P / n.
std::vector<RateRow> empirical_rate_curve(const CgfModel& model, const Kernel& kernel,
                                          const std::vector<double>& levels, const std::vector<int>& n_list,
                                          std::size_t samples, std::uint64_t seed, const Vec& l,
                                          McOptions opt = {});

}  // namespace ldp
