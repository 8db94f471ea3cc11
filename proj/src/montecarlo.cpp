#include "ldpkit/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <thread>

#include "ldpkit/errors.hpp"
#include "ldpkit/format.hpp"
#include "ldpkit/kernel_rate.hpp"

namespace ldp {

namespace {

constexpr std::size_t kBlock = 4096;
// Events are tested as l . W >= a - kSlack, so exact ties count as hits.
constexpr double kSlack = 1e-12;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t block) { return splitmix64(seed ^ splitmix64(block + 1)); }

void check_unit(const CgfModel& model, const Vec& l) {
  if (l.size() != model.dimension()) throw ConfigError("direction l has the wrong dimension");
  if (std::abs(l.norm() - 1.0) > 1e-12) throw DomainError("direction l must be a unit vector");
}

void check_n(int n) {
  if (n < 1) throw ConfigError("n must be positive");
}

/// The scalar problem for l . W_n: a one-dimensional model and kernel with
/// the same weighted-sum law.
struct Projection {
  ModelPtr owned;
  const CgfModel* model = nullptr;
  Kernel kernel;
};

Kernel scaled(const Kernel& k, double s) {
  std::vector<double> v = k.values();
  for (double& x : v) x *= s;
  return Kernel(k.breakpoints(), std::move(v));
}

Projection project(const CgfModel& model, const Kernel& kernel, const Vec& l) {
  check_unit(model, l);
  if (model.dimension() == 1) return {nullptr, &model, scaled(kernel, l[0])};
  const auto* gauss = dynamic_cast<const GaussianModel*>(&model);
  if (!gauss) throw UnsupportedError("projection to a direction is implemented for Gaussian models");
  Mat var(1, 1);
  var(0, 0) = l.dot(gauss->covariance() * l);
  auto owned = std::make_shared<GaussianModel>(scalar_vec(l.dot(gauss->mean())), var);
  return {owned, owned.get(), kernel};
}

struct Tilt {
  double lambda = 0.0;
  bool boundary = false;
};

Tilt choose_tilt(const Projection& p, double a) {
  const double center = p.kernel.m1() * p.model->mean()[0];
  if (a <= center) return {};
  const auto gi = grad_inverse(ef_oracle(*p.model, p.kernel), scalar_vec(a));
  switch (gi.status) {
    case GradInverse::Status::ok: return {(*gi.lambda)[0], false};
    case GradInverse::Status::above_range: {
      const ExtReal m = m_plus_minus(*p.model, p.kernel).first;
      if (!m.is_finite()) return {30.0 / std::max(p.kernel.max_plus(), p.kernel.max_minus()), true};
      // Open ends of D_L cannot be sampled at; stay a hair inside.
      const auto dom = d_f(*p.model, p.kernel);
      return {dom.upper_closed ? m.value() : m.value() * (1.0 - 1e-9), true};
    }
    case GradInverse::Status::below_range: return {};
    case GradInverse::Status::no_convergence: break;
  }
  throw ConvergenceError("estimate_tail: could not solve for the tilt");
}

double log_normal_tail(double z) {
  if (z < 30.0) return std::log(0.5 * std::erfc(z / std::numbers::sqrt2));
  const double z2 = 1.0 / (z * z);
  const double series = -z2 + 3 * z2 * z2 - 15 * z2 * z2 * z2 + 105 * z2 * z2 * z2 * z2;
  return -0.5 * z * z - std::log(z) - 0.5 * std::log(2.0 * std::numbers::pi) + std::log1p(series);
}

double log_sum_exp(const std::vector<double>& xs) {
  if (xs.empty()) return kNegInf;
  const double m = *std::max_element(xs.begin(), xs.end());
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

std::optional<double> rademacher_oracle(const Kernel& kernel, int n, double a) {
  const auto& v = kernel.values();
  const bool constant = std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
  if (constant) {
    // W = c (2B - n) / n with B ~ Bin(n, 1/2); B and n - B share a law.
    const double c = std::abs(v.front());
    const double k_real = 0.5 * (n + (a - kSlack) * n / c);
    const double k_min = std::ceil(k_real - 1e-9);
    if (k_min <= 0) return 0.0;
    if (k_min > n) return kNegInf;
    std::vector<double> terms;
    for (int k = static_cast<int>(k_min); k <= n; ++k)
      terms.push_back(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
    return log_sum_exp(terms) - n * std::numbers::ln2;
  }
  if (n > 24) return std::nullopt;
  // Meet in the middle: all sign sums of the first half against the sorted
  // sign sums of the second half.
  std::vector<double> w;
  for (int k = 1; k <= n; ++k) w.push_back(kernel(static_cast<double>(k) / n) / n);
  auto all_sums = [](const std::vector<double>& part) {
    std::vector<double> sums{0.0};
    for (double x : part) {
      std::vector<double> next;
      next.reserve(2 * sums.size());
      for (double s : sums) {
        next.push_back(s + x);
        next.push_back(s - x);
      }
      sums = std::move(next);
    }
    return sums;
  };
  const auto half = static_cast<std::ptrdiff_t>(n / 2);
  const auto left = all_sums(std::vector<double>(w.begin(), w.begin() + half));
  auto right = all_sums(std::vector<double>(w.begin() + half, w.end()));
  std::sort(right.begin(), right.end());
  double count = 0.0;
  for (double s : left)
    count += static_cast<double>(right.end() - std::lower_bound(right.begin(), right.end(), a - kSlack - s));
  if (count == 0.0) return kNegInf;
  return std::log(count) - n * std::numbers::ln2;
}

}  // namespace

int default_threads() {
  if (const char* env = std::getenv("LDPKIT_THREADS")) {
    try {
      const double v = parse_double(env);
      if (v >= 1 && v == std::floor(v)) return static_cast<int>(v);
    } catch (const ConfigError&) {
    }
    throw ConfigError(std::string("LDPKIT_THREADS must be a positive integer, got '") + env + "'");
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

Vec sample_weighted_sum(const CgfModel& model, const Kernel& kernel, int n, std::uint64_t seed) {
  check_n(n);
  const auto xs = model.sample(static_cast<std::size_t>(n), seed);
  Vec acc = Vec::Zero(model.dimension());
  for (int k = 1; k <= n; ++k) acc += kernel(static_cast<double>(k) / n) * Vec(xs[k - 1] / n);
  return acc;
}

CadlagPath sample_traj(const CgfModel& model, int n, std::uint64_t seed) {
  check_n(n);
  const auto xs = model.sample(static_cast<std::size_t>(n), seed);
  std::vector<Jump> jumps;
  for (int k = 1; k <= n; ++k) jumps.push_back({static_cast<double>(k) / n, Vec(xs[k - 1] / n)});
  return CadlagPath(model.dimension(), {0.0, 1.0}, {Vec::Zero(model.dimension())}, std::move(jumps));
}

McEstimate estimate_tail(const CgfModel& model, const Kernel& kernel, int n, double a, const Vec& l,
                         std::size_t samples, std::uint64_t seed, McOptions opt) {
  check_n(n);
  if (samples < 100) throw ConfigError("estimate_tail: at least 100 samples are required");
  if (!model.has_sampler()) throw UnsupportedError("estimate_tail: model has no sampler");
  const Projection proj = project(model, kernel, l);
  const Tilt tilt = opt.tilted ? choose_tilt(proj, a) : Tilt{};

  const int d = model.dimension();
  std::vector<double> fk(n);
  std::vector<Vec> theta(n);
  double log_norm = 0.0;  // sum_k K(theta_k)
  for (int k = 1; k <= n; ++k) {
    fk[k - 1] = kernel(static_cast<double>(k) / n);
    theta[k - 1] = tilt.lambda * fk[k - 1] * l;
    if (d == 1 && !model.domain().interior(theta[k - 1][0]))
      throw DomainError("estimate_tail: tilt leaves the interior of D_L");
    log_norm += model.cumulant(theta[k - 1]).value();
  }

  const std::size_t blocks = (samples + kBlock - 1) / kBlock;
  std::vector<std::vector<double>> hit_logw(blocks);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t b = next++; b < blocks; b = next++) {
      std::mt19937_64 rng(stream_seed(seed, b));
      const std::size_t count = std::min(kBlock, samples - b * kBlock);
      for (std::size_t s = 0; s < count; ++s) {
        Vec w = Vec::Zero(d);
        double exponent = 0.0;
        for (int k = 0; k < n; ++k) {
          const Vec x = model.draw_tilted(rng, theta[k]);
          w += fk[k] * Vec(x / n);
          exponent += theta[k].dot(x);
        }
        if (l.dot(w) >= a - kSlack) hit_logw[b].push_back(log_norm - exponent);
      }
    }
  };
  const int threads = std::max(1, std::min<int>(opt.threads > 0 ? opt.threads : default_threads(),
                                                static_cast<int>(blocks)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  }

  std::vector<double> logw;
  for (const auto& part : hit_logw) logw.insert(logw.end(), part.begin(), part.end());

  McEstimate est;
  est.n = n;
  est.samples = samples;
  est.lambda = tilt.lambda;
  est.boundary_tilt = tilt.boundary;
  est.hits = logw.size();
  if (logw.empty()) {
    est.log_prob = kNegInf;
    est.std_error = std::numeric_limits<double>::infinity();
    est.rate_estimate = std::numeric_limits<double>::infinity();
    est.rate_std_error = std::numeric_limits<double>::infinity();
    return est;
  }
  const double top = *std::max_element(logw.begin(), logw.end());
  double s1 = 0.0, s2 = 0.0;
  for (double lw : logw) {
    const double e = std::exp(lw - top);
    s1 += e;
    s2 += e * e;
  }
  const auto nn = static_cast<double>(samples);
  const double mean = s1 / nn;
  const double var = std::max(0.0, (s2 - s1 * s1 / nn) / (nn - 1.0));
  est.log_prob = top + std::log(mean);
  est.std_error = std::sqrt(var / nn) / mean;
  est.rate_estimate = -est.log_prob / n;
  est.rate_std_error = est.std_error / n;
  return est;
}

std::optional<double> exact_tail_oracle(const CgfModel& model, const Kernel& kernel, int n, double a,
                                        const Vec& l) {
  check_n(n);
  check_unit(model, l);
  if (const auto* gauss = dynamic_cast<const GaussianModel*>(&model)) {
    double s1 = 0.0, s2 = 0.0;
    for (int k = 1; k <= n; ++k) {
      const double f = kernel(static_cast<double>(k) / n);
      s1 += f;
      s2 += f * f;
    }
    const double mean = s1 / n * l.dot(gauss->mean());
    const double sd = std::sqrt(s2 * l.dot(gauss->covariance() * l)) / n;
    if (sd == 0.0) return a <= mean ? 0.0 : kNegInf;
    return log_normal_tail((a - mean) / sd);
  }
  if (dynamic_cast<const RademacherModel*>(&model)) return rademacher_oracle(scaled(kernel, l[0]), n, a);
  return std::nullopt;
}

double projected_rate(const CgfModel& model, const Kernel& kernel, double a, const Vec& l) {
  const Projection p = project(model, kernel, l);
  if (a <= p.kernel.m1() * p.model->mean()[0]) return 0.0;
  return i_f_conjugate(*p.model, p.kernel, scalar_vec(a)).value.to_double();
}

std::vector<RateRow> empirical_rate_curve(const CgfModel& model, const Kernel& kernel,
                                          const std::vector<double>& levels, const std::vector<int>& n_list,
                                          std::size_t samples, std::uint64_t seed, const Vec& l, McOptions opt) {
  std::vector<double> rates;
  for (double a : levels) rates.push_back(projected_rate(model, kernel, a, l));
  std::vector<RateRow> rows;
  for (int n : n_list) {
    for (std::size_t i = 0; i < levels.size(); ++i) {
      const double a = levels[i];
      const McEstimate est = estimate_tail(model, kernel, n, a, l, samples, seed, opt);
      RateRow row{n, a, est.rate_estimate, est.rate_std_error, rates[i], std::nullopt};
      if (const auto lp = exact_tail_oracle(model, kernel, n, a, l)) row.exact_rate = -*lp / n;
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace ldp
