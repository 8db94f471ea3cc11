#include "ldpkit/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "ldpkit/cgf.hpp"
#include "ldpkit/conjugate.hpp"
#include "ldpkit/kernel.hpp"
#include "ldpkit/kernel_rate.hpp"
#include "ldpkit/metrics.hpp"
#include "ldpkit/montecarlo.hpp"
#include "ldpkit/path.hpp"

namespace ldp {

namespace {

class Tally {
 public:
  explicit Tally(std::string name) { r_.name = std::move(name); }
  void check(bool ok, double violation = 0.0) {
    ++r_.checks;
    if (!ok) ++r_.failures;
    if (std::isfinite(violation)) r_.worst = std::max(r_.worst, violation);
  }
  void fail(const std::string& why) {
    ++r_.checks;
    ++r_.failures;
    if (r_.note.empty()) r_.note = why;
  }
  void note(std::string text) { r_.note = std::move(text); }
  SuiteResult done() { return std::move(r_); }

 private:
  SuiteResult r_;
};

const std::vector<std::string>& scalar_models() {
  static const std::vector<std::string> specs{"gaussian:mu=0.3,sigma=1.5", "cexp", "rademacher",
                                              "poisson:rate=2", "laplace", "synthetic-boundary"};
  return specs;
}

const char* kGaussian2 = "gaussian:mu=0.5/-1,cov=2/0.5/0.5/1";

/// A random point well inside D_L.
Vec interior_point(const CgfModel& model, std::mt19937_64& rng) {
  const int d = model.dimension();
  if (d > 1) {
    std::uniform_real_distribution<double> c(-2.0, 2.0);
    Vec u(d);
    for (int k = 0; k < d; ++k) u[k] = c(rng);
    return u;
  }
  const auto dom = model.domain();
  const double lo = dom.lower.is_finite() ? 0.95 * dom.lower.value() : -3.0;
  const double hi = dom.upper.is_finite() ? 0.95 * dom.upper.value() : 3.0;
  return scalar_vec(std::uniform_real_distribution<double>(lo, hi)(rng));
}

double rel(double scale) { return std::max(1.0, std::abs(scale)); }

/// Extended-real closeness: equal infinities agree.
bool close(ExtReal a, ExtReal b, double tol, double* err) {
  const ExtReal diff = abs_diff(a, b);
  if (!diff.is_finite()) {
    *err = std::numeric_limits<double>::infinity();
    return false;
  }
  *err = diff.value();
  const double scale = a.is_finite() ? rel(a.value()) : 1.0;
  return diff.value() <= tol * scale;
}

double sup_abs(const CadlagPath& h) {
  double best = h.value(0.0).norm();
  for (double t : h.event_times()) best = std::max({best, h.left_limit(t).norm(), h.value(t).norm()});
  return best;
}

/// Event times plus geometric points t_j - gap 2^-i (i = 1..level) before
/// each jump; a jump at 0 is approached through gap 2^-i.
std::vector<double> refinement(const CadlagPath& h, int level) {
  const auto events = h.event_times();
  std::vector<double> pts;
  for (double t : events)
    if (t > 0.0) pts.push_back(t);
  for (const auto& j : h.jumps()) {
    if (j.time == 0.0) {
      const double next = pts.empty() ? 1.0 : pts.front();
      for (int i = 1; i <= level; ++i) pts.push_back(std::ldexp(next, -i));
      continue;
    }
    const auto it = std::lower_bound(events.begin(), events.end(), j.time);
    const double prev = it == events.begin() ? 0.0 : *std::prev(it);
    const double gap = j.time - prev;
    for (int i = 1; i <= level; ++i) pts.push_back(j.time - std::ldexp(gap, -i));
  }
  return pts;
}

/// Pairs of random paths; every other pair is a small perturbation.
std::pair<CadlagPath, CadlagPath> random_pair(int d, std::uint64_t seed) {
  CadlagPath g = random_path(d, 6, 3, seed * 2 + 1);
  CadlagPath h = random_path(d, 6, 3, seed * 2 + 2);
  if (seed % 2 == 1) h = g + random_path(d, 4, 2, seed * 2 + 2) * 0.01;
  return {std::move(g), std::move(h)};
}

}  // namespace

SuiteResult suite_cgf_identities(int count, std::uint64_t seed) {
  Tally t("cgf identities");
  std::mt19937_64 rng(seed);
  std::vector<std::string> specs = scalar_models();
  specs.push_back(kGaussian2);
  for (const auto& spec : specs) {
    const ModelPtr m = parse_model(spec);
    const int d = m->dimension();
    t.check(cgf_eval(*m, Vec::Zero(d)) == ExtReal(0.0));
    t.check(rate_value(*m, m->mean()) == ExtReal(0.0));
    const LinearMinorant lm = m->linear_minorant();
    std::uniform_real_distribution<double> wide(-5.0, 5.0);
    for (int i = 0; i < count; ++i) {
      const Vec u = interior_point(*m, rng);
      const Vec g = m->gradient(u);
      const double k = m->cumulant(u).value();
      const double rhs = u.dot(g) - k;
      double err = 0.0;
      t.check(close(rate_value(*m, g), rhs, 1e-8, &err), err);

      for (int c = 0; c < d; ++c) {
        const double step = 1e-5 * rel(u[c]);
        Vec up = u, dn = u;
        up[c] += step;
        dn[c] -= step;
        const double fd = (m->cumulant(up).value() - m->cumulant(dn).value()) / (2 * step);
        const double e = std::abs(fd - g[c]);
        t.check(e <= 1e-6 * rel(g[c]), e);
      }

      const Vec w = interior_point(*m, rng);
      const double mid = m->cumulant(Vec(0.5 * (u + w))).value();
      const double chord = 0.5 * (k + m->cumulant(w).value());
      t.check(mid <= chord + 1e-12 * rel(chord), std::max(0.0, mid - chord));

      Vec v(d);
      for (int c = 0; c < d; ++c) v[c] = wide(rng);
      const ExtReal iv = rate_value(*m, v);
      const double floor = lm.c1 * v.norm() - lm.c2;
      t.check(iv >= ExtReal(floor - 1e-12), iv.is_finite() ? std::max(0.0, floor - iv.value()) : 0.0);
    }
  }
  return t.done();
}

SuiteResult suite_conjugate(int count, std::uint64_t seed) {
  Tally t("conjugate");
  std::mt19937_64 rng(seed);
  std::vector<std::string> specs = scalar_models();
  specs.push_back(kGaussian2);
  for (const auto& spec : specs) {
    const ModelPtr m = parse_model(spec);
    const ConvexOracle oracle = cgf_oracle(*m);
    for (int i = 0; i < count; ++i) {
      const Vec lambda = interior_point(*m, rng);
      const Vec x = m->gradient(lambda);
      const double target = x.dot(lambda);
      const ConjugateResult c = legendre(oracle, x);
      const ExtReal lhs = c.value + m->cumulant(lambda);
      double err = 0.0;
      t.check(close(lhs, target, 1e-8, &err), err);

      const GradInverse gi = grad_inverse(oracle, x);
      if (gi.status != GradInverse::Status::ok || !gi.lambda) {
        t.fail("grad_inverse failed for " + spec);
        continue;
      }
      const double e = (m->gradient(*gi.lambda) - x).norm();
      t.check(e <= 1e-8 * rel(x.norm()), e);
    }
  }
  return t.done();
}

SuiteResult suite_route_agreement(int grid) {
  Tally t("rate routes agree");
  const std::vector<std::pair<std::string, std::string>> cases{
      {"gaussian:mu=0,sigma=1", "affine:0,1"}, {"cexp", "const:1"},          {"cexp", "affine:0,1"},
      {"cexp", "affine:0,-1"},                 {"synthetic-boundary", "affine:0,1"}, {"rademacher", "affine:0,1"},
      {"laplace", "affine:0,1"},               {"poisson:rate=1", "affine:0.5,1"}};
  for (const auto& [ms, ks] : cases) {
    const ModelPtr m = parse_model(ms);
    const Kernel f = parse_kernel(ks);
    const double centre = f.m1() * m->mean()[0];
    for (int i = 0; i < grid; ++i) {
      const double x = centre - 3.0 + 6.0 * i / (grid - 1);
      try {
        const ExtReal a = i_f_conjugate(*m, f, scalar_vec(x)).value;
        const ExtReal b = i_f_explicit(*m, f, scalar_vec(x)).value;
        double err = 0.0;
        t.check(close(a, b, 1e-6, &err), err);
      } catch (const std::exception& e) {
        t.fail(ms + " / " + ks + ": " + e.what());
      }
    }
  }
  return t.done();
}

SuiteResult suite_cramer_reduction(int grid) {
  Tally t("f = 1 gives the closed-form rate");
  const Kernel one = Kernel::constant(1.0);
  for (const auto& spec : scalar_models()) {
    const ModelPtr m = parse_model(spec);
    const double mean = m->mean()[0];
    for (int i = 0; i < grid; ++i) {
      const Vec x = scalar_vec(mean - 3.0 + 6.0 * i / (grid - 1));
      const ExtReal closed = *rate_closed(*m, x);
      try {
        double err = 0.0;
        t.check(close(i_f_conjugate(*m, one, x).value, closed, 1e-8, &err), err);
        t.check(close(i_f_explicit(*m, one, x).value, closed, 1e-8, &err), err);
      } catch (const std::exception& e) {
        t.fail(spec + ": " + e.what());
      }
    }
  }
  return t.done();
}

SuiteResult suite_tv_additivity(int count, std::uint64_t seed, int dimension) {
  Tally t("total variation additivity (d=" + std::to_string(dimension) + ")");
  for (int i = 0; i < count; ++i) {
    const CadlagPath h = random_path(dimension, 8, 4, seed + i);
    const auto [ac, jumps] = lebesgue_split(h);
    const double total = var(h);
    const double parts = var(ac) + directional(jumps).total_mass();
    const double e = std::abs(total - parts);
    t.check(e <= 1e-12 * rel(total), e);
  }
  return t.done();
}

SuiteResult suite_sup_norm(int count, std::uint64_t seed, int dimension) {
  Tally t("sup norm bounded by variation (d=" + std::to_string(dimension) + ")");
  for (int i = 0; i < count; ++i) {
    const CadlagPath h = random_path(dimension, 8, 4, seed + i);
    const double s = sup_abs(h), v = var(h);
    t.check(s <= v + 1e-12 * rel(v), std::max(0.0, s - v));
  }
  return t.done();
}

SuiteResult suite_id_minorant(int count, std::uint64_t seed) {
  Tally t("action bounded below by c1 var - c2");
  std::vector<std::string> specs = scalar_models();
  specs.push_back(kGaussian2);
  for (const auto& spec : specs) {
    const ModelPtr m = parse_model(spec);
    const LinearMinorant lm = m->linear_minorant();
    for (int i = 0; i < count; ++i) {
      const CadlagPath h = random_path(m->dimension(), 6, 3, seed + i);
      const ExtReal a = i_d(h, *m);
      const double floor = lm.c1 * var(h) - lm.c2;
      t.check(a >= ExtReal(floor - 1e-12), a.is_finite() ? std::max(0.0, floor - a.value()) : 0.0);
    }
  }
  return t.done();
}

SuiteResult suite_id_partition(int count, std::uint64_t seed) {
  Tally t("partition refinement reaches the action");
  constexpr int kLevels = 40;
  const std::vector<std::string> specs{"cexp", "laplace", "synthetic-boundary", "gaussian:mu=0,sigma=1",
                                       "rademacher", "poisson:rate=1"};
  for (const auto& spec : specs) {
    const ModelPtr m = parse_model(spec);
    for (int i = 0; i < count; ++i) {
      // Slopes in [-2, 2] scaled into every model's finite region half the time.
      CadlagPath h = random_path(1, 5, 3, seed + i);
      if (i % 2 == 0) h = h * 0.4;
      std::vector<ExtReal> seq;
      for (int level = 0; level <= kLevels; ++level) seq.push_back(partition_action(h, *m, refinement(h, level)));
      for (std::size_t k = 1; k < seq.size(); ++k) {
        const ExtReal& a = seq[k - 1];
        const ExtReal& b = seq[k];
        const double slack = a.is_finite() ? 1e-12 * rel(a.value()) : 0.0;
        t.check(b >= a - ExtReal(slack), (a.is_finite() && b.is_finite()) ? std::max(0.0, a.value() - b.value()) : 0.0);
      }
      const ExtReal target = i_d(h, *m);
      if (target.is_finite()) {
        double err = 0.0;
        t.check(close(seq.back(), target, 1e-6, &err), err);
      } else {
        const ExtReal& a = seq[kLevels - 2];
        const ExtReal& b = seq[kLevels - 1];
        const ExtReal& c = seq[kLevels];
        t.check(c.is_pos_inf() || (a < b && b < c));
      }
    }
  }
  return t.done();
}

SuiteResult suite_l1_hausdorff(int count, std::uint64_t seed, int dimension) {
  Tally t("L1 versus Hausdorff inequalities (d=" + std::to_string(dimension) + ")");
  const double d = dimension;
  for (int i = 0; i < count; ++i) {
    const auto [g, h] = random_pair(dimension, seed + i);
    const double lhs = l1_distance(g, h);
    const double r2 = rho_2(g, h);
    const double r2p = rho_2_prime(g, h);
    const double v = var(h);
    const double first = 2 * d * (v - h.value(0.0).norm() + 1) * r2 + std::numbers::pi * d * r2 * r2;
    const double second = 2 * d * (v + 1) * r2p + std::numbers::pi * d * r2p * r2p;
    t.check(lhs <= first + 1e-9, std::max(0.0, lhs - first));
    t.check(lhs <= second + 1e-9, std::max(0.0, lhs - second));
  }
  return t.done();
}

SuiteResult suite_metric_axioms(int count, std::uint64_t seed, int dimension) {
  Tally t("metric axioms (d=" + std::to_string(dimension) + ")");
  using Metric = double (*)(const CadlagPath&, const CadlagPath&);
  const Metric metrics[] = {&rho_2, &rho_2_prime, &rho_star};
  for (int i = 0; i < count; ++i) {
    const CadlagPath a = random_path(dimension, 6, 3, seed + 3 * i);
    const CadlagPath b = random_path(dimension, 6, 3, seed + 3 * i + 1);
    const CadlagPath c = i % 2 ? random_path(dimension, 6, 3, seed + 3 * i + 2)
                               : a + random_path(dimension, 4, 2, seed + 3 * i + 2) * 0.05;
    for (Metric rho : metrics) {
      const double ab = rho(a, b), ba = rho(b, a), bc = rho(b, c), ac = rho(a, c);
      t.check(ab == ba, std::abs(ab - ba));
      t.check(rho(a, a) == 0.0, rho(a, a));
      t.check(ab >= 0.0);
      t.check(ac <= ab + bc + 1e-9, std::max(0.0, ac - ab - bc));
    }
  }
  return t.done();
}

SuiteResult suite_modified_shorter(int count, std::uint64_t seed, int dimension) {
  Tally t("modified Hausdorff distance is shorter (d=" + std::to_string(dimension) + ")");
  for (int i = 0; i < count; ++i) {
    const auto [g, h] = random_pair(dimension, seed + i);
    const double lhs = rho_2_prime(g, h);
    const double rhs = std::max(rho_2(g, h), (g.value(0.0) - h.value(0.0)).norm());
    t.check(lhs <= rhs + 1e-9, std::max(0.0, lhs - rhs));
  }
  return t.done();
}

SuiteResult suite_oscillation() {
  Tally t("oscillating paths vanish weakly");
  constexpr int kCellsPerPeriod = 16;
  double prev_star = std::numeric_limits<double>::infinity();
  double prev_pair = std::numeric_limits<double>::infinity();
  const CadlagPath zero(1);
  for (int n = 1; n <= 64; n *= 2) {
    const int cells = kCellsPerPeriod * n;
    std::vector<double> grid, slopes;
    const double w = 2 * std::numbers::pi * n;
    for (int i = 0; i <= cells; ++i) grid.push_back(static_cast<double>(i) / cells);
    for (int i = 0; i < cells; ++i)
      slopes.push_back((std::sin(w * grid[i + 1]) - std::sin(w * grid[i])) / (w * (grid[i + 1] - grid[i])));
    const CadlagPath g = CadlagPath::scalar(grid, slopes);
    t.check(var(g) <= 2 / std::numbers::pi + 1e-12);
    const double star = rho_star(g, zero);
    double worst_pair = 0.0;
    for (int k = 0; k < 10; ++k) {
      double acc = 0.0;  // int t^k dg, exact per linear piece
      for (int i = 0; i < cells; ++i)
        acc += slopes[i] * (std::pow(grid[i + 1], k + 1) - std::pow(grid[i], k + 1)) / (k + 1);
      worst_pair = std::max(worst_pair, std::abs(acc));
    }
    t.check(star <= prev_star, std::max(0.0, star - prev_star));
    t.check(worst_pair <= prev_pair + 1e-15, std::max(0.0, worst_pair - prev_pair));
    prev_star = star;
    prev_pair = worst_pair;
  }
  t.check(prev_star < 1e-2, std::max(0.0, prev_star - 1e-2));
  t.check(prev_pair < 1e-2, std::max(0.0, prev_pair - 1e-2));
  t.note("rho_* at n=64: " + std::to_string(prev_star) + ", pairing: " + std::to_string(prev_pair));
  return t.done();
}

SuiteResult suite_bump_counterexample() {
  Tally t("two bumps versus one bump");
  const ModelPtr cexp = parse_model("cexp");
  const ModelPtr laplace = parse_model("laplace");
  for (int n = 4; n <= 64; ++n) {
    const double a = 1.0 / n;
    const CadlagPath h = CadlagPath::scalar({0.0, 1.0}, {0.0},
                                            {{0.5 - 2 * a, 1.0}, {0.5 - a, -1.0}, {0.5 + a, 1.0}, {0.5 + 2 * a, -1.0}});
    const CadlagPath g = CadlagPath::scalar({0.0, 1.0}, {0.0}, {{0.5 - a, 1.0}, {0.5 + a, -1.0}});
    const double r = rho_2_prime(g, h);
    t.check(std::abs(r - a) <= 1e-9, std::abs(r - a));
    for (const ModelPtr& m : {cexp, laplace}) {
      const ExtReal ig = i_d(g, *m), ih = i_d(h, *m);
      double err = 0.0;
      t.check(ig > ExtReal(0.0));
      t.check(close(ig, 0.5 * ih, 1e-8, &err) || (ig.is_pos_inf() && ih.is_pos_inf()), err);
    }
  }
  return t.done();
}

SuiteResult suite_sampling(int count, std::uint64_t seed) {
  Tally t("trajectory and weighted-sum sampling agree");
  const std::vector<std::string> specs{"gaussian:mu=0.3,sigma=1.5", "cexp", "rademacher", "poisson:rate=1", kGaussian2};
  const Kernel f = parse_kernel("pwl:0:0.5,0.3:-1,1:2");
  std::mt19937_64 rng(seed);
  for (const auto& spec : specs) {
    const ModelPtr m = parse_model(spec);
    for (int i = 0; i < count; ++i) {
      const int n = std::uniform_int_distribution<int>(1, 60)(rng);
      const std::uint64_t s = rng();
      const CadlagPath traj = sample_traj(*m, n, s);
      const Vec w = sample_weighted_sum(*m, f, n, s);
      t.check(pair(f, traj) == w, (pair(f, traj) - w).norm());
      const auto xs = m->sample(static_cast<std::size_t>(n), s);
      Vec end = Vec::Zero(m->dimension());
      double total = 0.0;
      for (const auto& x : xs) {
        const Vec step = x / n;
        end += step;
        total += step.norm();
      }
      t.check(traj.value(1.0) == end, (traj.value(1.0) - end).norm());
      t.check(var(traj) == total, std::abs(var(traj) - total));
    }
  }
  return t.done();
}

std::vector<SuiteResult> run_selftest(std::uint64_t seed) {
  std::vector<SuiteResult> out;
  out.push_back(suite_cgf_identities(100, seed));
  out.push_back(suite_conjugate(50, seed));
  out.push_back(suite_route_agreement(25));
  out.push_back(suite_cramer_reduction(25));
  for (int d : {1, 2}) {
    out.push_back(suite_tv_additivity(200, seed, d));
    out.push_back(suite_sup_norm(200, seed, d));
  }
  out.push_back(suite_id_minorant(100, seed));
  out.push_back(suite_id_partition(40, seed));
  for (int d : {1, 2}) {
    out.push_back(suite_l1_hausdorff(100, seed, d));
    out.push_back(suite_metric_axioms(40, seed, d));
    out.push_back(suite_modified_shorter(100, seed, d));
  }
  out.push_back(suite_oscillation());
  out.push_back(suite_bump_counterexample());
  out.push_back(suite_sampling(20, seed));
  return out;
}

}  // namespace ldp
