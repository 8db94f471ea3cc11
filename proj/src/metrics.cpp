#include "ldpkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "ldpkit/errors.hpp"
#include "ldpkit/quadrature.hpp"

namespace ldp {

namespace {

/// Walks the path's events in time order, calling visit(t, left, right) at
/// every event time t > 0 with h(t-) and h(t).
template <class Visit>
Vec walk_events(const CadlagPath& path, Visit visit) {
  const auto& grid = path.grid();
  const auto& jumps = path.jumps();
  std::size_t gi = 0;
  std::size_t ji = 0;
  Vec cur = Vec::Zero(path.dimension());
  if (ji < jumps.size() && jumps[ji].time == 0.0) cur += jumps[ji++].size;
  const Vec start = cur;
  double t_prev = 0.0;
  for (double t : path.event_times()) {
    if (t == 0.0) continue;
    while (gi + 1 < grid.size() && grid[gi + 1] <= t_prev) ++gi;
    cur += path.slopes()[gi] * (t - t_prev);
    const Vec left = cur;
    if (ji < jumps.size() && jumps[ji].time == t) cur += jumps[ji++].size;
    visit(t, left, cur);
    t_prev = t;
  }
  return start;
}

Vec point(double t, const Vec& x) {
  Vec p(x.size() + 1);
  p[0] = t;
  p.tail(x.size()) = x;
  return p;
}

double point_segment(const Vec& p, const Vec& a, const Vec& b) {
  const Vec ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  const double s = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + s * ab)).norm();
}

struct Probe {
  Vec p;
  std::vector<double> d;  // distance to each target segment
  double dist = 0.0;      // min over d
};

Probe probe(const Vec& p, const GraphChain& target) {
  Probe out{p, std::vector<double>(target.segments()), std::numeric_limits<double>::infinity()};
  for (std::size_t j = 0; j < target.segments(); ++j) {
    out.d[j] = point_segment(p, target.vertices[j], target.vertices[j + 1]);
    out.dist = std::min(out.dist, out.d[j]);
  }
  return out;
}

struct Piece {
  Probe a;
  Probe b;
  double upper;  // bound on the distance anywhere on the piece
  bool operator<(const Piece& o) const { return upper < o.upper; }
};

double piece_bound(const Probe& a, const Probe& b) {
  double best = 0.5 * (a.dist + b.dist + (b.p - a.p).norm());
  for (std::size_t j = 0; j < a.d.size(); ++j) best = std::min(best, std::max(a.d[j], b.d[j]));
  return best;
}

double directed(const GraphChain& from, const GraphChain& to, const HausdorffOptions& opt) {
  std::priority_queue<Piece> queue;
  double lower = 0.0;
  long evaluations = 0;
  std::vector<Probe> probes;
  for (const auto& v : from.vertices) {
    probes.push_back(probe(v, to));
    lower = std::max(lower, probes.back().dist);
  }
  evaluations += static_cast<long>(probes.size());
  if (from.segments() == 0) return lower;
  for (std::size_t i = 0; i + 1 < probes.size(); ++i) {
    const double ub = piece_bound(probes[i], probes[i + 1]);
    if (ub > lower + opt.eps) queue.push({probes[i], probes[i + 1], ub});
  }
  while (!queue.empty()) {
    Piece top = queue.top();
    queue.pop();
    if (top.upper <= lower + opt.eps) break;
    Probe mid = probe(0.5 * (top.a.p + top.b.p), to);
    if (++evaluations > opt.max_evaluations) throw ConvergenceError("hausdorff: evaluation budget exhausted");
    lower = std::max(lower, mid.dist);
    const double u1 = piece_bound(top.a, mid);
    const double u2 = piece_bound(mid, top.b);
    if (u1 > lower + opt.eps) queue.push({top.a, mid, u1});
    if (u2 > lower + opt.eps) queue.push({std::move(mid), std::move(top.b), u2});
  }
  return lower;
}

/// int_0^len |p + q s| ds.
double abs_affine_integral(const Vec& p, const Vec& q, double len) {
  if (len <= 0.0) return 0.0;
  const double qn = q.norm();
  const double pn = p.norm();
  if (qn == 0.0) return pn * len;
  if (p.size() == 1) {
    const double a = p[0], b = p[0] + q[0] * len;
    if ((a >= 0) == (b >= 0) || a == 0.0 || b == 0.0) return 0.5 * (std::abs(a) + std::abs(b)) * len;
    const double root = -a / q[0];
    return 0.5 * (std::abs(a) * root + std::abs(b) * (len - root));
  }
  if (qn * len < 0.25 * pn) {
    // Well away from zero the integrand is smooth; the closed form would cancel.
    return integrate([&](double s) { return Vec(p + q * s).norm(); }, 0.0, len);
  }
  // |p + q s| = |q| sqrt((s + z0)^2 + rho^2).
  const double z0 = p.dot(q) / (qn * qn);
  const double rho2 = std::max(0.0, (p - z0 * q).squaredNorm() / (qn * qn));
  const double rho = std::sqrt(rho2);
  auto antiderivative = [&](double z) {
    if (rho == 0.0) return 0.5 * z * std::abs(z);
    return 0.5 * (z * std::sqrt(z * z + rho2) + rho2 * std::asinh(z / rho));
  };
  return qn * (antiderivative(len + z0) - antiderivative(z0));
}

void same_dim(const CadlagPath& g, const CadlagPath& h, const char* what) {
  if (g.dimension() != h.dimension()) throw ConfigError(std::string(what) + ": paths differ in dimension");
}

}  // namespace

GraphChain completed_graph(const CadlagPath& path, bool modified) {
  GraphChain chain;
  auto push = [&](Vec p) {
    if (chain.vertices.empty() || chain.vertices.back() != p) chain.vertices.push_back(std::move(p));
  };
  std::vector<std::pair<double, std::pair<Vec, Vec>>> events;
  const Vec start = walk_events(path, [&](double t, const Vec& left, const Vec& right) {
    events.push_back({t, {left, right}});
  });
  if (modified) push(point(0.0, Vec::Zero(path.dimension())));
  push(point(0.0, start));
  for (const auto& [t, lr] : events) {
    push(point(t, lr.first));
    push(point(t, lr.second));
  }
  return chain;
}

double hausdorff(const GraphChain& a, const GraphChain& b, HausdorffOptions opt) {
  if (a.vertices.empty() || b.vertices.empty()) throw ConfigError("hausdorff: empty chain");
  if (a.vertices.front().size() != b.vertices.front().size()) throw ConfigError("hausdorff: dimension mismatch");
  return std::max(directed(a, b, opt), directed(b, a, opt));
}

double rho_2(const CadlagPath& g, const CadlagPath& h) {
  same_dim(g, h, "rho_2");
  return hausdorff(completed_graph(g, false), completed_graph(h, false));
}

double rho_2_prime(const CadlagPath& g, const CadlagPath& h) {
  same_dim(g, h, "rho_2_prime");
  return hausdorff(completed_graph(g, true), completed_graph(h, true));
}

double l1_distance(const CadlagPath& g, const CadlagPath& h) {
  same_dim(g, h, "l1_distance");
  const CadlagPath diff = g - h;
  double total = 0.0;
  double t_prev = 0.0;
  const auto& grid = diff.grid();
  std::size_t gi = 0;
  Vec right_prev = diff.value(0.0);
  walk_events(diff, [&](double t, const Vec& /*left*/, const Vec& right) {
    while (gi + 1 < grid.size() && grid[gi + 1] <= t_prev) ++gi;
    total += abs_affine_integral(right_prev, diff.slopes()[gi], t - t_prev);
    right_prev = right;
    t_prev = t;
  });
  return total;
}

double rho_star(const CadlagPath& g, const CadlagPath& h) {
  same_dim(g, h, "rho_star");
  return l1_distance(g, h) + (g.value(1.0) - h.value(1.0)).norm();
}

}  // namespace ldp
