#pragma once

#include <vector>

#include "ldpkit/linalg.hpp"
#include "ldpkit/path.hpp"

namespace ldp {

/// A connected polygonal chain in [0, 1] x R^d. Each vertex is (t, x) with
/// nondecreasing t; vertical segments encode jumps.
struct GraphChain {
  std::vector<Vec> vertices;
  std::size_t segments() const { return vertices.empty() ? 0 : vertices.size() - 1; }
};

/// Completed graph of a path: at each jump the chain visits (t, h(t-)) and
/// then (t, h(t)). The modified graph additionally starts at (0, 0), so it
/// contains the segment from (0, 0) to (0, h(0)).
GraphChain completed_graph(const CadlagPath& path, bool modified = false);

struct HausdorffOptions {
  /// Certified absolute accuracy of the returned distance.
  double eps = 1e-10;
  long max_evaluations = 50'000'000;
};

/// Hausdorff distance between two chains. Branch and bound on each segment:
/// the distance to a chain is 1-Lipschitz in arc length and, per target
/// segment, convex along a segment, which gives the pruning bounds.
double hausdorff(const GraphChain& a, const GraphChain& b, HausdorffOptions opt = {});

/// rho_2: Hausdorff distance between the completed graphs.
double rho_2(const CadlagPath& g, const CadlagPath& h);
/// rho_2': Hausdorff distance between the modified completed graphs.
double rho_2_prime(const CadlagPath& g, const CadlagPath& h);

/// int_0^1 |g(s) - h(s)| ds, exact for this path class.
double l1_distance(const CadlagPath& g, const CadlagPath& h);
/// rho_*: l1_distance + |g(1) - h(1)|.
double rho_star(const CadlagPath& g, const CadlagPath& h);

}  // namespace ldp
