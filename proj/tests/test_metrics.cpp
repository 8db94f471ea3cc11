#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "ldpkit/metrics.hpp"
#include "ldpkit/path.hpp"

using namespace ldp;

namespace {
CadlagPath constant(double c) { return CadlagPath::scalar({0.0, 1.0}, {0.0}, {{0.0, c}}); }
CadlagPath indicator(double from) { return CadlagPath::scalar({0.0, 1.0}, {0.0}, {{from, 1.0}}); }
}  // namespace

TEST_CASE("completed graphs") {
  CHECK(completed_graph(CadlagPath(1)).segments() == 1);
  const GraphChain g = completed_graph(indicator(0.5));
  CHECK(g.segments() == 3);
  CHECK(g.vertices[1][0] == 0.5);
  CHECK(g.vertices[2][0] == 0.5);
  const GraphChain m = completed_graph(constant(1.0), true);
  CHECK(m.vertices.front() == Vec::Zero(2));
  CHECK(m.vertices[1][1] == 1.0);
}

TEST_CASE("rho_2 and rho_2'") {
  CHECK(rho_2(CadlagPath(1), constant(0.7)) == doctest::Approx(0.7).epsilon(1e-9));
  CHECK(rho_2_prime(CadlagPath(1), constant(0.7)) == doctest::Approx(0.7).epsilon(1e-9));
  CHECK(rho_2(CadlagPath(1), indicator(0.5)) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(rho_2_prime(constant(1.0), indicator(0.1)) == doctest::Approx(0.1).epsilon(1e-9));
  CHECK(rho_2(constant(1.0), indicator(0.1)) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("rho_* and l1") {
  CHECK(rho_star(CadlagPath(1), indicator(0.5)) == doctest::Approx(1.5));
  CHECK(rho_star(indicator(0.3), indicator(0.3)) == 0.0);
  CHECK(rho_star(CadlagPath(1), constant(-0.4)) == doctest::Approx(0.8));
  CHECK(l1_distance(CadlagPath::scalar({0.0, 1.0}, {1.0}), CadlagPath(1)) == doctest::Approx(0.5));
  // A crossing inside a cell: |t - 1/2| integrates to 1/4.
  CHECK(l1_distance(CadlagPath::scalar({0.0, 1.0}, {1.0}), constant(0.5)) == doctest::Approx(0.25));
}

TEST_CASE("hausdorff of plain chains against brute force") {
  auto seg = [](double px, double py, double ax, double ay, double bx, double by) {
    const double vx = bx - ax, vy = by - ay;
    const double u = std::clamp(((px - ax) * vx + (py - ay) * vy) / (vx * vx + vy * vy), 0.0, 1.0);
    return std::hypot(px - ax - u * vx, py - ay - u * vy);
  };
  const GraphChain a{{(Vec(2) << 0, 0).finished(), (Vec(2) << 1, 0).finished()}};
  const GraphChain b{{(Vec(2) << 0, 1).finished(), (Vec(2) << 1, 2).finished()}};
  double brute = 0.0;
  for (int i = 0; i <= 2000; ++i) {
    const double s = i / 2000.0;
    brute = std::max(brute, seg(s, 0, 0, 1, 1, 2));
    brute = std::max(brute, seg(s, 1 + s, 0, 0, 1, 0));
  }
  CHECK(brute == doctest::Approx(2.0));
  CHECK(hausdorff(a, b) == doctest::Approx(brute).epsilon(1e-9));
  CHECK(hausdorff(a, a) == 0.0);
}
