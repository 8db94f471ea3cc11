#include <cmath>

#include "doctest.h"
#include "ldpkit/cgf.hpp"
#include "ldpkit/errors.hpp"
#include "ldpkit/kernel.hpp"
#include "ldpkit/path.hpp"

using namespace ldp;

namespace {
CadlagPath updown() { return CadlagPath::scalar({0.0, 1.0}, {0.0}, {{1.0 / 3.0, 1.0}, {2.0 / 3.0, -1.0}}); }
CadlagPath t_plus_jump() { return CadlagPath::scalar({0.0, 1.0}, {1.0}, {{0.5, 2.0}}); }
CadlagPath quadratic(int pieces) {
  std::vector<double> grid, slopes;
  for (int i = 0; i <= pieces; ++i) grid.push_back(static_cast<double>(i) / pieces);
  // Exact cell averages of h'(t) = 3t.
  for (int i = 0; i < pieces; ++i) slopes.push_back(1.5 * (grid[i] + grid[i + 1]));
  return CadlagPath::scalar(grid, slopes);
}
}  // namespace

TEST_CASE("var") {
  CHECK(var(updown()) == doctest::Approx(2.0));
  CHECK(var(CadlagPath::scalar({0.0, 1.0}, {-2.5})) == doctest::Approx(2.5));
  CHECK(var(t_plus_jump()) == doctest::Approx(3.0));
}

TEST_CASE("lebesgue_split") {
  auto [a, s] = lebesgue_split(updown());
  CHECK(a == CadlagPath(1));
  CHECK(s == updown());
  std::tie(a, s) = lebesgue_split(t_plus_jump());
  CHECK(a == CadlagPath::scalar({0.0, 1.0}, {1.0}));
  CHECK(s == CadlagPath::scalar({0.0, 1.0}, {0.0}, {{0.5, 2.0}}));
  std::tie(a, s) = lebesgue_split(CadlagPath(1));
  CHECK(a == CadlagPath(1));
  CHECK(s == CadlagPath(1));
}

TEST_CASE("directional decomposition") {
  SphericalMeasure m = directional(updown());
  REQUIRE(m.atoms.size() == 2);
  CHECK(m.total_mass() == doctest::Approx(2.0));
  m = directional(CadlagPath::scalar({0.0, 1.0}, {1.0}, {{0.5, -2.0}}));
  REQUIRE(m.atoms.size() == 1);
  CHECK(m.atoms[0].direction[0] == -1.0);
  CHECK(m.atoms[0].mass == 2.0);
  Vec j(2);
  j << 3.0, 4.0;
  m = directional(CadlagPath(2, {0.0, 1.0}, {Vec::Zero(2)}, {{0.5, j}}));
  REQUIRE(m.atoms.size() == 1);
  CHECK(m.atoms[0].direction[0] == doctest::Approx(0.6));
  CHECK(m.atoms[0].direction[1] == doctest::Approx(0.8));
  CHECK(m.atoms[0].mass == doctest::Approx(5.0));
}

TEST_CASE("i_d") {
  auto g = parse_model("gaussian:mu=0,sigma=1");
  CHECK(i_d(quadratic(200), *g).value() == doctest::Approx(1.5).epsilon(1e-4));
  CHECK(i_d(t_plus_jump(), *g).is_pos_inf());
  CHECK(i_d(CadlagPath::scalar({0.0, 1.0}, {0.0}, {{0.5, 1.0}}), *parse_model("cexp")).value() ==
        doctest::Approx(1.0));
}

TEST_CASE("partition_action increases towards i_d") {
  auto g = parse_model("gaussian:mu=0,sigma=1");
  const CadlagPath h = quadratic(8);
  const double coarse = partition_action(h, *g, {0.5}).value();
  const double fine = partition_action(h, *g, {0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875}).value();
  CHECK(coarse <= fine);
  CHECK(fine == doctest::Approx(i_d(h, *g).value()).epsilon(1e-12));
  CHECK_THROWS(partition_action(h, *g, {1.5}));
}

TEST_CASE("pair") {
  const Kernel t = Kernel::affine(0.0, 1.0);
  CHECK(pair(t, quadratic(64))[0] == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(pair(Kernel::constant(1.0), t_plus_jump())[0] == doctest::Approx(t_plus_jump().value(1.0)[0]));
  CHECK(pair(t, CadlagPath::scalar({0.0, 1.0}, {0.0}, {{0.5, 1.0}}))[0] == doctest::Approx(0.5));
}

TEST_CASE("sup_functional") {
  CHECK(sup_functional(CadlagPath::scalar({0.0, 1.0}, {1.0}), scalar_vec(1.0)) == doctest::Approx(1.0));
  CHECK(sup_functional(updown(), scalar_vec(-1.0)) == doctest::Approx(0.0));
  Vec up(2), down(2), l(2);
  up << 1.0, -1.0;
  l << 1.0, 0.0;
  CadlagPath h(2, {0.0, 1.0}, {up}, {{0.0, (Vec(2) << 0.0, 1.0).finished()}});
  CHECK(sup_functional(h, l) == doctest::Approx(1.0));
}

TEST_CASE("serialisation round trip") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const CadlagPath h = random_path(1 + static_cast<int>(seed % 2), 5, 3, seed);
    CHECK(parse_path(to_text(h)) == h);
    CHECK(parse_path(to_json(h)) == h);
  }
  CHECK_THROWS_AS(parse_path("dim: 1\ngrid: 0 0.5\n"), ConfigError);
}

TEST_CASE("canonical form") {
  const CadlagPath a = CadlagPath::scalar({0.0, 0.5, 1.0}, {1.0, 1.0}, {{0.5, 1.0}, {0.5, -1.0}});
  CHECK(a == CadlagPath::scalar({0.0, 1.0}, {1.0}));
  CHECK(a.grid().size() == 2);
}
