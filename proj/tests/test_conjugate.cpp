#include <cmath>

#include "doctest.h"
#include "ldpkit/cgf.hpp"
#include "ldpkit/conjugate.hpp"
#include "ldpkit/errors.hpp"

using namespace ldp;

namespace {
ConvexOracle half_square() {
  ConvexOracle g;
  g.eval = [](const Vec& u) { return ExtReal(0.5 * u.squaredNorm()); };
  g.grad = [](const Vec& u) { return u; };
  g.hessian = [](const Vec& u) { return Mat::Identity(u.size(), u.size()); };
  return g;
}
}  // namespace

TEST_CASE("legendre: self-conjugate half square") {
  const ConjugateResult r = legendre(half_square(), 2.0);
  CHECK(r.value.value() == doctest::Approx(2.0).epsilon(1e-12));
  REQUIRE(r.argmax);
  CHECK((*r.argmax)[0] == doctest::Approx(2.0).epsilon(1e-10));
  CHECK_FALSE(r.at_boundary);
}

TEST_CASE("legendre: centred exponential") {
  const ConjugateResult r = legendre(cgf_oracle(*parse_model("cexp")), 1.0);
  CHECK(r.value.value() == doctest::Approx(1.0 - std::log(2.0)).epsilon(1e-12));
  REQUIRE(r.argmax);
  CHECK((*r.argmax)[0] == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(legendre(cgf_oracle(*parse_model("cexp")), -1.5).value.is_pos_inf());
  CHECK(legendre(cgf_oracle(*parse_model("cexp")), -1.0).value.is_pos_inf());
}

TEST_CASE("legendre: supremum on the closed boundary") {
  const ConjugateResult r = legendre(cgf_oracle(*parse_model("synthetic-boundary")), 2.0);
  CHECK(r.value.value() == doctest::Approx(5.0 / 3.0).epsilon(1e-12));
  CHECK(r.at_boundary);
  REQUIRE(r.argmax);
  CHECK((*r.argmax)[0] == 1.0);
}

TEST_CASE("legendre: two-dimensional Gaussian") {
  auto g2 = parse_model("gaussian:mu=0.5/-1,cov=2/0.5/0.5/1");
  Vec x(2);
  x << 1.0, 0.0;
  const ExtReal closed = rate_value(*g2, x);
  CHECK(legendre(cgf_oracle(*g2), x).value.value() == doctest::Approx(closed.value()).epsilon(1e-8));
}

TEST_CASE("grad_inverse") {
  ConvexOracle third;
  third.eval = [](const Vec& l) { return ExtReal(l[0] * l[0] / 6.0); };
  third.grad = [](const Vec& l) { return Vec(l / 3.0); };
  GradInverse gi = grad_inverse(third, scalar_vec(1.0));
  REQUIRE(gi.status == GradInverse::Status::ok);
  CHECK((*gi.lambda)[0] == doctest::Approx(3.0).epsilon(1e-10));
  gi = grad_inverse(cgf_oracle(*parse_model("gaussian:mu=0,sigma=1")), scalar_vec(0.7));
  CHECK((*gi.lambda)[0] == doctest::Approx(0.7).epsilon(1e-10));
  gi = grad_inverse(cgf_oracle(*parse_model("cexp")), scalar_vec(1.0));
  CHECK((*gi.lambda)[0] == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(grad_inverse(cgf_oracle(*parse_model("rademacher")), scalar_vec(1.5)).status ==
        GradInverse::Status::above_range);
  CHECK(grad_inverse(cgf_oracle(*parse_model("cexp")), scalar_vec(-1.5)).status ==
        GradInverse::Status::below_range);
}

TEST_CASE("endpoint_slope") {
  CHECK(endpoint_slope(cgf_oracle(*parse_model("synthetic-boundary")), true).value() == doctest::Approx(1.0));
  CHECK(endpoint_slope(cgf_oracle(*parse_model("cexp")), true).is_pos_inf());
  CHECK(endpoint_slope(cgf_oracle(*parse_model("cexp")), false).value() == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(endpoint_slope(cgf_oracle(*parse_model("rademacher")), true).value() == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("Fenchel-Young equality on the catalog") {
  for (const char* spec : {"gaussian:mu=0.3,sigma=1.5", "cexp", "rademacher", "poisson:rate=2", "laplace"}) {
    auto m = parse_model(spec);
    for (double u : {-0.4, 0.1, 0.6}) {
      const double k = cgf_eval(*m, scalar_vec(u)).value();
      const double x = cgf_grad(*m, scalar_vec(u))[0];
      CHECK(rate_value(*m, scalar_vec(x)).value() == doctest::Approx(u * x - k).epsilon(1e-9));
    }
  }
}
