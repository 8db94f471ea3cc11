#include <cmath>

#include "doctest.h"
#include "ldpkit/cgf.hpp"
#include "ldpkit/errors.hpp"
#include "ldpkit/kernel.hpp"
#include "ldpkit/kernel_rate.hpp"
#include "ldpkit/path.hpp"

using namespace ldp;

namespace {
Vec v1(double x) { return scalar_vec(x); }
const Kernel kT = Kernel::affine(0.0, 1.0);
const Kernel kOne = Kernel::constant(1.0);
}  // namespace

TEST_CASE("e_f and its gradient") {
  auto g = parse_model("gaussian:mu=0,sigma=1");
  CHECK(e_f(*g, kT, v1(3.0)).value() == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(e_f(*g, kT, v1(0.0)).value() == 0.0);
  CHECK(e_f(*parse_model("cexp"), kOne, v1(0.5)).value() == doctest::Approx(0.1931471805599453).epsilon(1e-12));
  CHECK(e_f(*parse_model("cexp"), kT, v1(1.5)).is_pos_inf());
  CHECK(e_f_grad(*g, kT, v1(3.0))[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(e_f_grad(*parse_model("cexp"), kT, v1(0.0))[0] == doctest::Approx(0.0));
  CHECK(e_f_grad(*parse_model("synthetic-boundary"), kT, v1(1.0))[0] ==
        doctest::Approx(7.0 / 30.0).epsilon(1e-12));
}

TEST_CASE("d_f and m_plus_minus") {
  DomainInterval d = d_f(*parse_model("cexp"), kT);
  CHECK(d.lower.is_neg_inf());
  CHECK(d.upper.value() == 1.0);
  CHECK_FALSE(d.upper_closed);
  CHECK(d_f(*parse_model("gaussian:mu=0,sigma=1"), kT) == DomainInterval::real_line());
  d = d_f(*parse_model("synthetic-boundary"), kT);
  CHECK(d.upper.value() == 1.0);
  CHECK(d.upper_closed);

  auto [mp, mm] = m_plus_minus(*parse_model("cexp"), kT);
  CHECK(mp.value() == 1.0);
  CHECK(mm.is_pos_inf());
  std::tie(mp, mm) = m_plus_minus(*parse_model("gaussian:mu=0,sigma=1"), kT);
  CHECK((mp.is_pos_inf() && mm.is_pos_inf()));
  std::tie(mp, mm) = m_plus_minus(*parse_model("cexp"), Kernel::affine(0.0, -1.0));
  CHECK(mp.is_pos_inf());
  CHECK(mm.value() == 1.0);
}

TEST_CASE("i_f: Gaussian closed form by both routes") {
  auto g = parse_model("gaussian:mu=0,sigma=1");
  const KernelRateResult c = i_f_conjugate(*g, kT, v1(1.0));
  CHECK(c.value.value() == doctest::Approx(1.5).epsilon(1e-10));
  CHECK(c.branch == Branch::interior);
  REQUIRE(c.lambda_star);
  CHECK((*c.lambda_star)[0] == doctest::Approx(3.0).epsilon(1e-8));
  CHECK(i_f_explicit(*g, kT, v1(1.0)).value.value() == doctest::Approx(1.5).epsilon(1e-10));
}

TEST_CASE("i_f: reduction to Cramer and infinite values") {
  for (const char* spec : {"cexp", "rademacher", "laplace", "gaussian:mu=0,sigma=1"}) {
    auto m = parse_model(spec);
    CHECK(i_f_conjugate(*m, kOne, m->mean()).value.value() == doctest::Approx(0.0).scale(1.0));
    CHECK(i_f_explicit(*m, kOne, m->mean()).value.value() == doctest::Approx(0.0).scale(1.0));
  }
  auto ce = parse_model("cexp");
  CHECK(i_f_conjugate(*ce, kOne, v1(1.0)).value.value() == doctest::Approx(1.0 - std::log(2.0)).epsilon(1e-10));
  CHECK(i_f_explicit(*ce, kOne, v1(1.0)).value.value() == doctest::Approx(1.0 - std::log(2.0)).epsilon(1e-10));
  CHECK(i_f_conjugate(*ce, kOne, v1(-1.5)).value.is_pos_inf());
  CHECK(i_f_explicit(*ce, kOne, v1(-1.5)).value.is_pos_inf());
}

TEST_CASE("i_f: singular branch of the synthetic boundary model") {
  auto sb = parse_model("synthetic-boundary");
  const KernelRateResult e = i_f_explicit(*sb, kT, v1(1.0));
  CHECK(e.value.value() == doctest::Approx(0.9).epsilon(1e-8));
  CHECK(e.branch == Branch::singular_plus);
  CHECK(e.sup_ef_prime->value() == doctest::Approx(7.0 / 30.0).epsilon(1e-10));
  CHECK(i_f_conjugate(*sb, kT, v1(1.0)).value.value() == doctest::Approx(0.9).epsilon(1e-8));
  // Affine with slope M_+ = 1 past sup E_f'.
  const double a = i_f_explicit(*sb, kT, v1(2.0)).value.value();
  CHECK(a - e.value.value() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("minimizer") {
  auto g = parse_model("gaussian:mu=0,sigma=1");
  const CadlagPath h = minimizer(*g, kT, v1(1.0));
  for (double t : {0.25, 0.5, 1.0}) CHECK(h.value(t)[0] == doctest::Approx(1.5 * t * t).epsilon(1e-6));
  CHECK(pair(kT, h)[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(i_d(h, *g).value() == doctest::Approx(1.5).epsilon(1e-6));

  const CadlagPath line = minimizer(*parse_model("cexp"), kOne, v1(1.0));
  CHECK(line.value(0.3)[0] == doctest::Approx(0.3).epsilon(1e-10));
  CHECK(line.jumps().empty());

  auto sb = parse_model("synthetic-boundary");
  const CadlagPath s = minimizer(*sb, kT, v1(1.0));
  REQUIRE(s.jumps().size() == 1);
  CHECK(s.jumps()[0].time == 1.0);
  CHECK(pair(kT, s)[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(i_d(s, *sb).value() == doctest::Approx(0.9).epsilon(1e-6));
}

TEST_CASE("variational_rate") {
  auto g = parse_model("gaussian:mu=0,sigma=1");
  CHECK(variational_rate(*g, kT, v1(1.0), 200).value() == doctest::Approx(1.5).epsilon(1e-3));
  CHECK(variational_rate(*parse_model("cexp"), kOne, v1(1.0), 1).value() ==
        doctest::Approx(1.0 - std::log(2.0)).epsilon(1e-9));
  CHECK(std::abs(variational_rate(*parse_model("synthetic-boundary"), kT, v1(1.0), 200).value() - 0.9) < 2e-3);
}
