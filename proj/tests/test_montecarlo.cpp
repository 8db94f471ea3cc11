#include <cmath>
#include <set>

#include "doctest.h"
#include "ldpkit/cgf.hpp"
#include "ldpkit/errors.hpp"
#include "ldpkit/kernel.hpp"
#include "ldpkit/kernel_rate.hpp"
#include "ldpkit/montecarlo.hpp"
#include "ldpkit/path.hpp"

using namespace ldp;

namespace {
const Kernel kT = Kernel::affine(0.0, 1.0);
const Kernel kOne = Kernel::constant(1.0);
const Vec kL = scalar_vec(1.0);

double sum_k2(int n) { return n * (n + 1.0) * (2.0 * n + 1.0) / 6.0; }
}  // namespace

TEST_CASE("sample_weighted_sum: Gaussian variance and Rademacher support") {
  auto g = parse_model("gaussian:mu=0,sigma=1");
  const int n = 20, draws = 100000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < draws; ++i) {
    const double w = sample_weighted_sum(*g, kT, n, 1000 + i)[0];
    s += w, s2 += w * w;
  }
  const double var = s2 / draws - (s / draws) * (s / draws);
  const double exact = sum_k2(n) / std::pow(n, 4);
  // Standard deviation of the sample variance of a normal law: exact * sqrt(2 / draws).
  CHECK(std::abs(var - exact) < 3.0 * exact * std::sqrt(2.0 / draws));

  std::set<double> seen;
  for (int i = 0; i < 200; ++i) seen.insert(sample_weighted_sum(*parse_model("rademacher"), kOne, 3, i)[0]);
  for (double v : seen) {
    bool ok = false;
    for (double e : {-1.0, -1.0 / 3.0, 1.0 / 3.0, 1.0}) ok = ok || std::abs(v - e) < 1e-15;
    CHECK(ok);
  }
  CHECK(seen.size() == 4);
  CHECK_THROWS(sample_weighted_sum(*parse_model("synthetic-boundary"), kOne, 3, 1));
}

TEST_CASE("sample_traj identities") {
  auto m = parse_model("cexp");
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const CadlagPath h = sample_traj(*m, 50, seed);
    CHECK(pair(kT, h)[0] == sample_weighted_sum(*m, kT, 50, seed)[0]);
    double abs_sum = 0.0, sum = 0.0;
    for (const auto& j : h.jumps()) abs_sum += std::abs(j.size[0]), sum += j.size[0];
    CHECK(var(h) == doctest::Approx(abs_sum).epsilon(1e-15));
    CHECK(h.value(1.0)[0] == doctest::Approx(sum).epsilon(1e-15));
  }
}

TEST_CASE("exact_tail_oracle") {
  auto g = parse_model("gaussian:mu=0,sigma=1");
  const double z = 0.5 / std::sqrt(sum_k2(200) / std::pow(200.0, 4));
  CHECK(exact_tail_oracle(*g, kT, 200, 0.5, kL).value() ==
        doctest::Approx(std::log(0.5 * std::erfc(z / std::sqrt(2.0)))).epsilon(1e-10));

  // Binomial tail sum_{k >= 75} C(100, k) / 2^100.
  double tail = 0.0;
  for (int k = 75; k <= 100; ++k) tail += std::exp(std::lgamma(101.0) - std::lgamma(k + 1.0) - std::lgamma(101.0 - k));
  auto r = parse_model("rademacher");
  CHECK(exact_tail_oracle(*r, kOne, 100, 0.5, kL).value() ==
        doctest::Approx(std::log(tail) - 100 * std::log(2.0)).epsilon(1e-10));

  // Enumeration over 2^10 sign patterns with weights k/10.
  int hits = 0;
  for (int mask = 0; mask < 1024; ++mask) {
    double w = 0.0;
    for (int k = 1; k <= 10; ++k) w += (mask >> (k - 1) & 1 ? 1.0 : -1.0) * (k / 10.0) / 10.0;
    hits += w >= 0.3 - 1e-12;
  }
  CHECK(exact_tail_oracle(*r, kT, 10, 0.3, kL).value() == doctest::Approx(std::log(hits / 1024.0)).epsilon(1e-12));
  CHECK_FALSE(exact_tail_oracle(*parse_model("cexp"), kOne, 10, 0.3, kL).has_value());
}

TEST_CASE("estimate_tail") {
  auto g = parse_model("gaussian:mu=0,sigma=1");
  const McEstimate e = estimate_tail(*g, kT, 200, 0.5, kL, 20000, 11);
  CHECK(e.rate_estimate >= 0.36);
  CHECK(e.rate_estimate <= 0.43);
  CHECK(e.std_error >= 0.0);
  CHECK(estimate_tail(*g, kT, 200, 0.0, kL, 20000, 11).rate_estimate <= 0.05);

  auto r = parse_model("rademacher");
  const McEstimate b = estimate_tail(*r, kOne, 100, 0.5, kL, 20000, 5);
  const double exact = exact_tail_oracle(*r, kOne, 100, 0.5, kL).value();
  CHECK(std::abs(b.log_prob - exact) <= 3.0 * b.std_error);
  CHECK_THROWS(estimate_tail(*g, kT, 200, 0.5, kL, 10, 11));
}

TEST_CASE("estimate_tail is independent of the worker count") {
  auto m = parse_model("cexp");
  McOptions one{1, true}, four{4, true};
  const McEstimate a = estimate_tail(*m, kT, 40, 0.3, kL, 5000, 3, one);
  const McEstimate b = estimate_tail(*m, kT, 40, 0.3, kL, 5000, 3, four);
  CHECK(a.log_prob == b.log_prob);
  CHECK(a.std_error == b.std_error);
}

TEST_CASE("tilted and plain estimators agree at moderate levels") {
  auto m = parse_model("rademacher");
  const McEstimate t = estimate_tail(*m, kOne, 50, 0.2, kL, 40000, 21);
  const McEstimate p = estimate_tail(*m, kOne, 50, 0.2, kL, 40000, 22, McOptions{0, false});
  const double pt = std::exp(t.log_prob), pp = std::exp(p.log_prob);
  const double joint = std::hypot(pt * t.std_error, pp * p.std_error);
  CHECK(std::abs(pt - pp) <= 3.0 * joint);
}

TEST_CASE("empirical_rate_curve") {
  auto g = parse_model("gaussian:mu=0,sigma=1");
  const auto rows = empirical_rate_curve(*g, kT, {0.5}, {50, 200}, 5000, 1, kL);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].n == 50);
  CHECK(rows[1].i_f == doctest::Approx(0.375).epsilon(1e-10));
  REQUIRE(rows[1].exact_rate);
  CHECK(*rows[1].exact_rate == doctest::Approx(0.392).epsilon(5e-3));
}
