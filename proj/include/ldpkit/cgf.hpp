#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "ldpkit/domain.hpp"
#include "ldpkit/ext_real.hpp"
#include "ldpkit/linalg.hpp"

namespace ldp {

/// Slopes c1 > 0 and offset c2 with I(v) >= c1 |v| - c2 for every v.
struct LinearMinorant {
  double c1 = 0.0;
  double c2 = 0.0;
};

/// Cumulant generating function K = log E exp(u . X) of an increment law,
/// together with the pieces of convex analysis built on it: the effective
/// domain D_L, the rate function I = K*, its recession function I_inf and
/// exponentially tilted samplers.
///
/// For d > 1 only D_L = R^d is representable.
class CgfModel {
 public:
  virtual ~CgfModel() = default;

  /// Canonical spec string; parse_model(id()) rebuilds an equal model.
  virtual std::string id() const = 0;
  virtual int dimension() const { return 1; }

  /// D_L for d = 1; the real line for full-space models.
  virtual DomainInterval domain() const { return DomainInterval::real_line(); }
  bool full_space() const;

  virtual Vec mean() const = 0;

  /// K(u); +inf outside D_L.
  virtual ExtReal cumulant(const Vec& u) const = 0;
  /// Gradient on D_L. At a closed finite endpoint this is the one-sided
  /// derivative. Throws DomainError elsewhere.
  virtual Vec gradient(const Vec& u) const = 0;
  /// Hessian on the interior of D_L.
  virtual Mat hessian(const Vec& u) const = 0;

  /// Closed-form rate I(v), if the model has one.
  virtual std::optional<ExtReal> closed_rate(const Vec& /*v*/) const { return std::nullopt; }
  /// Derivatives of the closed-form rate on the interior of its domain.
  virtual Vec rate_gradient(const Vec& v) const;
  virtual Mat rate_hessian(const Vec& v) const;
  /// Where I is finite (d = 1): closed ends are finite values of I.
  virtual DomainInterval rate_domain() const { return DomainInterval::real_line(); }

  /// I_inf(l) = sup{u . l : u in D_L}.
  virtual ExtReal recession(const Vec& l) const;
  /// One-sided limit K'(b-) at the upper (or K'(a+) at the lower) end of D_L.
  /// At an infinite end this is the essential sup (inf) of X.
  ExtReal boundary_slope(bool upper) const;

  virtual LinearMinorant linear_minorant() const;

  virtual bool has_sampler() const { return true; }
  /// One draw from the law with density exp(theta . x - K(theta)) relative to X.
  virtual Vec draw_tilted(std::mt19937_64& rng, const Vec& theta) const = 0;

  std::vector<Vec> sample(std::size_t count, std::uint64_t seed) const;
  std::vector<Vec> tilted_sample(const Vec& theta, std::size_t count, std::uint64_t seed) const;

 protected:
  void check_dim(const Vec& v, const char* what) const;
  void require_sampler() const;
};

using ModelPtr = std::shared_ptr<const CgfModel>;

/// Gaussian N(mu, Sigma) in any dimension; Sigma may be singular.
class GaussianModel final : public CgfModel {
 public:
  GaussianModel(Vec mu, Mat sigma);
  static std::shared_ptr<GaussianModel> standard(int d = 1);

  std::string id() const override;
  int dimension() const override { return static_cast<int>(mu_.size()); }
  Vec mean() const override { return mu_; }
  const Mat& covariance() const { return sigma_; }
  int support_rank() const { return rank_; }

  ExtReal cumulant(const Vec& u) const override;
  Vec gradient(const Vec& u) const override;
  Mat hessian(const Vec& u) const override;
  std::optional<ExtReal> closed_rate(const Vec& v) const override;
  Vec rate_gradient(const Vec& v) const override;
  Mat rate_hessian(const Vec& v) const override;
  LinearMinorant linear_minorant() const override;
  Vec draw_tilted(std::mt19937_64& rng, const Vec& theta) const override;

 private:
  Vec mu_;
  Mat sigma_;
  Mat pinv_;
  Mat range_projector_;
  Mat root_;
  int rank_ = 0;
};

/// X = Y - 1 with Y ~ Exp(1): K(u) = -u - log(1 - u) on (-inf, 1).
class CenteredExpModel final : public CgfModel {
 public:
  std::string id() const override { return "cexp"; }
  DomainInterval domain() const override;
  Vec mean() const override { return scalar_vec(0.0); }
  ExtReal cumulant(const Vec& u) const override;
  Vec gradient(const Vec& u) const override;
  Mat hessian(const Vec& u) const override;
  std::optional<ExtReal> closed_rate(const Vec& v) const override;
  Vec rate_gradient(const Vec& v) const override;
  Mat rate_hessian(const Vec& v) const override;
  DomainInterval rate_domain() const override;
  Vec draw_tilted(std::mt19937_64& rng, const Vec& theta) const override;
};

/// Symmetric +-1 signs: K(u) = log cosh u.
class RademacherModel final : public CgfModel {
 public:
  std::string id() const override { return "rademacher"; }
  Vec mean() const override { return scalar_vec(0.0); }
  ExtReal cumulant(const Vec& u) const override;
  Vec gradient(const Vec& u) const override;
  Mat hessian(const Vec& u) const override;
  std::optional<ExtReal> closed_rate(const Vec& v) const override;
  Vec rate_gradient(const Vec& v) const override;
  Mat rate_hessian(const Vec& v) const override;
  DomainInterval rate_domain() const override;
  Vec draw_tilted(std::mt19937_64& rng, const Vec& theta) const override;
};

/// X = N - r with N ~ Poisson(r): K(u) = r (e^u - 1 - u).
class PoissonCenteredModel final : public CgfModel {
 public:
  explicit PoissonCenteredModel(double rate = 1.0);
  std::string id() const override;
  double rate() const { return rate_; }
  Vec mean() const override { return scalar_vec(0.0); }
  ExtReal cumulant(const Vec& u) const override;
  Vec gradient(const Vec& u) const override;
  Mat hessian(const Vec& u) const override;
  std::optional<ExtReal> closed_rate(const Vec& v) const override;
  Vec rate_gradient(const Vec& v) const override;
  Mat rate_hessian(const Vec& v) const override;
  DomainInterval rate_domain() const override;
  Vec draw_tilted(std::mt19937_64& rng, const Vec& theta) const override;

 private:
  double rate_;
};

/// Standard Laplace law: K(u) = -log(1 - u^2) on (-1, 1). Mean zero with a
/// bounded effective domain.
class LaplaceModel final : public CgfModel {
 public:
  std::string id() const override { return "laplace"; }
  DomainInterval domain() const override;
  Vec mean() const override { return scalar_vec(0.0); }
  ExtReal cumulant(const Vec& u) const override;
  Vec gradient(const Vec& u) const override;
  Mat hessian(const Vec& u) const override;
  std::optional<ExtReal> closed_rate(const Vec& v) const override;
  Vec rate_gradient(const Vec& v) const override;
  Mat rate_hessian(const Vec& v) const override;
  Vec draw_tilted(std::mt19937_64& rng, const Vec& theta) const override;
};

/// A CGF-shaped test function with a closed effective domain and a finite
/// derivative at its boundary: K(u) = u + 2/3 ((1 - u)^{3/2} - 1) on
/// (-inf, 1], K'(1) = 1. It has no sampler.
class SyntheticBoundaryModel final : public CgfModel {
 public:
  std::string id() const override { return "synthetic-boundary"; }
  DomainInterval domain() const override;
  Vec mean() const override { return scalar_vec(0.0); }
  ExtReal cumulant(const Vec& u) const override;
  Vec gradient(const Vec& u) const override;
  Mat hessian(const Vec& u) const override;
  std::optional<ExtReal> closed_rate(const Vec& v) const override;
  Vec rate_gradient(const Vec& v) const override;
  Mat rate_hessian(const Vec& v) const override;
  bool has_sampler() const override { return false; }
  Vec draw_tilted(std::mt19937_64& rng, const Vec& theta) const override;
};

/// Parses `gaussian:mu=0,sigma=1`, `gaussian:d=2`, `gaussian:mu=0/1,cov=1/0/0/2`,
/// `cexp`, `rademacher`, `poisson:rate=2`, `laplace`, `synthetic-boundary`.
ModelPtr parse_model(std::string_view spec);

// Free-function surface.

ExtReal cgf_eval(const CgfModel& model, const Vec& u);
/// Gradient at an interior point of D_L; boundary and exterior points throw.
Vec cgf_grad(const CgfModel& model, const Vec& u);
/// Requires |l| = 1.
ExtReal recession(const CgfModel& model, const Vec& l);
/// Closed-form rate, or nullopt when the caller must use the numerical conjugate.
std::optional<ExtReal> rate_closed(const CgfModel& model, const Vec& v);

}  // namespace ldp
