#include "ldpkit/cgf.hpp"

#include <cmath>
#include <map>
#include <numbers>

#include "ldpkit/errors.hpp"
#include "ldpkit/format.hpp"

namespace ldp {

namespace {

double scalar(const Vec& v) { return v[0]; }
Mat scalar_mat(double x) { return Mat::Constant(1, 1, x); }

}  // namespace

// ---------------------------------------------------------------------------
// CgfModel defaults

bool CgfModel::full_space() const {
  const auto d = domain();
  return !d.lower.is_finite() && !d.upper.is_finite();
}

void CgfModel::check_dim(const Vec& v, const char* what) const {
  if (v.size() != dimension())
    throw ConfigError(std::string(what) + ": expected dimension " + std::to_string(dimension()) +
                      ", got " + std::to_string(v.size()));
}

void CgfModel::require_sampler() const {
  if (!has_sampler()) throw UnsupportedError("model '" + id() + "' has no sampler");
}

Vec CgfModel::rate_gradient(const Vec&) const {
  throw UnsupportedError("model '" + id() + "' has no closed-form rate gradient");
}

Mat CgfModel::rate_hessian(const Vec&) const {
  throw UnsupportedError("model '" + id() + "' has no closed-form rate hessian");
}

ExtReal CgfModel::recession(const Vec& l) const {
  check_dim(l, "recession");
  if (dimension() > 1) return l.norm() == 0.0 ? ExtReal(0.0) : ExtReal::inf();
  const double s = l[0];
  const auto dom = domain();
  if (s > 0) return s * dom.upper;
  if (s < 0) return (-s) * (-dom.lower);
  return 0.0;
}

ExtReal CgfModel::boundary_slope(bool upper) const {
  if (dimension() != 1) throw UnsupportedError("boundary_slope is defined for d = 1");
  const auto dom = domain();
  const ExtReal end = upper ? dom.upper : dom.lower;
  if (!end.is_finite()) {
    const auto rd = rate_domain();
    return upper ? rd.upper : rd.lower;
  }
  const bool closed = upper ? dom.upper_closed : dom.lower_closed;
  if (!closed) return upper ? ExtReal::inf() : ExtReal::neg_inf();
  return gradient(scalar_vec(end.value()))[0];
}

LinearMinorant CgfModel::linear_minorant() const {
  if (dimension() != 1) throw UnsupportedError("linear_minorant: no default for d > 1");
  const auto dom = domain();
  const double up = dom.upper.is_finite() ? std::min(1.0, 0.5 * dom.upper.value()) : 1.0;
  const double lo = dom.lower.is_finite() ? std::max(-1.0, 0.5 * dom.lower.value()) : -1.0;
  const double k_up = cumulant(scalar_vec(up)).value();
  const double k_lo = cumulant(scalar_vec(lo)).value();
  return {std::min(up, -lo), std::max(k_up, k_lo)};
}

std::vector<Vec> CgfModel::sample(std::size_t count, std::uint64_t seed) const {
  return tilted_sample(Vec::Zero(dimension()), count, seed);
}

std::vector<Vec> CgfModel::tilted_sample(const Vec& theta, std::size_t count,
                                         std::uint64_t seed) const {
  require_sampler();
  check_dim(theta, "tilted_sample");
  if (dimension() == 1 && !domain().interior(theta[0]))
    throw DomainError("tilted_sample: theta outside the interior of D_L");
  std::mt19937_64 rng(seed);
  std::vector<Vec> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(draw_tilted(rng, theta));
  return out;
}

// ---------------------------------------------------------------------------
// Gaussian

GaussianModel::GaussianModel(Vec mu, Mat sigma) : mu_(std::move(mu)), sigma_(std::move(sigma)) {
  const auto d = mu_.size();
  if (d < 1) throw ConfigError("gaussian: dimension must be positive");
  if (sigma_.rows() != d || sigma_.cols() != d) throw ConfigError("gaussian: covariance shape mismatch");
  if (!sigma_.isApprox(sigma_.transpose(), 1e-12)) throw ConfigError("gaussian: covariance not symmetric");
  Eigen::SelfAdjointEigenSolver<Mat> eig(sigma_);
  const Vec ev = eig.eigenvalues();
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  if (ev.minCoeff() < -1e-12 * scale) throw ConfigError("gaussian: covariance not positive semidefinite");
  Vec inv = Vec::Zero(d);
  Vec root = Vec::Zero(d);
  Vec keep = Vec::Zero(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    if (ev[i] > 1e-12 * scale) {
      inv[i] = 1.0 / ev[i];
      root[i] = std::sqrt(ev[i]);
      keep[i] = 1.0;
      ++rank_;
    }
  }
  if (rank_ == 0) throw ConfigError("gaussian: covariance must not vanish");
  const Mat& q = eig.eigenvectors();
  pinv_ = q * inv.asDiagonal() * q.transpose();
  range_projector_ = q * keep.asDiagonal() * q.transpose();
  root_ = q * root.asDiagonal();
}

std::shared_ptr<GaussianModel> GaussianModel::standard(int d) {
  return std::make_shared<GaussianModel>(Vec::Zero(d), Mat::Identity(d, d));
}

std::string GaussianModel::id() const {
  if (mu_.size() == 1)
    return "gaussian:mu=" + format_double(mu_[0]) + ",sigma=" + format_double(std::sqrt(sigma_(0, 0)));
  std::string s = "gaussian:mu=";
  for (Eigen::Index i = 0; i < mu_.size(); ++i) s += (i ? "/" : "") + format_double(mu_[i]);
  s += ",cov=";
  for (Eigen::Index i = 0; i < sigma_.rows(); ++i)
    for (Eigen::Index j = 0; j < sigma_.cols(); ++j)
      s += (i || j ? "/" : "") + format_double(sigma_(i, j));
  return s;
}

ExtReal GaussianModel::cumulant(const Vec& u) const {
  check_dim(u, "cumulant");
  return mu_.dot(u) + 0.5 * u.dot(sigma_ * u);
}

Vec GaussianModel::gradient(const Vec& u) const {
  check_dim(u, "gradient");
  return mu_ + sigma_ * u;
}

Mat GaussianModel::hessian(const Vec& u) const {
  check_dim(u, "hessian");
  return sigma_;
}

std::optional<ExtReal> GaussianModel::closed_rate(const Vec& v) const {
  check_dim(v, "rate");
  const Vec r = v - mu_;
  const Vec off = r - range_projector_ * r;
  if (off.norm() > 1e-10 * std::max(1.0, r.norm())) return ExtReal::inf();
  return 0.5 * r.dot(pinv_ * r);
}

Vec GaussianModel::rate_gradient(const Vec& v) const {
  check_dim(v, "rate_gradient");
  return pinv_ * (v - mu_);
}

Mat GaussianModel::rate_hessian(const Vec& v) const {
  check_dim(v, "rate_hessian");
  if (rank_ < dimension()) throw UnsupportedError("gaussian: rate hessian needs full-rank covariance");
  return pinv_;
}

LinearMinorant GaussianModel::linear_minorant() const {
  // Supporting planes u . v - K(u) with |u| = 1.
  Eigen::SelfAdjointEigenSolver<Mat> eig(sigma_);
  return {1.0, mu_.norm() + 0.5 * eig.eigenvalues().maxCoeff()};
}

Vec GaussianModel::draw_tilted(std::mt19937_64& rng, const Vec& theta) const {
  std::normal_distribution<double> normal;
  Vec z(mu_.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = normal(rng);
  return mu_ + sigma_ * theta + root_ * z;
}

// ---------------------------------------------------------------------------
// Centered exponential

DomainInterval CenteredExpModel::domain() const {
  return DomainInterval::make(ExtReal::neg_inf(), 1.0, false, false);
}

DomainInterval CenteredExpModel::rate_domain() const {
  return DomainInterval::make(-1.0, ExtReal::inf(), false, false);
}

ExtReal CenteredExpModel::cumulant(const Vec& u) const {
  check_dim(u, "cumulant");
  const double x = scalar(u);
  if (!(x < 1.0)) return ExtReal::inf();
  return -x - std::log1p(-x);
}

Vec CenteredExpModel::gradient(const Vec& u) const {
  check_dim(u, "gradient");
  const double x = scalar(u);
  if (!(x < 1.0)) throw DomainError("cexp: gradient outside D_L");
  return scalar_vec(x / (1.0 - x));
}

Mat CenteredExpModel::hessian(const Vec& u) const {
  check_dim(u, "hessian");
  const double x = scalar(u);
  if (!(x < 1.0)) throw DomainError("cexp: hessian outside D_L");
  return scalar_mat(1.0 / ((1.0 - x) * (1.0 - x)));
}

std::optional<ExtReal> CenteredExpModel::closed_rate(const Vec& v) const {
  check_dim(v, "rate");
  const double x = scalar(v);
  if (!(x > -1.0)) return ExtReal::inf();
  return x - std::log1p(x);
}

Vec CenteredExpModel::rate_gradient(const Vec& v) const {
  const double x = scalar(v);
  if (!(x > -1.0)) throw DomainError("cexp: rate gradient outside dom I");
  return scalar_vec(x / (1.0 + x));
}

Mat CenteredExpModel::rate_hessian(const Vec& v) const {
  const double x = scalar(v);
  if (!(x > -1.0)) throw DomainError("cexp: rate hessian outside dom I");
  return scalar_mat(1.0 / ((1.0 + x) * (1.0 + x)));
}

Vec CenteredExpModel::draw_tilted(std::mt19937_64& rng, const Vec& theta) const {
  std::exponential_distribution<double> expo(1.0 - theta[0]);
  return scalar_vec(expo(rng) - 1.0);
}

// ---------------------------------------------------------------------------
// Rademacher

ExtReal RademacherModel::cumulant(const Vec& u) const {
  check_dim(u, "cumulant");
  const double a = std::abs(scalar(u));
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

Vec RademacherModel::gradient(const Vec& u) const {
  check_dim(u, "gradient");
  return scalar_vec(std::tanh(scalar(u)));
}

Mat RademacherModel::hessian(const Vec& u) const {
  check_dim(u, "hessian");
  const double c = std::cosh(scalar(u));
  return scalar_mat(1.0 / (c * c));
}

DomainInterval RademacherModel::rate_domain() const {
  return DomainInterval::make(-1.0, 1.0, true, true);
}

std::optional<ExtReal> RademacherModel::closed_rate(const Vec& v) const {
  check_dim(v, "rate");
  const double x = scalar(v);
  if (std::abs(x) > 1.0) return ExtReal::inf();
  auto xlogx = [](double y) { return y > 0.0 ? y * std::log(y) : 0.0; };
  return 0.5 * (xlogx(1.0 + x) + xlogx(1.0 - x));
}

Vec RademacherModel::rate_gradient(const Vec& v) const {
  const double x = scalar(v);
  if (!(std::abs(x) < 1.0)) throw DomainError("rademacher: rate gradient outside int dom I");
  return scalar_vec(std::atanh(x));
}

Mat RademacherModel::rate_hessian(const Vec& v) const {
  const double x = scalar(v);
  if (!(std::abs(x) < 1.0)) throw DomainError("rademacher: rate hessian outside int dom I");
  return scalar_mat(1.0 / (1.0 - x * x));
}

Vec RademacherModel::draw_tilted(std::mt19937_64& rng, const Vec& theta) const {
  std::bernoulli_distribution plus(1.0 / (1.0 + std::exp(-2.0 * theta[0])));
  return scalar_vec(plus(rng) ? 1.0 : -1.0);
}

// ---------------------------------------------------------------------------
// Centered Poisson

PoissonCenteredModel::PoissonCenteredModel(double rate) : rate_(rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw ConfigError("poisson: rate must be positive");
}

std::string PoissonCenteredModel::id() const { return "poisson:rate=" + format_double(rate_); }

ExtReal PoissonCenteredModel::cumulant(const Vec& u) const {
  check_dim(u, "cumulant");
  const double x = scalar(u);
  const double k = rate_ * (std::expm1(x) - x);
  if (!std::isfinite(k)) return ExtReal::inf();
  return k;
}

Vec PoissonCenteredModel::gradient(const Vec& u) const {
  check_dim(u, "gradient");
  return scalar_vec(rate_ * std::expm1(scalar(u)));
}

Mat PoissonCenteredModel::hessian(const Vec& u) const {
  check_dim(u, "hessian");
  return scalar_mat(rate_ * std::exp(scalar(u)));
}

DomainInterval PoissonCenteredModel::rate_domain() const {
  return DomainInterval::make(-rate_, ExtReal::inf(), true, false);
}

std::optional<ExtReal> PoissonCenteredModel::closed_rate(const Vec& v) const {
  check_dim(v, "rate");
  const double x = scalar(v);
  if (x < -rate_) return ExtReal::inf();
  if (x == -rate_) return rate_;
  return (x + rate_) * std::log1p(x / rate_) - x;
}

Vec PoissonCenteredModel::rate_gradient(const Vec& v) const {
  const double x = scalar(v);
  if (!(x > -rate_)) throw DomainError("poisson: rate gradient outside int dom I");
  return scalar_vec(std::log1p(x / rate_));
}

Mat PoissonCenteredModel::rate_hessian(const Vec& v) const {
  const double x = scalar(v);
  if (!(x > -rate_)) throw DomainError("poisson: rate hessian outside int dom I");
  return scalar_mat(1.0 / (x + rate_));
}

Vec PoissonCenteredModel::draw_tilted(std::mt19937_64& rng, const Vec& theta) const {
  std::poisson_distribution<long long> pois(rate_ * std::exp(theta[0]));
  return scalar_vec(static_cast<double>(pois(rng)) - rate_);
}

// ---------------------------------------------------------------------------
// Laplace

DomainInterval LaplaceModel::domain() const { return DomainInterval::make(-1.0, 1.0, false, false); }

ExtReal LaplaceModel::cumulant(const Vec& u) const {
  check_dim(u, "cumulant");
  const double x = scalar(u);
  if (!(std::abs(x) < 1.0)) return ExtReal::inf();
  return -std::log1p(-x * x);
}

Vec LaplaceModel::gradient(const Vec& u) const {
  check_dim(u, "gradient");
  const double x = scalar(u);
  if (!(std::abs(x) < 1.0)) throw DomainError("laplace: gradient outside D_L");
  return scalar_vec(2.0 * x / (1.0 - x * x));
}

Mat LaplaceModel::hessian(const Vec& u) const {
  check_dim(u, "hessian");
  const double x = scalar(u);
  if (!(std::abs(x) < 1.0)) throw DomainError("laplace: hessian outside D_L");
  const double q = 1.0 - x * x;
  return scalar_mat(2.0 * (1.0 + x * x) / (q * q));
}

std::optional<ExtReal> LaplaceModel::closed_rate(const Vec& v) const {
  check_dim(v, "rate");
  const double x = scalar(v);
  const double q = std::hypot(1.0, x);
  return (q - 1.0) + std::log(2.0 / (1.0 + q));
}

Vec LaplaceModel::rate_gradient(const Vec& v) const {
  const double x = scalar(v);
  return scalar_vec(x / (1.0 + std::hypot(1.0, x)));
}

Mat LaplaceModel::rate_hessian(const Vec& v) const {
  const double q = std::hypot(1.0, scalar(v));
  return scalar_mat(1.0 / (q * (1.0 + q)));
}

Vec LaplaceModel::draw_tilted(std::mt19937_64& rng, const Vec& theta) const {
  const double t = theta[0];
  std::bernoulli_distribution positive(0.5 * (1.0 + t));
  if (positive(rng)) return scalar_vec(std::exponential_distribution<double>(1.0 - t)(rng));
  return scalar_vec(-std::exponential_distribution<double>(1.0 + t)(rng));
}

// ---------------------------------------------------------------------------
// Synthetic boundary

DomainInterval SyntheticBoundaryModel::domain() const {
  return DomainInterval::make(ExtReal::neg_inf(), 1.0, false, true);
}

ExtReal SyntheticBoundaryModel::cumulant(const Vec& u) const {
  check_dim(u, "cumulant");
  const double x = scalar(u);
  if (x > 1.0) return ExtReal::inf();
  const double s = 1.0 - x;
  return x + (2.0 / 3.0) * (s * std::sqrt(s) - 1.0);
}

Vec SyntheticBoundaryModel::gradient(const Vec& u) const {
  check_dim(u, "gradient");
  const double x = scalar(u);
  if (x > 1.0) throw DomainError("synthetic-boundary: gradient outside D_L");
  return scalar_vec(1.0 - std::sqrt(1.0 - x));
}

Mat SyntheticBoundaryModel::hessian(const Vec& u) const {
  check_dim(u, "hessian");
  const double x = scalar(u);
  if (!(x < 1.0)) throw DomainError("synthetic-boundary: hessian needs an interior point");
  return scalar_mat(0.5 / std::sqrt(1.0 - x));
}

std::optional<ExtReal> SyntheticBoundaryModel::closed_rate(const Vec& v) const {
  check_dim(v, "rate");
  const double x = scalar(v);
  if (x > 1.0) return x - 1.0 / 3.0;
  // 2/3 - s + s^3/3 with s = 1 - x, factored to stay exact near the mean.
  return x * x * (3.0 - x) / 3.0;
}

Vec SyntheticBoundaryModel::rate_gradient(const Vec& v) const {
  const double x = scalar(v);
  if (x > 1.0) return scalar_vec(1.0);
  return scalar_vec(x * (2.0 - x));
}

Mat SyntheticBoundaryModel::rate_hessian(const Vec& v) const {
  const double x = scalar(v);
  return scalar_mat(x > 1.0 ? 0.0 : 2.0 * (1.0 - x));
}

Vec SyntheticBoundaryModel::draw_tilted(std::mt19937_64&, const Vec&) const {
  require_sampler();
  return {};
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

Vec parse_list(const std::string& text) {
  const auto parts = split(text, '/');
  Vec v(static_cast<Eigen::Index>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) v[static_cast<Eigen::Index>(i)] = parse_double(parts[i]);
  return v;
}

ModelPtr make_gaussian(std::map<std::string, std::string> params) {
  int d = 0;
  if (auto it = params.find("d"); it != params.end()) {
    const double dd = parse_double(it->second);
    if (dd < 1 || dd != std::floor(dd)) throw ConfigError("gaussian: d must be a positive integer");
    d = static_cast<int>(dd);
    params.erase(it);
  }
  Vec mu;
  if (auto it = params.find("mu"); it != params.end()) {
    mu = parse_list(it->second);
    params.erase(it);
  }
  if (d == 0) d = mu.size() > 0 ? static_cast<int>(mu.size()) : 1;
  if (mu.size() == 0) mu = Vec::Zero(d);
  if (mu.size() == 1 && d > 1) mu = Vec::Constant(d, mu[0]);
  if (mu.size() != d) throw ConfigError("gaussian: mu has the wrong length");

  Mat cov = Mat::Identity(d, d);
  const bool has_sigma = params.count("sigma") > 0;
  const bool has_cov = params.count("cov") > 0;
  if (has_sigma && has_cov) throw ConfigError("gaussian: give sigma or cov, not both");
  if (has_sigma) {
    const double s = parse_double(params["sigma"]);
    if (!(s > 0)) throw ConfigError("gaussian: sigma must be positive");
    cov *= s * s;
    params.erase("sigma");
  }
  if (has_cov) {
    const Vec c = parse_list(params["cov"]);
    if (c.size() != d * d) throw ConfigError("gaussian: cov needs d*d entries");
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) cov(i, j) = c[i * d + j];
    params.erase("cov");
  }
  if (!params.empty()) throw ConfigError("gaussian: unknown parameter '" + params.begin()->first + "'");
  return std::make_shared<GaussianModel>(mu, cov);
}

}  // namespace

ModelPtr parse_model(std::string_view spec) {
  const auto text = trim(spec);
  const auto colon = text.find(':');
  const std::string name(trim(text.substr(0, colon)));
  std::map<std::string, std::string> params;
  if (colon != std::string_view::npos) {
    for (const auto& item : split(text.substr(colon + 1), ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw ConfigError("model parameter without '=': '" + item + "'");
      const std::string key(trim(std::string_view(item).substr(0, eq)));
      if (!params.emplace(key, std::string(trim(std::string_view(item).substr(eq + 1)))).second)
        throw ConfigError("duplicate model parameter '" + key + "'");
    }
  }
  auto no_params = [&](ModelPtr m) {
    if (!params.empty()) throw ConfigError(name + ": unknown parameter '" + params.begin()->first + "'");
    return m;
  };
  if (name == "gaussian") return make_gaussian(params);
  if (name == "cexp") return no_params(std::make_shared<CenteredExpModel>());
  if (name == "rademacher") return no_params(std::make_shared<RademacherModel>());
  if (name == "laplace") return no_params(std::make_shared<LaplaceModel>());
  if (name == "synthetic-boundary") return no_params(std::make_shared<SyntheticBoundaryModel>());
  if (name == "poisson") {
    double rate = 1.0;
    if (auto it = params.find("rate"); it != params.end()) {
      rate = parse_double(it->second);
      params.erase(it);
    }
    return no_params(std::make_shared<PoissonCenteredModel>(rate));
  }
  throw ConfigError("unknown model '" + name + "'");
}

// ---------------------------------------------------------------------------
// Free functions

ExtReal cgf_eval(const CgfModel& model, const Vec& u) { return model.cumulant(u); }

Vec cgf_grad(const CgfModel& model, const Vec& u) {
  if (model.dimension() == 1 && u.size() == 1 && !model.domain().interior(u[0]))
    throw DomainError("cgf_grad: point not in the interior of D_L");
  return model.gradient(u);
}

ExtReal recession(const CgfModel& model, const Vec& l) {
  if (std::abs(l.norm() - 1.0) > 1e-12) throw DomainError("recession: direction must be a unit vector");
  return model.recession(l);
}

std::optional<ExtReal> rate_closed(const CgfModel& model, const Vec& v) { return model.closed_rate(v); }

}  // namespace ldp
