#include "ldpkit/kernel.hpp"

#include <algorithm>
#include <cmath>

#include "ldpkit/errors.hpp"
#include "ldpkit/format.hpp"

namespace ldp {

Kernel::Kernel(std::vector<double> breakpoints, std::vector<double> values)
    : t_(std::move(breakpoints)), v_(std::move(values)) {
  if (t_.size() < 2 || t_.size() != v_.size())
    throw ConfigError("kernel: need at least two breakpoints with one value each");
  if (t_.front() != 0.0 || t_.back() != 1.0) throw ConfigError("kernel: breakpoints must start at 0 and end at 1");
  for (std::size_t i = 0; i + 1 < t_.size(); ++i)
    if (!(t_[i] < t_[i + 1])) throw ConfigError("kernel: breakpoints must be strictly increasing");
  for (double v : v_)
    if (!std::isfinite(v)) throw ConfigError("kernel: values must be finite");
  if (std::all_of(v_.begin(), v_.end(), [](double v) { return v == 0.0; }))
    throw ConfigError("kernel: f must not be identically zero");

  for (std::size_t i = 0; i < v_.size(); ++i) {
    max_plus_ = std::max(max_plus_, v_[i]);
    max_minus_ = std::max(max_minus_, -v_[i]);
  }
  for (std::size_t i = 0; i + 1 < t_.size(); ++i)
    lipschitz_ = std::max(lipschitz_, std::abs(v_[i + 1] - v_[i]) / (t_[i + 1] - t_[i]));
  m1_ = integral(0.0, 1.0);
  m2_ = integral_sq(0.0, 1.0);
}

Kernel Kernel::affine(double a, double b) { return Kernel({0.0, 1.0}, {a, a + b}); }
Kernel Kernel::constant(double c) { return Kernel({0.0, 1.0}, {c, c}); }

double Kernel::operator()(double t) const {
  if (t <= 0.0) return v_.front();
  if (t >= 1.0) return v_.back();
  const auto it = std::upper_bound(t_.begin(), t_.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - t_.begin()) - 1;
  const double w = (t - t_[i]) / (t_[i + 1] - t_[i]);
  return v_[i] + w * (v_[i + 1] - v_[i]);
}

double Kernel::integral(double a, double b) const {
  if (b < a) return -integral(b, a);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < t_.size(); ++i) {
    const double lo = std::max(a, t_[i]);
    const double hi = std::min(b, t_[i + 1]);
    if (hi <= lo) continue;
    acc += 0.5 * ((*this)(lo) + (*this)(hi)) * (hi - lo);
  }
  return acc;
}

double Kernel::integral_sq(double a, double b) const {
  if (b < a) return -integral_sq(b, a);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < t_.size(); ++i) {
    const double lo = std::max(a, t_[i]);
    const double hi = std::min(b, t_[i + 1]);
    if (hi <= lo) continue;
    const double p = (*this)(lo);
    const double q = (*this)(hi);
    acc += (p * p + p * q + q * q) * (hi - lo) / 3.0;
  }
  return acc;
}

std::vector<ArgmaxSet> Kernel::argmax_of(double sign) const {
  std::vector<ArgmaxSet> out;
  const double top = sign > 0 ? max_plus_ : max_minus_;
  if (top == 0.0) return out;
  for (std::size_t i = 0; i < t_.size(); ++i) {
    if (sign * v_[i] != top) continue;
    // A run of breakpoints at the maximum forms an interval where f is flat.
    if (!out.empty() && i > 0 && sign * v_[i - 1] == top) out.back().hi = t_[i];
    else out.push_back({t_[i], t_[i]});
  }
  return out;
}

std::vector<ArgmaxSet> Kernel::argmax_plus() const { return argmax_of(1.0); }
std::vector<ArgmaxSet> Kernel::argmax_minus() const { return argmax_of(-1.0); }

std::string Kernel::spec() const {
  std::string s = "pwl:";
  for (std::size_t i = 0; i < t_.size(); ++i)
    s += (i ? "," : "") + format_double(t_[i]) + ":" + format_double(v_[i]);
  return s;
}

Kernel parse_kernel(std::string_view spec) {
  const auto text = trim(spec);
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw ConfigError("kernel spec needs 'kind:params': '" + std::string(text) + "'");
  const auto kind = trim(text.substr(0, colon));
  const auto args = split(text.substr(colon + 1), ',');
  if (kind == "const") {
    if (args.size() != 1) throw ConfigError("const kernel takes one value");
    return Kernel::constant(parse_double(args[0]));
  }
  if (kind == "affine") {
    if (args.size() != 2) throw ConfigError("affine kernel takes 'a,b'");
    return Kernel::affine(parse_double(args[0]), parse_double(args[1]));
  }
  if (kind == "pwl") {
    std::vector<double> t;
    std::vector<double> v;
    for (const auto& item : args) {
      const auto tv = split(item, ':');
      if (tv.size() != 2) throw ConfigError("pwl kernel items are 't:v', got '" + item + "'");
      t.push_back(parse_double(tv[0]));
      v.push_back(parse_double(tv[1]));
    }
    return Kernel(std::move(t), std::move(v));
  }
  throw ConfigError("unknown kernel kind '" + std::string(kind) + "'");
}

}  // namespace ldp
