#include "ldpkit/path.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "json.hpp"

#include "ldpkit/conjugate.hpp"
#include "ldpkit/errors.hpp"
#include "ldpkit/format.hpp"

namespace ldp {

double SphericalMeasure::total_mass() const {
  double m = 0.0;
  for (const auto& a : atoms) m += a.mass;
  return m;
}

// ---------------------------------------------------------------------------
// CadlagPath

CadlagPath::CadlagPath(int dimension) : dim_(dimension), grid_{0.0, 1.0}, slopes_{Vec::Zero(dimension)} {
  if (dimension < 1) throw ConfigError("path: dimension must be positive");
}

CadlagPath::CadlagPath(int dimension, std::vector<double> grid, std::vector<Vec> slopes, std::vector<Jump> jumps)
    : dim_(dimension), grid_(std::move(grid)), slopes_(std::move(slopes)), jumps_(std::move(jumps)) {
  if (dim_ < 1) throw ConfigError("path: dimension must be positive");
  if (grid_.size() < 2 || grid_.front() != 0.0 || grid_.back() != 1.0)
    throw ConfigError("path: grid must start at 0 and end at 1");
  for (std::size_t i = 0; i + 1 < grid_.size(); ++i)
    if (!(grid_[i] < grid_[i + 1])) throw ConfigError("path: grid must be strictly increasing");
  if (slopes_.size() + 1 != grid_.size()) throw ConfigError("path: need one slope per grid interval");
  for (const auto& s : slopes_) {
    if (s.size() != dim_) throw ConfigError("path: slope dimension mismatch");
    if (!s.allFinite()) throw ConfigError("path: slopes must be finite");
  }
  for (const auto& j : jumps_) {
    if (j.size.size() != dim_) throw ConfigError("path: jump dimension mismatch");
    if (!(j.time >= 0.0 && j.time <= 1.0)) throw ConfigError("path: jump time outside [0, 1]");
    if (!j.size.allFinite()) throw ConfigError("path: jumps must be finite");
  }
  canonicalize();
}

CadlagPath CadlagPath::scalar(std::vector<double> grid, std::vector<double> slopes,
                              std::vector<std::pair<double, double>> jumps) {
  std::vector<Vec> s;
  s.reserve(slopes.size());
  for (double v : slopes) s.push_back(scalar_vec(v));
  std::vector<Jump> j;
  for (auto [t, v] : jumps) j.push_back({t, scalar_vec(v)});
  return CadlagPath(1, std::move(grid), std::move(s), std::move(j));
}

void CadlagPath::canonicalize() {
  std::vector<double> g{grid_.front()};
  std::vector<Vec> s{slopes_.front()};
  for (std::size_t i = 1; i < slopes_.size(); ++i) {
    if (slopes_[i] == s.back()) continue;
    g.push_back(grid_[i]);
    s.push_back(slopes_[i]);
  }
  g.push_back(1.0);
  grid_ = std::move(g);
  slopes_ = std::move(s);

  std::stable_sort(jumps_.begin(), jumps_.end(), [](const Jump& a, const Jump& b) { return a.time < b.time; });
  std::vector<Jump> merged;
  for (auto& j : jumps_) {
    if (!merged.empty() && merged.back().time == j.time) merged.back().size += j.size;
    else merged.push_back(std::move(j));
  }
  std::erase_if(merged, [](const Jump& j) { return j.size.isZero(0.0); });
  jumps_ = std::move(merged);
}

Vec CadlagPath::value(double t) const {
  Vec out = left_limit(t);
  for (const auto& j : jumps_) {
    if (j.time == t) out += j.size;
    if (j.time >= t) break;
  }
  return out;
}

Vec CadlagPath::left_limit(double t) const {
  Vec out = Vec::Zero(dim_);
  for (std::size_t i = 0; i < slopes_.size() && grid_[i] < t; ++i)
    out += slopes_[i] * (std::min(t, grid_[i + 1]) - grid_[i]);
  for (const auto& j : jumps_) {
    if (j.time >= t) break;
    out += j.size;
  }
  return out;
}

std::vector<double> CadlagPath::event_times() const {
  std::vector<double> out = grid_;
  for (const auto& j : jumps_) out.push_back(j.time);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

CadlagPath combine(const CadlagPath& a, const CadlagPath& b, double sb) {
  if (a.dimension() != b.dimension()) throw ConfigError("path arithmetic: dimension mismatch");
  std::vector<double> grid = a.grid();
  grid.insert(grid.end(), b.grid().begin(), b.grid().end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  auto slope_at = [](const CadlagPath& p, double mid) {
    const auto& g = p.grid();
    const auto i = static_cast<std::size_t>(std::upper_bound(g.begin(), g.end(), mid) - g.begin()) - 1;
    return p.slopes()[std::min(i, p.slopes().size() - 1)];
  };
  std::vector<Vec> slopes;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double mid = 0.5 * (grid[i] + grid[i + 1]);
    slopes.push_back(slope_at(a, mid) + sb * slope_at(b, mid));
  }
  std::vector<Jump> jumps = a.jumps();
  for (const auto& j : b.jumps()) jumps.push_back({j.time, sb * j.size});
  return CadlagPath(a.dimension(), std::move(grid), std::move(slopes), std::move(jumps));
}

}  // namespace

CadlagPath CadlagPath::operator+(const CadlagPath& other) const { return combine(*this, other, 1.0); }
CadlagPath CadlagPath::operator-(const CadlagPath& other) const { return combine(*this, other, -1.0); }

CadlagPath CadlagPath::operator*(double s) const {
  std::vector<Vec> slopes;
  for (const auto& v : slopes_) slopes.push_back(s * v);
  std::vector<Jump> jumps;
  for (const auto& j : jumps_) jumps.push_back({j.time, s * j.size});
  return CadlagPath(dim_, grid_, std::move(slopes), std::move(jumps));
}

bool operator==(const CadlagPath& a, const CadlagPath& b) {
  if (a.dim_ != b.dim_ || a.grid_ != b.grid_ || a.slopes_.size() != b.slopes_.size() ||
      a.jumps_.size() != b.jumps_.size())
    return false;
  for (std::size_t i = 0; i < a.slopes_.size(); ++i)
    if (a.slopes_[i] != b.slopes_[i]) return false;
  for (std::size_t i = 0; i < a.jumps_.size(); ++i)
    if (a.jumps_[i].time != b.jumps_[i].time || a.jumps_[i].size != b.jumps_[i].size) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Functionals

double var(const CadlagPath& path) {
  const auto& g = path.grid();
  double total = 0.0;
  for (std::size_t i = 0; i < path.slopes().size(); ++i) total += path.slopes()[i].norm() * (g[i + 1] - g[i]);
  for (const auto& j : path.jumps()) total += j.size.norm();
  return total;
}

std::pair<CadlagPath, CadlagPath> lebesgue_split(const CadlagPath& path) {
  CadlagPath ac(path.dimension(), path.grid(), path.slopes());
  CadlagPath jump(path.dimension(), {0.0, 1.0}, {Vec::Zero(path.dimension())}, path.jumps());
  return {std::move(ac), std::move(jump)};
}

SphericalMeasure directional(const CadlagPath& path) {
  SphericalMeasure out;
  for (const auto& j : path.jumps()) {
    const double mass = j.size.norm();
    const Vec dir = j.size / mass;
    auto it = std::find_if(out.atoms.begin(), out.atoms.end(),
                           [&](const auto& a) { return (a.direction - dir).norm() <= 1e-12; });
    if (it != out.atoms.end()) it->mass += mass;
    else out.atoms.push_back({dir, mass});
  }
  return out;
}

ExtReal i_d(const CadlagPath& path, const CgfModel& model) {
  if (path.dimension() != model.dimension()) throw ConfigError("i_d: path and model dimensions differ");
  const auto& g = path.grid();
  ExtReal total = 0.0;
  for (std::size_t i = 0; i < path.slopes().size(); ++i) {
    total = total + (g[i + 1] - g[i]) * rate_value(model, path.slopes()[i]);
    if (total.is_pos_inf()) return total;
  }
  for (const auto& atom : directional(path).atoms) {
    total = total + atom.mass * model.recession(atom.direction);
    if (total.is_pos_inf()) return total;
  }
  return total;
}

ExtReal partition_action(const CadlagPath& path, const CgfModel& model, std::vector<double> points) {
  if (path.dimension() != model.dimension()) throw ConfigError("partition_action: path and model dimensions differ");
  for (double t : points)
    if (!(t > 0.0 && t <= 1.0)) throw DomainError("partition_action: points must lie in (0, 1]");
  points.push_back(1.0);
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  ExtReal total = 0.0;
  double t_prev = 0.0;
  Vec h_prev = Vec::Zero(path.dimension());
  for (double t : points) {
    const Vec h = path.value(t);
    const double len = t - t_prev;
    total = total + len * rate_value(model, Vec((h - h_prev) / len));
    if (total.is_pos_inf()) return total;
    t_prev = t;
    h_prev = h;
  }
  return total;
}

Vec pair(const Kernel& kernel, const CadlagPath& path) {
  const auto& g = path.grid();
  Vec acc = Vec::Zero(path.dimension());
  for (std::size_t i = 0; i < path.slopes().size(); ++i) acc += kernel.integral(g[i], g[i + 1]) * path.slopes()[i];
  for (const auto& j : path.jumps()) acc += kernel(j.time) * j.size;
  return acc;
}

double sup_functional(const CadlagPath& path, const Vec& l) {
  if (l.size() != path.dimension()) throw ConfigError("sup_functional: dimension mismatch");
  if (std::abs(l.norm() - 1.0) > 1e-12) throw DomainError("sup_functional: l must be a unit vector");
  double best = path.value(0.0).dot(l);
  for (double t : path.event_times()) {
    if (t == 0.0) continue;
    best = std::max({best, path.left_limit(t).dot(l), path.value(t).dot(l)});
  }
  return best;
}

CadlagPath random_path(int dimension, int max_pieces, int max_jumps, std::uint64_t seed) {
  if (dimension < 1 || max_pieces < 1 || max_jumps < 0) throw ConfigError("random_path: bad arguments");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> coord(-2.0, 2.0);
  const int pieces = std::uniform_int_distribution<int>(1, max_pieces)(rng);
  const int njumps = std::uniform_int_distribution<int>(0, max_jumps)(rng);

  std::vector<double> grid{0.0, 1.0};
  for (int i = 1; i < pieces; ++i) grid.push_back(unit(rng));
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  auto random_vec = [&] {
    Vec v(dimension);
    for (int k = 0; k < dimension; ++k) v[k] = coord(rng);
    return v;
  };
  std::vector<Vec> slopes;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) slopes.push_back(random_vec());
  std::vector<Jump> jumps;
  for (int i = 0; i < njumps; ++i) {
    const double u = unit(rng);
    // Endpoint jumps are rare under a continuous law; force them sometimes.
    const double t = u < 0.1 ? 0.0 : (u > 0.9 ? 1.0 : unit(rng));
    jumps.push_back({t, random_vec()});
  }
  return CadlagPath(dimension, std::move(grid), std::move(slopes), std::move(jumps));
}

double random_path_var_bound(int dimension, int /*max_pieces*/, int max_jumps) {
  return 2.0 * std::sqrt(static_cast<double>(dimension)) * (1.0 + max_jumps);
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

std::string vec_text(const Vec& v) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? " " : "") + format_double(v[i]);
  return s;
}

Vec parse_vec_words(std::istringstream& in, const std::string& line) {
  std::vector<double> vals;
  std::string word;
  while (in >> word) vals.push_back(parse_double(word));
  if (vals.empty()) throw ConfigError("path text: missing vector in '" + line + "'");
  return Eigen::Map<Vec>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

CadlagPath parse_text(std::string_view text) {
  int dim = 0;
  std::vector<double> grid;
  std::map<std::size_t, Vec> slopes;
  std::vector<Jump> jumps;
  std::istringstream lines{std::string(text)};
  std::string raw;
  while (std::getline(lines, raw)) {
    const auto hash = raw.find('#');
    const std::string line(trim(std::string_view(raw).substr(0, hash)));
    if (line.empty()) continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) throw ConfigError("path text: expected 'key: value' in '" + line + "'");
    std::istringstream head(line.substr(0, colon));
    std::istringstream rest(line.substr(colon + 1));
    std::string key;
    head >> key;
    if (key == "dim") {
      dim = static_cast<int>(parse_double(line.substr(colon + 1)));
    } else if (key == "grid") {
      std::string word;
      while (rest >> word) grid.push_back(parse_double(word));
    } else if (key == "slope") {
      std::string idx;
      head >> idx;
      const double i = parse_double(idx);
      if (i < 0 || i != std::floor(i)) throw ConfigError("path text: bad slope index '" + idx + "'");
      if (!slopes.emplace(static_cast<std::size_t>(i), parse_vec_words(rest, line)).second)
        throw ConfigError("path text: duplicate slope " + idx);
    } else if (key == "jump") {
      std::string t;
      head >> t;
      jumps.push_back({parse_double(t), parse_vec_words(rest, line)});
    } else {
      throw ConfigError("path text: unknown key '" + key + "'");
    }
  }
  if (grid.empty()) grid = {0.0, 1.0};
  if (dim == 0) {
    if (!slopes.empty()) dim = static_cast<int>(slopes.begin()->second.size());
    else if (!jumps.empty()) dim = static_cast<int>(jumps.front().size.size());
    else dim = 1;
  }
  std::vector<Vec> s(grid.size() - 1, Vec::Zero(dim));
  for (auto& [i, v] : slopes) {
    if (i >= s.size()) throw ConfigError("path text: slope index out of range");
    s[i] = v;
  }
  return CadlagPath(dim, std::move(grid), std::move(s), std::move(jumps));
}

Vec json_vec(const nlohmann::json& j) {
  if (j.is_number()) return scalar_vec(j.get<double>());
  const auto vals = j.get<std::vector<double>>();
  return Eigen::Map<const Vec>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

CadlagPath parse_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    for (const auto& [key, _] : j.items())
      if (key != "dim" && key != "grid" && key != "slopes" && key != "jumps")
        throw ConfigError("path json: unknown key '" + key + "'");
    const int dim = j.value("dim", 1);
    const auto grid = j.value("grid", std::vector<double>{0.0, 1.0});
    std::vector<Vec> slopes;
    if (j.contains("slopes"))
      for (const auto& s : j.at("slopes")) slopes.push_back(json_vec(s));
    else
      slopes.assign(grid.size() - 1, Vec::Zero(dim));
    std::vector<Jump> jumps;
    if (j.contains("jumps"))
      for (const auto& jj : j.at("jumps")) jumps.push_back({jj.at("t").get<double>(), json_vec(jj.at("v"))});
    return CadlagPath(dim, grid, std::move(slopes), std::move(jumps));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("path json: ") + e.what());
  }
}

}  // namespace

std::string to_text(const CadlagPath& path) {
  std::string s = "dim: " + std::to_string(path.dimension()) + "\ngrid:";
  for (double t : path.grid()) s += " " + format_double(t);
  s += "\n";
  for (std::size_t i = 0; i < path.slopes().size(); ++i)
    s += "slope " + std::to_string(i) + ": " + vec_text(path.slopes()[i]) + "\n";
  for (const auto& j : path.jumps()) s += "jump " + format_double(j.time) + ": " + vec_text(j.size) + "\n";
  return s;
}

std::string to_json(const CadlagPath& path) {
  // Numbers are spliced in as shortest round-trip text.
  auto vec_json = [](const Vec& v) {
    std::string s = "[";
    for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
    return s + "]";
  };
  std::string s = "{\"dim\":" + std::to_string(path.dimension()) + ",\"grid\":[";
  for (std::size_t i = 0; i < path.grid().size(); ++i) s += (i ? "," : "") + format_double(path.grid()[i]);
  s += "],\"slopes\":[";
  for (std::size_t i = 0; i < path.slopes().size(); ++i) s += (i ? "," : "") + vec_json(path.slopes()[i]);
  s += "],\"jumps\":[";
  for (std::size_t i = 0; i < path.jumps().size(); ++i)
    s += std::string(i ? "," : "") + "{\"t\":" + format_double(path.jumps()[i].time) +
         ",\"v\":" + vec_json(path.jumps()[i].size) + "}";
  return s + "]}";
}

CadlagPath parse_path(std::string_view text) {
  const auto t = trim(text);
  if (!t.empty() && t.front() == '{') return parse_json(t);
  return parse_text(t);
}

}  // namespace ldp
