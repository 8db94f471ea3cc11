#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ldpkit/cgf.hpp"
#include "ldpkit/ext_real.hpp"
#include "ldpkit/kernel.hpp"
#include "ldpkit/linalg.hpp"

namespace ldp {

struct Jump {
  double time = 0.0;
  Vec size;
};

/// Finite atomic measure on the unit sphere.
struct SphericalMeasure {
  struct Atom {
    Vec direction;
    double mass = 0.0;
  };
  std::vector<Atom> atoms;

  double total_mass() const;
};

/// A cadlag path of bounded variation on [0, 1] in R^d: a piecewise-linear
/// absolutely continuous part plus finitely many jumps. h(0-) = 0, so a jump
/// at time 0 sets h(0), and a jump at time 1 contributes to h(1).
///
/// Always held in canonical form: adjacent intervals with equal slopes are
/// merged, jumps at equal times are summed, and zero jumps are dropped.
class CadlagPath {
 public:
  /// The zero path in R^d.
  explicit CadlagPath(int dimension = 1);
  CadlagPath(int dimension, std::vector<double> grid, std::vector<Vec> slopes, std::vector<Jump> jumps = {});

  /// Scalar convenience constructor.
  static CadlagPath scalar(std::vector<double> grid, std::vector<double> slopes,
                           std::vector<std::pair<double, double>> jumps = {});

  int dimension() const { return dim_; }
  const std::vector<double>& grid() const { return grid_; }
  const std::vector<Vec>& slopes() const { return slopes_; }
  const std::vector<Jump>& jumps() const { return jumps_; }

  /// h(t) (right-continuous).
  Vec value(double t) const;
  /// h(t-); h(0-) = 0.
  Vec left_limit(double t) const;

  /// Sorted union of grid points and jump times.
  std::vector<double> event_times() const;

  CadlagPath operator+(const CadlagPath& other) const;
  CadlagPath operator-(const CadlagPath& other) const;
  CadlagPath operator*(double s) const;

  friend bool operator==(const CadlagPath& a, const CadlagPath& b);

 private:
  void canonicalize();

  int dim_;
  std::vector<double> grid_;
  std::vector<Vec> slopes_;
  std::vector<Jump> jumps_;
};

/// Total variation: sum |slope| * length + sum |jump|.
double var(const CadlagPath& path);

/// (absolutely continuous part, jump part).
std::pair<CadlagPath, CadlagPath> lebesgue_split(const CadlagPath& path);

/// Directional decomposition of the singular part: one atom per jump
/// direction, equal directions merged.
SphericalMeasure directional(const CadlagPath& path);

/// Action functional: sum length * I(slope) + sum over atoms of I_inf(direction) * mass.
ExtReal i_d(const CadlagPath& path, const CgfModel& model);

/// int_0^1 I((h^t)'(s)) ds, where h^t interpolates linearly through (0, 0)
/// and (t_i, h(t_i)) for the given points in (0, 1] (1 is always included).
/// Refining the points increases it towards i_d.
ExtReal partition_action(const CadlagPath& path, const CgfModel& model, std::vector<double> points);

/// Integral of f against dh: exact for piecewise-linear f and this path class.
Vec pair(const Kernel& kernel, const CadlagPath& path);

/// sup_t h(t) . l over [0, 1]; left limits count as approached values.
double sup_functional(const CadlagPath& path, const Vec& l);

/// Random canonical path for property tests. Slopes and jumps have entries
/// in [-2, 2], so var(path) <= random_path_var_bound(...).
CadlagPath random_path(int dimension, int max_pieces, int max_jumps, std::uint64_t seed);
double random_path_var_bound(int dimension, int max_pieces, int max_jumps);

/// Line-oriented text form:
///   dim: d
///   grid: t0 t1 ... tm
///   slope i: v1 ... vd
///   jump t: v1 ... vd
std::string to_text(const CadlagPath& path);
/// JSON form {"dim":d,"grid":[...],"slopes":[[...],...],"jumps":[{"t":..,"v":[...]},...]}.
std::string to_json(const CadlagPath& path);
/// Parses either form (JSON when the first non-blank character is '{').
CadlagPath parse_path(std::string_view text);

}  // namespace ldp
