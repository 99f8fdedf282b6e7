#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "ergonet/util.hpp"

namespace ergonet::space {

using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

/// Compact model spaces carrying sample grids.
enum class Model { Circle, Torus2, Interval, FiniteSet };

/// A point of a model space. Circle/Interval use x; Torus2 uses (x, y);
/// FiniteSet stores the (exact, integer-valued) index in x.
struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct SampleGrid {
  Model model;
  std::vector<Point> points;
  int resolution = 0;  // points per dimension

  std::size_t size() const { return points.size(); }

  static std::shared_ptr<const SampleGrid> circle(int m);
  static std::shared_ptr<const SampleGrid> torus2(int m);
  static std::shared_ptr<const SampleGrid> interval(int m);
  // Uniform interval grid plus the dyadic points 1 - 2^-j, j = 1..j_max,
  // so behavior concentrating near the right endpoint stays visible.
  static std::shared_ptr<const SampleGrid> interval_with_dyadic_tail(int m, int j_max);
  static std::shared_ptr<const SampleGrid> finite(int n);

  /// Index of the grid point nearest to p (wraparound metric on the circle).
  std::size_t nearest_index(const Point& p) const;
};

using GridPtr = std::shared_ptr<const SampleGrid>;

enum class NormKind { One, Two, Inf, GridSup };

struct NormContext {
  NormKind kind = NormKind::Two;
  GridPtr grid;  // required iff kind == GridSup

  static NormContext p(int p);
  static NormContext grid_sup(GridPtr g);
};

/// A coordinate vector together with the norm it is measured in.
struct Vector {
  Vec coords;
  NormContext context;
  int dim() const { return static_cast<int>(coords.size()); }
};

/// Grid samples of a continuous function; components > 1 means H-valued
/// (one d-tuple per point, point-major layout).
struct SampledFunction {
  GridPtr grid;
  int components = 1;
  std::vector<cxd> values;
  std::optional<double> lipschitz;

  static SampledFunction zero(GridPtr g, int components = 1);
  std::size_t point_count() const { return grid ? grid->size() : 0; }
  cxd& at(std::size_t point, int comp = 0) { return values[point * components + comp]; }
  const cxd& at(std::size_t point, int comp = 0) const { return values[point * components + comp]; }
  void validate() const;
};

double norm(const Vec& v, const NormContext& ctx);
double norm(const Vector& v);
double norm(const SampledFunction& f, const NormContext& ctx);
/// Exact max over grid points of the pointwise (Euclidean for tuples) magnitude.
double grid_sup_norm(const SampledFunction& f);

/// Trigonometric polynomial sum_{k=min_freq}^{max_freq} coeff[k-min_freq] e^{2 pi i k x}.
struct TrigPoly {
  std::int64_t min_freq = 0;
  std::vector<cxd> coeff;

  std::int64_t max_freq() const {
    return min_freq + static_cast<std::int64_t>(coeff.size()) - 1;
  }
  std::int64_t degree() const;

  cxd eval(double x) const;  // direct summation; oracle-grade
  /// Values at x_j = j/M, j = 0..M-1, accumulated with the phasor kernel.
  std::vector<cxd> eval_equispaced(std::size_t M) const;
};

struct SupBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Certified enclosure of ||p||_inf from M equispaced samples. Requires
/// M > pi * degree; then lower = max sampled |p| and the true sup lies in
/// [lower, lower / (1 - pi*D/M)] by the Bernstein/mean-value argument.
SupBounds certified_sup_norm(const TrigPoly& p, std::size_t M);

}  // namespace ergonet::space
