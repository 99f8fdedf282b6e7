#include "ergonet/space.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "ergonet/kernels.hpp"

namespace ergonet::space {

namespace {

std::shared_ptr<const SampleGrid> make_grid(Model model, std::vector<Point> pts, int res) {
  auto g = std::make_shared<SampleGrid>();
  g->model = model;
  g->points = std::move(pts);
  g->resolution = res;
  return g;
}

}  // namespace

std::shared_ptr<const SampleGrid> SampleGrid::circle(int m) {
  if (m < 2) throw contract_error("circle grid: resolution must be >= 2");
  std::vector<Point> pts(m);
  for (int j = 0; j < m; ++j) pts[j] = {static_cast<double>(j) / m, 0.0};
  return make_grid(Model::Circle, std::move(pts), m);
}

std::shared_ptr<const SampleGrid> SampleGrid::torus2(int m) {
  if (m < 2) throw contract_error("torus grid: resolution must be >= 2");
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(m) * m);
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k)
      pts.push_back({static_cast<double>(j) / m, static_cast<double>(k) / m});
  return make_grid(Model::Torus2, std::move(pts), m);
}

std::shared_ptr<const SampleGrid> SampleGrid::interval(int m) {
  if (m < 2) throw contract_error("interval grid: resolution must be >= 2");
  std::vector<Point> pts(m);
  for (int j = 0; j < m; ++j) pts[j] = {static_cast<double>(j) / (m - 1), 0.0};
  return make_grid(Model::Interval, std::move(pts), m);
}

std::shared_ptr<const SampleGrid> SampleGrid::interval_with_dyadic_tail(int m, int j_max) {
  if (m < 2) throw contract_error("interval grid: resolution must be >= 2");
  if (j_max < 1 || j_max > 52) throw contract_error("dyadic tail: j_max must be in [1,52]");
  std::set<double> xs;
  for (int j = 0; j < m; ++j) xs.insert(static_cast<double>(j) / (m - 1));
  for (int j = 1; j <= j_max; ++j) xs.insert(1.0 - std::ldexp(1.0, -j));
  std::vector<Point> pts;
  pts.reserve(xs.size());
  for (double x : xs) pts.push_back({x, 0.0});
  return make_grid(Model::Interval, std::move(pts), static_cast<int>(pts.size()));
}

std::shared_ptr<const SampleGrid> SampleGrid::finite(int n) {
  if (n < 1) throw contract_error("finite grid: need n >= 1");
  std::vector<Point> pts(n);
  for (int i = 0; i < n; ++i) pts[i] = {static_cast<double>(i), 0.0};
  return make_grid(Model::FiniteSet, std::move(pts), n);
}

std::size_t SampleGrid::nearest_index(const Point& p) const {
  auto dist = [this, &p](const Point& q) {
    switch (model) {
      case Model::Circle: {
        double d = std::abs(p.x - q.x);
        d -= std::floor(d);
        return std::min(d, 1.0 - d);
      }
      case Model::Torus2: {
        double dx = std::abs(p.x - q.x);
        dx -= std::floor(dx);
        dx = std::min(dx, 1.0 - dx);
        double dy = std::abs(p.y - q.y);
        dy -= std::floor(dy);
        dy = std::min(dy, 1.0 - dy);
        return std::hypot(dx, dy);
      }
      default:
        return std::abs(p.x - q.x);
    }
  };
  std::size_t best = 0;
  double bd = dist(points[0]);
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double d = dist(points[i]);
    if (d < bd) {
      bd = d;
      best = i;
    }
  }
  return best;
}

NormContext NormContext::p(int p) {
  NormContext c;
  switch (p) {
    case 1: c.kind = NormKind::One; break;
    case 2: c.kind = NormKind::Two; break;
    default: throw contract_error("NormContext: p must be 1, 2 or use p_inf");
  }
  return c;
}

NormContext NormContext::grid_sup(GridPtr g) {
  if (!g || g->size() == 0) throw contract_error("grid-sup norm requires a nonempty grid");
  NormContext c;
  c.kind = NormKind::GridSup;
  c.grid = std::move(g);
  return c;
}

SampledFunction SampledFunction::zero(GridPtr g, int components) {
  if (!g) throw contract_error("SampledFunction: null grid");
  if (components < 1) throw contract_error("SampledFunction: components must be >= 1");
  SampledFunction f;
  f.grid = std::move(g);
  f.components = components;
  f.values.assign(f.grid->size() * components, cxd{0.0, 0.0});
  return f;
}

void SampledFunction::validate() const {
  if (!grid) throw contract_error("SampledFunction: null grid");
  if (components < 1) throw contract_error("SampledFunction: components must be >= 1");
  if (values.size() != grid->size() * static_cast<std::size_t>(components))
    throw contract_error("SampledFunction: value count does not match grid");
}

double norm(const Vec& v, const NormContext& ctx) {
  switch (ctx.kind) {
    case NormKind::One: {
      PairwiseSum s;
      for (Eigen::Index i = 0; i < v.size(); ++i) s.add(std::abs(v[i]));
      return s.result();
    }
    case NormKind::Two: {
      PairwiseSum s;
      for (Eigen::Index i = 0; i < v.size(); ++i) s.add(std::norm(v[i]));
      return std::sqrt(s.result());
    }
    case NormKind::Inf:
      return std::sqrt(kernels::active().sup_abs2(static_cast<std::size_t>(v.size()), v.data()));
    case NormKind::GridSup:
      if (!ctx.grid || static_cast<Eigen::Index>(ctx.grid->size()) != v.size())
        throw contract_error("norm: grid-sup context incompatible with vector length");
      return std::sqrt(kernels::active().sup_abs2(static_cast<std::size_t>(v.size()), v.data()));
  }
  throw contract_error("norm: unknown kind");
}

double norm(const Vector& v) { return norm(v.coords, v.context); }

double grid_sup_norm(const SampledFunction& f) {
  f.validate();
  if (f.components == 1)
    return std::sqrt(kernels::active().sup_abs2(f.values.size(), f.values.data()));
  double m = 0.0;
  for (std::size_t p = 0; p < f.point_count(); ++p) {
    double a2 = 0.0;
    for (int c = 0; c < f.components; ++c) a2 += std::norm(f.at(p, c));
    if (a2 > m) m = a2;
  }
  return std::sqrt(m);
}

double norm(const SampledFunction& f, const NormContext& ctx) {
  if (ctx.kind != NormKind::GridSup)
    throw contract_error("norm: sampled functions carry the grid-sup norm");
  if (ctx.grid && ctx.grid.get() != f.grid.get() && ctx.grid->size() != f.point_count())
    throw contract_error("norm: context grid does not match the function's grid");
  return grid_sup_norm(f);
}

std::int64_t TrigPoly::degree() const {
  if (coeff.empty()) return 0;
  return std::max(std::llabs(min_freq), std::llabs(max_freq()));
}

cxd TrigPoly::eval(double x) const {
  cxd s{0.0, 0.0};
  for (std::size_t i = 0; i < coeff.size(); ++i) {
    const double k = static_cast<double>(min_freq + static_cast<std::int64_t>(i));
    s += coeff[i] * cis_turns(mul_mod1(k, x));
  }
  return s;
}

std::vector<cxd> TrigPoly::eval_equispaced(std::size_t M) const {
  if (M == 0) throw contract_error("eval_equispaced: M must be positive");
  std::vector<cxd> out(M, cxd{0.0, 0.0});
  const auto& K = kernels::active();
  for (std::size_t i = 0; i < coeff.size(); ++i) {
    if (coeff[i] == cxd{0.0, 0.0}) continue;
    const double k = static_cast<double>(min_freq + static_cast<std::int64_t>(i));
    // e^{2 pi i k j / M} stepped in j
    K.phasor_accumulate(M, coeff[i], 0.0, k / static_cast<double>(M), out.data());
  }
  return out;
}

SupBounds certified_sup_norm(const TrigPoly& p, std::size_t M) {
  const double D = static_cast<double>(p.degree());
  if (static_cast<double>(M) <= std::numbers::pi * D)
    throw contract_error("certified_sup_norm: need M > pi*degree for a certificate");
  const std::vector<cxd> vals = p.eval_equispaced(M);
  const double lower = std::sqrt(kernels::active().sup_abs2(vals.size(), vals.data()));
  const double shrink = 1.0 - std::numbers::pi * D / static_cast<double>(M);
  return {lower, lower / shrink};
}

}  // namespace ergonet::space
