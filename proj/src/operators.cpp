#include "ergonet/operators.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <set>

#include "ergonet/kernels.hpp"

namespace ergonet::ops {

namespace {

double max_abs_row_sum(const Mat& S) {
  double m = 0.0;
  for (Eigen::Index i = 0; i < S.rows(); ++i) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < S.cols(); ++j) s += std::abs(S(i, j));
    m = std::max(m, s);
  }
  return m;
}

double max_abs_col_sum(const Mat& S) {
  double m = 0.0;
  for (Eigen::Index j = 0; j < S.cols(); ++j) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < S.rows(); ++i) s += std::abs(S(i, j));
    m = std::max(m, s);
  }
  return m;
}

}  // namespace

double operator_norm(const Mat& S, const space::NormContext& ctx) {
  if (S.rows() != S.cols()) throw contract_error("operator_norm: matrix must be square");
  switch (ctx.kind) {
    case space::NormKind::One:
      return max_abs_col_sum(S);
    case space::NormKind::Inf:
    case space::NormKind::GridSup:
      return max_abs_row_sum(S);
    case space::NormKind::Two: {
      Eigen::JacobiSVD<Mat> svd(S);
      return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    }
  }
  throw contract_error("operator_norm: unknown norm kind");
}

Mat matrix_power(const Mat& S, std::uint64_t n) {
  if (S.rows() != S.cols()) throw contract_error("matrix_power: matrix must be square");
  Mat result = Mat::Identity(S.rows(), S.cols());
  Mat base = S;
  while (n > 0) {
    if (n & 1ull) result = result * base;
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return result;
}

Vec power_apply(const Mat& S, std::uint64_t n, const Vec& x) {
  if (S.cols() != x.size()) throw contract_error("power_apply: dimension mismatch");
  if (n == 0) return x;
  return matrix_power(S, n) * x;
}

std::pair<Mat, Mat> geometric_sum(const Mat& T, std::uint64_t N) {
  const Eigen::Index d = T.rows();
  if (T.rows() != T.cols()) throw contract_error("geometric_sum: matrix must be square");
  if (N == 0) return {Mat::Zero(d, d), Mat::Identity(d, d)};
  if (N == 1) return {Mat::Identity(d, d), T};
  if (N % 2 == 0) {
    auto [q, p] = geometric_sum(T, N / 2);
    return {Mat(q + p * q), Mat(p * p)};
  }
  auto [q, p] = geometric_sum(T, N - 1);
  return {Mat(q + p), Mat(p * T)};
}

Mat expm(const Mat& A) {
  if (A.rows() != A.cols()) throw contract_error("expm: matrix must be square");
  const Eigen::Index d = A.rows();
  const double n1 = max_abs_col_sum(A);
  if (!std::isfinite(n1) || n1 > 1e12)
    throw numeric_error("expm: ||A|| too large, refusing to evaluate");
  constexpr double theta13 = 5.371920351148152;
  int s = 0;
  if (n1 > theta13) s = static_cast<int>(std::ceil(std::log2(n1 / theta13)));
  if (s > 60) throw numeric_error("expm: scaling exponent overflow");
  const Mat As = A / std::ldexp(1.0, s);

  static const double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                             1187353796428800.0,  129060195264000.0,   10559470521600.0,
                             670442572800.0,      33522128640.0,       1323241920.0,
                             40840800.0,          960960.0,            16380.0,
                             182.0,               1.0};
  const Mat I = Mat::Identity(d, d);
  const Mat A2 = As * As;
  const Mat A4 = A2 * A2;
  const Mat A6 = A4 * A2;
  const Mat U = As * (A6 * (b[13] * A6 + b[11] * A4 + b[9] * A2) +
                      b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * I);
  const Mat V = A6 * (b[12] * A6 + b[10] * A4 + b[8] * A2) +
                b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * I;
  Mat R = (V - U).partialPivLu().solve(V + U);
  for (int i = 0; i < s; ++i) R = R * R;
  if (!R.allFinite()) throw numeric_error("expm: result overflowed");
  return R;
}

Vec matrix_exponential_apply(const Mat& A, double t, const Vec& x) {
  if (t < 0.0) throw contract_error("matrix_exponential_apply: t must be >= 0");
  if (A.cols() != x.size()) throw contract_error("matrix_exponential_apply: dimension mismatch");
  return expm(Mat(t * A)) * x;
}

// ---------------------------------------------------------------------------

DynamicsMap DynamicsMap::rotation(double alpha) {
  DynamicsMap m;
  m.rule = Rule::Rotation;
  m.model = space::Model::Circle;
  m.alpha = alpha;
  return m;
}

DynamicsMap DynamicsMap::square() {
  DynamicsMap m;
  m.rule = Rule::Square;
  m.model = space::Model::Interval;
  return m;
}

DynamicsMap DynamicsMap::skew(double alpha) {
  DynamicsMap m;
  m.rule = Rule::Skew;
  m.model = space::Model::Torus2;
  m.alpha = alpha;
  return m;
}

DynamicsMap DynamicsMap::finite_table(std::vector<int> t) {
  if (t.empty()) throw contract_error("finite_table: empty table");
  for (int v : t)
    if (v < 0 || v >= static_cast<int>(t.size()))
      throw contract_error("finite_table: entry out of range");
  DynamicsMap m;
  m.rule = Rule::Table;
  m.model = space::Model::FiniteSet;
  m.table = std::move(t);
  return m;
}

space::Point DynamicsMap::apply(const space::Point& p) const {
  switch (rule) {
    case Rule::Rotation: {
      double x = p.x + alpha;
      x -= std::floor(x);
      return {x, 0.0};
    }
    case Rule::Square:
      return {p.x * p.x, 0.0};
    case Rule::Skew: {
      double x = p.x + alpha;
      x -= std::floor(x);
      double y = p.y + p.x;
      y -= std::floor(y);
      return {x, y};
    }
    case Rule::Table:
      return {static_cast<double>(table[static_cast<std::size_t>(p.x)]), 0.0};
  }
  throw contract_error("DynamicsMap: unknown rule");
}

space::Point DynamicsMap::iterate(const space::Point& p, std::uint64_t n) const {
  switch (rule) {
    case Rule::Rotation: {
      double x = p.x + mul_mod1(static_cast<double>(n), alpha);
      x -= std::floor(x);
      return {x, 0.0};
    }
    case Rule::Skew: {
      // phi^n(x, y) = (x + n a, y + n x + n(n-1)/2 a)
      const double nd = static_cast<double>(n);
      double x = p.x + mul_mod1(nd, alpha);
      x -= std::floor(x);
      const double tri = static_cast<double>(n % 2 == 0 ? (n / 2) * (n - 1) : n * ((n - 1) / 2));
      double y = p.y + mul_mod1(nd, p.x) + mul_mod1(tri, alpha);
      y -= std::floor(y);
      return {x, y};
    }
    default: {
      space::Point q = p;
      for (std::uint64_t i = 0; i < n; ++i) q = apply(q);
      return q;
    }
  }
}

std::optional<std::vector<std::size_t>> DynamicsMap::grid_permutation(
    const space::SampleGrid& g) const {
  if (g.model != model) return std::nullopt;
  constexpr double kSnap = 1e-9;
  std::vector<std::size_t> perm(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const space::Point q = apply(g.points[i]);
    const std::size_t j = g.nearest_index(q);
    double dx = std::abs(q.x - g.points[j].x);
    double dy = std::abs(q.y - g.points[j].y);
    if (model == space::Model::Circle || model == space::Model::Torus2) {
      dx -= std::floor(dx);
      dx = std::min(dx, 1.0 - dx);
      dy -= std::floor(dy);
      dy = std::min(dy, 1.0 - dy);
    }
    if (dx > kSnap || dy > kSnap) return std::nullopt;
    perm[i] = j;
  }
  return perm;
}

// ---------------------------------------------------------------------------

void Cocycle::validate_unitary(double tol) const {
  for (const Mat& m : at) {
    if (m.rows() != dim || m.cols() != dim)
      throw contract_error("Cocycle: matrix dimension mismatch");
    const double defect = (m.adjoint() * m - Mat::Identity(dim, dim)).cwiseAbs().maxCoeff();
    if (defect > tol) throw contract_error("Cocycle: matrix is not unitary within tolerance");
  }
}

Cocycle Cocycle::scalar(std::vector<cxd> values) {
  Cocycle c;
  c.dim = 1;
  c.at.reserve(values.size());
  for (cxd v : values) {
    Mat m(1, 1);
    m(0, 0) = v;
    c.at.push_back(std::move(m));
  }
  return c;
}

KoopmanOperator::KoopmanOperator(DynamicsMap m, GridPtr g, std::optional<Cocycle> c)
    : map(std::move(m)), grid(std::move(g)), cocycle(std::move(c)) {
  if (!grid) throw contract_error("KoopmanOperator: null grid");
  if (cocycle) {
    if (cocycle->at.size() != grid->size())
      throw contract_error("KoopmanOperator: cocycle size does not match grid");
    cocycle->validate_unitary();
  }
}

SampledFunction KoopmanOperator::step(const SampledFunction& f) const {
  f.validate();
  if (f.grid.get() != grid.get())
    throw contract_error("KoopmanOperator: function lives on a different grid");
  if (f.components != components())
    throw contract_error("KoopmanOperator: component count mismatch");
  const auto perm = map.grid_permutation(*grid);
  if (!perm)
    throw contract_error(
        "KoopmanOperator: map does not preserve the grid; supply a closed-form function");
  SampledFunction out = SampledFunction::zero(grid, f.components);
  const int d = f.components;
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const std::size_t src = (*perm)[i];
    if (!cocycle) {
      for (int c = 0; c < d; ++c) out.at(i, c) = f.at(src, c);
    } else if (d == 1) {
      out.at(i) = cocycle->at[i](0, 0) * f.at(src);
    } else {
      for (int c = 0; c < d; ++c) {
        cxd s{0.0, 0.0};
        for (int c2 = 0; c2 < d; ++c2) s += cocycle->at[i](c, c2) * f.at(src, c2);
        out.at(i, c) = s;
      }
    }
  }
  out.lipschitz = f.lipschitz;
  return out;
}

SampledFunction KoopmanOperator::apply_n(const SampledFunction& f, std::uint64_t n) const {
  SampledFunction cur = f;
  for (std::uint64_t i = 0; i < n; ++i) cur = step(cur);
  return cur;
}

SampledFunction KoopmanOperator::sample(const ClosedForm& f) const {
  SampledFunction out = SampledFunction::zero(grid, 1);
  for (std::size_t i = 0; i < grid->size(); ++i) out.at(i) = f.eval(grid->points[i]);
  return out;
}

SampledFunction KoopmanOperator::apply_n(const ClosedForm& f, std::uint64_t n) const {
  if (components() != 1)
    throw contract_error("KoopmanOperator: closed-form path is scalar-valued");
  SampledFunction out = SampledFunction::zero(grid, 1);
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const space::Point q = map.iterate(grid->points[i], n);
    cxd gamma{1.0, 0.0};
    if (cocycle) {
      space::Point p = grid->points[i];
      for (std::uint64_t j = 0; j < n; ++j) {
        gamma *= cocycle->at[grid->nearest_index(p)](0, 0);
        p = map.apply(p);
      }
    }
    out.at(i) = gamma * f.eval(q);
  }
  return out;
}

Mat KoopmanOperator::matrix() const {
  if (components() != 1)
    throw contract_error("KoopmanOperator: matrix form is scalar-valued only");
  const auto perm = map.grid_permutation(*grid);
  if (!perm) throw contract_error("KoopmanOperator: map does not preserve the grid");
  const Eigen::Index d = static_cast<Eigen::Index>(grid->size());
  Mat M = Mat::Zero(d, d);
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const cxd g = cocycle ? cocycle->at[i](0, 0) : cxd{1.0, 0.0};
    M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>((*perm)[i])) += g;
  }
  return M;
}

// ---------------------------------------------------------------------------

bool Modulation::trivial() const {
  if (freq != 0.0) return false;
  for (double t : turns)
    if (t != 0.0) return false;
  return true;
}

cxd Modulation::value(Carrier kind, const GroupElement& g) const {
  if (trivial()) return {1.0, 0.0};
  if (kind == Carrier::OneParam) return cis_turns(mul_mod1(freq, g.t));
  double t = 0.0;
  for (std::size_t i = 0; i < g.pow.size() && i < turns.size(); ++i)
    t += mul_mod1(static_cast<double>(g.pow[i]), turns[i]);
  return cis_turns(t);
}

int SemigroupRep::dim() const {
  if (koopman) return static_cast<int>(koopman->grid->size()) * koopman->components();
  if (kind == Carrier::OneParam) return static_cast<int>(one_param_gen.rows());
  return gens.empty() ? 0 : static_cast<int>(gens[0].rows());
}

std::size_t SemigroupRep::generator_count() const {
  if (kind == Carrier::AbelianK) return gens.size();
  return 1;
}

namespace {

double sample_power_bound(const Mat& S, const space::NormContext& ctx, int n_max) {
  double m = 1.0;
  Mat P = Mat::Identity(S.rows(), S.cols());
  for (int n = 1; n <= n_max; ++n) {
    P = P * S;
    m = std::max(m, operator_norm(P, ctx));
  }
  return m;
}

}  // namespace

SemigroupRep SemigroupRep::powers(Mat S, space::NormContext ctx) {
  if (S.rows() != S.cols()) throw contract_error("SemigroupRep: generator must be square");
  SemigroupRep r;
  r.kind = Carrier::Powers;
  r.ctx = std::move(ctx);
  r.bound = sample_power_bound(S, r.ctx, 64) * (1.0 + 1e-12);
  r.gens.push_back(std::move(S));
  return r;
}

SemigroupRep SemigroupRep::powers_koopman(KoopmanOperator k) {
  SemigroupRep r;
  r.kind = Carrier::Powers;
  r.ctx = space::NormContext::grid_sup(k.grid);
  r.koopman = std::move(k);
  r.bound = 1.0;  // unitary cocycle + composition: grid-sup contraction
  return r;
}

SemigroupRep SemigroupRep::abelian(std::vector<Mat> generators, space::NormContext ctx,
                                   double commute_tol) {
  if (generators.empty()) throw contract_error("SemigroupRep: need at least one generator");
  for (const Mat& g : generators)
    if (g.rows() != g.cols() || g.rows() != generators[0].rows())
      throw contract_error("SemigroupRep: generators must be square, same size");
  for (std::size_t i = 0; i < generators.size(); ++i)
    for (std::size_t j = i + 1; j < generators.size(); ++j) {
      const double scale = 1.0 + operator_norm(generators[i], ctx) * operator_norm(generators[j], ctx);
      const double defect =
          (generators[i] * generators[j] - generators[j] * generators[i]).cwiseAbs().maxCoeff();
      if (defect > commute_tol * scale)
        throw contract_error("SemigroupRep: generators do not commute within tolerance");
    }
  SemigroupRep r;
  r.kind = Carrier::AbelianK;
  r.ctx = std::move(ctx);
  double m = 1.0;
  for (const Mat& g : generators) m = std::max(m, sample_power_bound(g, r.ctx, 16));
  // crude product sampling for cross terms
  Mat w = Mat::Identity(generators[0].rows(), generators[0].cols());
  for (int rep = 0; rep < 16; ++rep) {
    w = w * generators[static_cast<std::size_t>(rep) % generators.size()];
    m = std::max(m, operator_norm(w, r.ctx));
  }
  r.bound = m * (1.0 + 1e-12);
  r.gens = std::move(generators);
  return r;
}

SemigroupRep SemigroupRep::one_parameter(Mat A, double t_max, space::NormContext ctx) {
  if (A.rows() != A.cols()) throw contract_error("SemigroupRep: generator must be square");
  if (!(t_max > 0.0)) throw contract_error("SemigroupRep: t_max must be positive");
  SemigroupRep r;
  r.kind = Carrier::OneParam;
  r.ctx = std::move(ctx);
  double m = 1.0;
  for (int j = 0; j <= 32; ++j) {
    const double t = t_max * j / 32.0;
    m = std::max(m, operator_norm(expm(Mat(t * A)), r.ctx));
  }
  r.bound = m * (1.0 + 1e-12);
  r.one_param_gen = std::move(A);
  r.one_param_t_max = t_max;
  return r;
}

SemigroupRep SemigroupRep::finite_cyclic(Mat U, std::int64_t order, space::NormContext ctx,
                                         double tol) {
  if (order < 1) throw contract_error("SemigroupRep: cyclic order must be >= 1");
  const Mat P = matrix_power(U, static_cast<std::uint64_t>(order));
  if ((P - Mat::Identity(U.rows(), U.cols())).cwiseAbs().maxCoeff() > tol)
    throw contract_error("SemigroupRep: U^order != I within tolerance");
  SemigroupRep r;
  r.kind = Carrier::FiniteCyclic;
  r.ctx = std::move(ctx);
  r.cyclic_order = order;
  r.bound = sample_power_bound(U, r.ctx, static_cast<int>(order)) * (1.0 + 1e-12);
  r.gens.push_back(std::move(U));
  return r;
}

SemigroupRep SemigroupRep::with_modulation(Modulation m) const {
  SemigroupRep r = *this;
  if (kind == Carrier::OneParam) {
    r.modulation = std::move(m);
    return r;
  }
  const std::size_t want = generator_count();
  if (m.turns.size() != want)
    throw contract_error("Modulation: one phase per generator required");
  if (kind == Carrier::FiniteCyclic && !m.turns.empty()) {
    const double frac = mul_mod1(m.turns[0], static_cast<double>(cyclic_order));
    if (std::min(frac, 1.0 - frac) > 1e-9)
      throw contract_error("Modulation: character must respect the cyclic order");
  }
  r.modulation = std::move(m);
  return r;
}

Vec SemigroupRep::apply_vec(const GroupElement& g, const Vec& x) const {
  if (koopman) throw contract_error("apply_vec: representation acts on sampled functions");
  cxd chi = modulation.value(kind, g);
  switch (kind) {
    case Carrier::Powers: {
      if (g.pow.size() != 1 || g.pow[0] < 0)
        throw contract_error("apply_vec: element outside the carrier (N,+)");
      return chi * power_apply(gens[0], static_cast<std::uint64_t>(g.pow[0]), x);
    }
    case Carrier::AbelianK: {
      if (g.pow.size() != gens.size())
        throw contract_error("apply_vec: exponent count must match generators");
      Vec y = x;
      for (std::size_t i = 0; i < gens.size(); ++i) {
        const std::int64_t w = g.pow[i];
        if (w >= 0) {
          y = power_apply(gens[i], static_cast<std::uint64_t>(w), y);
        } else {
          Eigen::PartialPivLU<Mat> lu(gens[i]);
          const Mat inv = lu.inverse();
          if (!inv.allFinite())
            throw contract_error("apply_vec: negative exponent requires an invertible generator");
          y = power_apply(inv, static_cast<std::uint64_t>(-w), y);
        }
      }
      return chi * y;
    }
    case Carrier::OneParam:
      if (g.t < 0.0) throw contract_error("apply_vec: element outside the carrier (R+,+)");
      return chi * matrix_exponential_apply(one_param_gen, g.t, x);
    case Carrier::FiniteCyclic: {
      if (g.pow.size() != 1) throw contract_error("apply_vec: cyclic element is one exponent");
      std::int64_t n = g.pow[0] % cyclic_order;
      if (n < 0) n += cyclic_order;
      // character already validated compatible with the order
      chi = modulation.value(kind, GroupElement::n(n));
      return chi * power_apply(gens[0], static_cast<std::uint64_t>(n), x);
    }
  }
  throw contract_error("apply_vec: unknown carrier");
}

SampledFunction SemigroupRep::apply_fn(const GroupElement& g, const SampledFunction& f) const {
  if (!koopman) throw contract_error("apply_fn: representation acts on coordinate vectors");
  if (g.pow.size() != 1 || g.pow[0] < 0)
    throw contract_error("apply_fn: element outside the carrier (N,+)");
  SampledFunction out = koopman->apply_n(f, static_cast<std::uint64_t>(g.pow[0]));
  const cxd chi = modulation.value(kind, g);
  if (chi != cxd{1.0, 0.0})
    kernels::active().cscale(out.values.size(), chi, out.values.data());
  return out;
}

std::vector<Mat> SemigroupRep::generator_matrices(const std::vector<double>& one_param_times) const {
  std::vector<Mat> out;
  if (kind == Carrier::OneParam) {
    std::vector<double> times = one_param_times;
    if (times.empty()) times = {one_param_t_max};
    for (double t : times) {
      if (t < 0.0) throw contract_error("generator_matrices: negative time");
      Mat m = expm(Mat(t * one_param_gen));
      m *= modulation.value(kind, GroupElement::time(t));
      out.push_back(std::move(m));
    }
    return out;
  }
  std::vector<Mat> base;
  if (koopman) {
    base.push_back(koopman->matrix());
  } else {
    base = gens;
  }
  for (std::size_t i = 0; i < base.size(); ++i) {
    GroupElement e;
    e.pow.assign(base.size(), 0);
    e.pow[i] = 1;
    base[i] *= modulation.value(kind, e);
    out.push_back(std::move(base[i]));
  }
  return out;
}

// ---------------------------------------------------------------------------

FolnerSequence FolnerSequence::nat_intervals(
    const std::vector<std::pair<std::int64_t, std::int64_t>>& a_len) {
  FolnerSequence seq;
  std::int64_t prev_len = 0;
  for (const auto& [a, len] : a_len) {
    if (len <= 0) throw contract_error("FolnerSequence: interval length must be positive");
    if (a < 0) throw contract_error("FolnerSequence: interval start must be in N");
    if (len <= prev_len)
      throw contract_error("FolnerSequence: interval lengths must strictly increase");
    prev_len = len;
    FolnerSet F;
    F.label = "[" + std::to_string(a) + "," + std::to_string(a + len) + ")";
    F.elements.reserve(static_cast<std::size_t>(len));
    for (std::int64_t n = a; n < a + len; ++n) F.elements.push_back(GroupElement::n(n));
    seq.sets.push_back(std::move(F));
  }
  return seq;
}

FolnerSequence FolnerSequence::boxes(
    const std::vector<std::pair<std::vector<std::int64_t>, std::vector<std::int64_t>>>& lo_len) {
  FolnerSequence seq;
  for (const auto& [lo, len] : lo_len) {
    if (lo.size() != len.size() || lo.empty())
      throw contract_error("FolnerSequence: box lo/len mismatch");
    std::size_t total = 1;
    for (std::int64_t l : len) {
      if (l <= 0) throw contract_error("FolnerSequence: box side must be positive");
      total *= static_cast<std::size_t>(l);
    }
    FolnerSet F;
    F.label = "box" + std::to_string(len[0]);
    F.elements.reserve(total);
    std::vector<std::int64_t> w(lo.size(), 0);
    for (std::size_t idx = 0; idx < total; ++idx) {
      std::size_t rem = idx;
      for (std::size_t d = lo.size(); d-- > 0;) {
        w[d] = lo[d] + static_cast<std::int64_t>(rem % static_cast<std::size_t>(len[d]));
        rem /= static_cast<std::size_t>(len[d]);
      }
      F.elements.push_back(GroupElement::word(w));
    }
    seq.sets.push_back(std::move(F));
  }
  return seq;
}

FolnerSequence FolnerSequence::whole_finite_group(std::int64_t order) {
  if (order < 1) throw contract_error("FolnerSequence: order must be >= 1");
  FolnerSequence seq;
  FolnerSet F;
  F.label = "Z" + std::to_string(order);
  for (std::int64_t n = 0; n < order; ++n) F.elements.push_back(GroupElement::n(n));
  seq.sets.push_back(std::move(F));
  return seq;
}

double folner_defect_ratio(const FolnerSet& F, const GroupElement& g, Carrier kind,
                           std::int64_t cyclic_order) {
  if (F.elements.empty()) throw contract_error("folner_defect_ratio: empty set");
  auto key = [&](const GroupElement& e) {
    std::vector<std::int64_t> k = e.pow;
    if (kind == Carrier::FiniteCyclic && cyclic_order > 0)
      for (auto& v : k) {
        v %= cyclic_order;
        if (v < 0) v += cyclic_order;
      }
    return k;
  };
  std::set<std::vector<std::int64_t>> a, b;
  for (const auto& e : F.elements) {
    a.insert(key(e));
    GroupElement shifted = e;
    for (std::size_t i = 0; i < shifted.pow.size() && i < g.pow.size(); ++i)
      shifted.pow[i] += g.pow[i];
    b.insert(key(shifted));
  }
  std::size_t sym = 0;
  for (const auto& k : a)
    if (!b.count(k)) ++sym;
  for (const auto& k : b)
    if (!a.count(k)) ++sym;
  return static_cast<double>(sym) / static_cast<double>(F.elements.size());
}

}  // namespace ergonet::ops
