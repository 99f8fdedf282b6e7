#include "ergonet/experiments.hpp"

#include <cmath>
#include <numbers>

#include "ergonet/kernels.hpp"

namespace ergonet::experiments {

SkewProductModel SkewProductModel::default_model() {
  SkewProductModel m;
  m.coeffs[0] = cxd{1.0, 0.0};
  return m;
}

void SkewProductModel::validate() const {
  if (l0 == 0) throw contract_error("SkewProductModel: l0 must be nonzero");
  if (coeffs.empty()) throw contract_error("SkewProductModel: empty coefficient set");
  if (oversample < 8) throw contract_error("SkewProductModel: oversample must be >= 8");
  if (n_max < 1) throw contract_error("SkewProductModel: n_max must be >= 1");
}

std::int64_t SkewProductModel::coeff_degree() const {
  std::int64_t k = 0;
  for (const auto& [key, c] : coeffs) k = std::max<std::int64_t>(k, key < 0 ? -key : key);
  return k;
}

double phase_turns(double alpha, std::uint64_t n, std::int64_t k, std::int64_t l) {
  const std::int64_t ni = static_cast<std::int64_t>(n);
  const std::int64_t tri = (ni % 2 == 0) ? (ni / 2) * (ni - 1) : ni * ((ni - 1) / 2);
  const std::int64_t m = ni * k + l * tri;
  return mul_mod1(alpha, static_cast<double>(m));
}

namespace {

struct FreqWindow {
  std::int64_t lo = 0, hi = 0;
};

FreqWindow cesaro_freq_window(const SkewProductModel& m, std::uint64_t N) {
  std::int64_t kmin = m.coeffs.begin()->first;
  std::int64_t kmax = m.coeffs.rbegin()->first;
  const std::int64_t shift = static_cast<std::int64_t>(N - 1) * m.l0;
  FreqWindow w;
  w.lo = std::min(kmin, kmin + shift);
  w.hi = std::max(kmax, kmax + shift);
  return w;
}

/// Weighted merged polynomial: sum over (n, k) of w_n c_k phase(n,k,l0) at
/// frequency k + n l0, with coefficients optionally twisted by
/// e^{-2 pi i k theta} (the multi-k certificate) and lambda^n = e^{2 pi i n t}.
space::TrigPoly build_poly(const SkewProductModel& m, std::uint64_t terms,
                           const std::vector<double>& weights, double lambda_turns,
                           double theta_turns) {
  FreqWindow w = cesaro_freq_window(m, terms);
  space::TrigPoly p;
  p.min_freq = w.lo;
  p.coeff.assign(static_cast<std::size_t>(w.hi - w.lo + 1), cxd{0.0, 0.0});
  for (std::uint64_t n = 0; n < terms; ++n) {
    const cxd lam = (lambda_turns == 0.0)
                        ? cxd{1.0, 0.0}
                        : cis_turns(mul_mod1(static_cast<double>(n), lambda_turns));
    for (const auto& [k, ck] : m.coeffs) {
      const double ph = phase_turns(m.alpha, n, k, m.l0);
      cxd coeff = ck * cis_turns(ph) * lam * weights[n];
      if (theta_turns != 0.0)
        coeff *= cis_turns(-mul_mod1(static_cast<double>(k), theta_turns));
      const std::int64_t freq = k + static_cast<std::int64_t>(n) * m.l0;
      p.coeff[static_cast<std::size_t>(freq - w.lo)] += coeff;
    }
  }
  return p;
}

WWBounds certified_bounds(const SkewProductModel& m, std::uint64_t terms,
                          const std::vector<double>& weights) {
  const bool single_k = (m.coeffs.size() == 1);
  const std::int64_t K = m.coeff_degree();
  WWBounds out;
  out.terms = terms;

  if (single_k) {
    // |e^{-2 pi i k theta}| = 1: the lambda-sup is exact after merging
    const space::TrigPoly p = build_poly(m, terms, weights, 0.0, 0.0);
    out.degree = p.degree();
    const std::size_t M = std::max<std::size_t>(
        static_cast<std::size_t>(m.oversample) * static_cast<std::size_t>(std::max<std::int64_t>(out.degree, 1)),
        64);
    const space::SupBounds b = space::certified_sup_norm(p, M);
    out.sup_lower = b.lower;
    out.sup_upper = b.upper;
    return out;
  }

  // multi-k: genuine two-variable polynomial Q(theta, u); Bernstein correction
  // in both variables
  FreqWindow w = cesaro_freq_window(m, terms);
  const std::int64_t Du = std::max(std::llabs(w.lo), std::llabs(w.hi));
  out.degree = Du;
  const std::size_t Mu = std::max<std::size_t>(
      static_cast<std::size_t>(m.oversample) * static_cast<std::size_t>(std::max<std::int64_t>(Du, 1)), 64);
  const std::size_t Mt = std::max<std::size_t>(
      4 * static_cast<std::size_t>(m.oversample) * static_cast<std::size_t>(std::max<std::int64_t>(K, 1)), 64);
  const double shrink = 1.0 - std::numbers::pi * static_cast<double>(Du) / static_cast<double>(Mu) -
                        std::numbers::pi * static_cast<double>(K) / static_cast<double>(Mt);
  if (!(shrink > 0.0))
    throw contract_error("ww certificate: oversampling insufficient for the 2-D bound");
  double lower = 0.0;
  for (std::size_t a = 0; a < Mt; ++a) {
    const double theta = static_cast<double>(a) / static_cast<double>(Mt);
    const space::TrigPoly p = build_poly(m, terms, weights, 0.0, theta);
    const std::vector<cxd> vals = p.eval_equispaced(Mu);
    lower = std::max(lower, std::sqrt(kernels::active().sup_abs2(vals.size(), vals.data())));
  }
  out.sup_lower = lower;
  out.sup_upper = lower / shrink;
  return out;
}

}  // namespace

space::TrigPoly merged_cesaro_poly(const SkewProductModel& m, std::uint64_t N,
                                   double lambda_turns) {
  m.validate();
  if (N < 1) throw contract_error("merged_cesaro_poly: N must be >= 1");
  std::vector<double> weights(N, 1.0 / static_cast<double>(N));
  return build_poly(m, N, weights, lambda_turns, 0.0);
}

WWBounds ww_cesaro_sup(const SkewProductModel& m, std::uint64_t N) {
  m.validate();
  if (N < 1) throw contract_error("ww_cesaro_sup: N must be >= 1");
  if (N > m.n_max)
    throw contract_error("ww_cesaro_sup: N exceeds the model's declared n_max");
  std::vector<double> weights(N, 1.0 / static_cast<double>(N));
  return certified_bounds(m, N, weights);
}

space::SupBounds observable_sup(const SkewProductModel& m) {
  m.validate();
  space::TrigPoly p;
  const std::int64_t kmin = m.coeffs.begin()->first;
  const std::int64_t kmax = m.coeffs.rbegin()->first;
  p.min_freq = kmin;
  p.coeff.assign(static_cast<std::size_t>(kmax - kmin + 1), cxd{0.0, 0.0});
  for (const auto& [k, c] : m.coeffs) p.coeff[static_cast<std::size_t>(k - kmin)] = c;
  const std::size_t M = std::max<std::size_t>(
      static_cast<std::size_t>(m.oversample) *
          static_cast<std::size_t>(std::max<std::int64_t>(p.degree(), 1)),
      64);
  return space::certified_sup_norm(p, M);
}

WWBounds ww_abel_sup(const SkewProductModel& m, double r, double tail_eps) {
  m.validate();
  if (!(r > 0.0 && r < 1.0)) throw contract_error("ww_abel_sup: r must lie in (0,1)");
  if (!(tail_eps > 0.0 && tail_eps < 1.0))
    throw contract_error("ww_abel_sup: tail_eps must lie in (0,1)");
  std::uint64_t N0 = 1;
  if (r > tail_eps)
    N0 = static_cast<std::uint64_t>(std::max(1.0, std::ceil(std::log(tail_eps) / std::log(r))));
  if (N0 > m.n_max)
    throw contract_error("ww_abel_sup: truncation exceeds n_max; raise tail_eps or n_max");
  std::vector<double> weights(N0);
  double rn = 1.0;
  for (std::uint64_t n = 0; n < N0; ++n) {
    weights[n] = (1.0 - r) * rn;
    rn *= r;
  }
  WWBounds out = certified_bounds(m, N0, weights);
  const double tail = std::pow(r, static_cast<double>(N0)) * observable_sup(m).upper;
  out.sup_upper += tail;
  out.sup_lower = std::max(0.0, out.sup_lower - tail);
  return out;
}

DirichletSupResult dirichlet_grid_sup(std::uint64_t N, std::size_t m) {
  if (N < 1) throw contract_error("dirichlet_grid_sup: N must be >= 1");
  if (m < 8 * N) throw contract_error("dirichlet_grid_sup: need m >= 8N to resolve the main lobe");
  DirichletSupResult res;

  double sup = 0.0;
  for (std::size_t j = 1; j < m; ++j) {
    const double t = static_cast<double>(j) / static_cast<double>(m);
    const double r = mul_mod1(static_cast<double>(N), t);
    const double val = std::abs(std::sin(std::numbers::pi * r)) /
                       (static_cast<double>(N) * std::sin(std::numbers::pi * t));
    if (val > sup) sup = val;
  }
  res.grid_sup = sup;

  const double tstar = 1.0 / (2.0 * static_cast<double>(N));
  PairwiseSum re, im;
  for (std::uint64_t n = 0; n < N; ++n) {
    const cxd z = cis_turns(mul_mod1(static_cast<double>(n), tstar));
    re.add(z.real());
    im.add(z.imag());
  }
  res.lobe_value = std::abs(cxd{re.result(), im.result()}) / static_cast<double>(N);
  res.lobe_closed_form =
      1.0 / (static_cast<double>(N) * std::sin(std::numbers::pi / (2.0 * static_cast<double>(N))));
  return res;
}

cxd square_map_cesaro_at(const ops::ClosedForm& f, double x, std::uint64_t N) {
  PairwiseSum re, im;
  double p = x;
  for (std::uint64_t n = 0; n < N; ++n) {
    if (n > 0) p = p * p;
    const cxd v = f.eval({p, 0.0});
    re.add(v.real());
    im.add(v.imag());
  }
  return cxd{re.result(), im.result()} / static_cast<double>(N);
}

double square_map_cauchy_defect(const ops::ClosedForm& f, const space::SampleGrid& grid,
                                std::uint64_t N1, std::uint64_t N2) {
  if (!(N1 < N2)) throw contract_error("square_map_cauchy_defect: need N1 < N2");
  if (grid.model != space::Model::Interval)
    throw contract_error("square_map_cauchy_defect: interval grid required");
  double defect = 0.0;
  for (const auto& pt : grid.points) {
    PairwiseSum re, im;
    double p = pt.x;
    cxd a1{0.0, 0.0};
    for (std::uint64_t n = 0; n < N2; ++n) {
      if (n > 0) p = p * p;
      const cxd v = f.eval({p, 0.0});
      re.add(v.real());
      im.add(v.imag());
      if (n + 1 == N1) a1 = cxd{re.result(), im.result()} / static_cast<double>(N1);
    }
    const cxd a2 = cxd{re.result(), im.result()} / static_cast<double>(N2);
    defect = std::max(defect, std::abs(a2 - a1));
  }
  return defect;
}

std::pair<ops::Mat, space::GridPtr> square_map_grid_model(int uniform_points, int dyadic_jmax) {
  space::GridPtr grid = space::SampleGrid::interval_with_dyadic_tail(uniform_points, dyadic_jmax);
  const Eigen::Index d = static_cast<Eigen::Index>(grid->size());
  ops::Mat M = ops::Mat::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const double x = grid->points[static_cast<std::size_t>(i)].x;
    const std::size_t j = grid->nearest_index({x * x, 0.0});
    M(i, static_cast<Eigen::Index>(j)) = cxd{1.0, 0.0};
  }
  return {M, grid};
}

}  // namespace ergonet::experiments
