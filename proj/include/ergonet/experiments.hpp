#pragma once

#include <map>

#include "ergonet/nets.hpp"

namespace ergonet::experiments {

/// Skew product (x, y) -> (x + a, y + x) on T^2 with observable
/// f(x, y) = sum_k c_k e^{2 pi i (k x + l0 y)}, l0 != 0. The action on the
/// characters e_{k,l} is a weighted shift, so f has no eigenfunction
/// component and every mean ergodic projection of the modulated family
/// vanishes on it.
struct SkewProductModel {
  double alpha = 0.61803398874989485;  // (sqrt(5)-1)/2
  std::int64_t l0 = 1;
  std::map<std::int64_t, cxd> coeffs;  // k -> c_k
  std::uint64_t n_max = 1ull << 14;
  int oversample = 16;  // sample count factor for the sup certificates

  static SkewProductModel default_model();
  void validate() const;
  std::int64_t coeff_degree() const;  // K = max |k|
};

/// Phase of S^n e_{k,l} = e^{2 pi i a (n k + l n(n-1)/2)} e_{k+nl, l}, in turns.
double phase_turns(double alpha, std::uint64_t n, std::int64_t k, std::int64_t l);

/// One-variable reduction of (1/N) sum_n lambda^n S^n f at a fixed lambda
/// (lambda = e^{2 pi i l0 t}); the sup over (x,y) of the modulated average
/// equals the sup of this polynomial over the circle.
space::TrigPoly merged_cesaro_poly(const SkewProductModel& m, std::uint64_t N,
                                   double lambda_shift_turns = 0.0);

struct WWBounds {
  double sup_lower = 0.0;
  double sup_upper = 0.0;
  std::int64_t degree = 0;
  std::uint64_t terms = 0;  // Cesaro length or Abel truncation
};

/// Certified bounds on sup_{lambda in T} ||(1/N) sum_{n<N} lambda^n S^n f||_inf.
/// Single-k coefficient supports merge the lambda-sup exactly; multi-k
/// supports use a two-variable Bernstein certificate.
WWBounds ww_cesaro_sup(const SkewProductModel& m, std::uint64_t N);

/// Same for the Abel means at parameter r; the geometric tail is folded into
/// sup_upper. tail_eps is relative to ||f||_inf.
WWBounds ww_abel_sup(const SkewProductModel& m, double r, double tail_eps = 1e-3);

/// Certified bounds on ||f||_inf itself (the N = 1 case).
space::SupBounds observable_sup(const SkewProductModel& m);

struct DirichletSupResult {
  double grid_sup = 0.0;          // max over the lambda grid, lambda = 1 excluded
  double lobe_value = 0.0;        // |(1/N) sum| at theta = pi/N, direct summation
  double lobe_closed_form = 0.0;  // 1 / (N sin(pi/(2N)))
};
/// Non-uniformity witness for the identity-operator family; requires
/// m >= 8N so the grid resolves the main lobe.
DirichletSupResult dirichlet_grid_sup(std::uint64_t N, std::size_t m);

/// ||A_{N2} f - A_{N1} f||_grid-sup for the squaring map, f in closed form,
/// evaluated by iterated squaring of the grid points.
double square_map_cauchy_defect(const ops::ClosedForm& f, const space::SampleGrid& grid,
                                std::uint64_t N1, std::uint64_t N2);

/// Pointwise Cesaro average of the squaring map at a single point.
cxd square_map_cesaro_at(const ops::ClosedForm& f, double x, std::uint64_t N);

/// Koopman matrix of the nearest-grid-point rounding of x -> x^2, plus the
/// grid it lives on (dyadic tail toward the repelling fixed point 1).
std::pair<ops::Mat, space::GridPtr> square_map_grid_model(int uniform_points, int dyadic_jmax);

}  // namespace ergonet::experiments
