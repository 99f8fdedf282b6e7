#include "ergonet/models.hpp"

#include <Eigen/QR>

namespace ergonet::models {

Mat swap2() {
  Mat s(2, 2);
  s << cxd{0, 0}, cxd{1, 0}, cxd{1, 0}, cxd{0, 0};
  return s;
}

Mat stochastic_on_functions() {
  Mat s(2, 2);
  s << cxd{0.5, 0}, cxd{0.5, 0}, cxd{0.25, 0}, cxd{0.75, 0};
  return s;
}

Mat random_unitary(Rng& rng, int d) {
  Mat g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = rng.cgauss();
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();
  // fix the phase convention so the draw is well-defined
  const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j) {
    const cxd rjj = r(j, j);
    if (std::abs(rjj) > 0.0) q.col(j) *= rjj / std::abs(rjj);
  }
  return q;
}

Mat random_scaled_contraction(Rng& rng, int d, const space::NormContext& ctx, double target) {
  Mat g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = rng.cgauss();
  const double n = ops::operator_norm(g, ctx);
  if (n == 0.0) return Mat::Identity(d, d) * target;
  return Mat(g * (target / n));
}

Mat random_peripheral_contraction(Rng& rng, int d) {
  if (d < 3) throw contract_error("random_peripheral_contraction: need d >= 3");
  const int n_fix = 1 + static_cast<int>(rng.below(2) == 0 && d > 4 ? 1 : 0);
  const int n_uni = 1 + static_cast<int>(rng.below(2));
  const int n_per = std::min(n_fix + n_uni, d - 1);
  const int n_c = d - n_per;

  Mat core = Mat::Zero(d, d);
  int slot = 0;
  for (; slot < n_fix && slot < n_per; ++slot) core(slot, slot) = cxd{1.0, 0.0};
  for (; slot < n_per; ++slot) core(slot, slot) = cis_turns(rng.uniform(0.05, 0.95));
  if (n_c > 0) {
    const space::NormContext two = space::NormContext::p(2);
    core.bottomRightCorner(n_c, n_c) =
        random_scaled_contraction(rng, n_c, two, rng.uniform(0.4, 0.85));
  }
  const Mat q = random_unitary(rng, d);
  return Mat(q * core * q.adjoint());
}

std::vector<Mat> random_commuting_bounded(Rng& rng, int d, int k) {
  if (d < 2 || k < 1) throw contract_error("random_commuting_bounded: bad sizes");
  // mildly non-normal change of basis with controlled conditioning
  Mat v = random_unitary(rng, d);
  Mat upper = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) upper(i, j) = 0.15 * rng.cgauss();
  v = v * (Mat::Identity(d, d) + upper);

  const Mat vinv = v.partialPivLu().solve(Mat::Identity(d, d));
  const int n_fix = 1 + static_cast<int>(rng.below(2));
  std::vector<Mat> gens;
  // slot classes are shared so the family commutes and has a joint fix space
  std::vector<int> slot_class(static_cast<std::size_t>(d));
  for (int s = 0; s < d; ++s)
    slot_class[static_cast<std::size_t>(s)] = s < n_fix ? 0 : (rng.below(2) == 0 ? 1 : 2);
  for (int i = 0; i < k; ++i) {
    Mat diag = Mat::Zero(d, d);
    for (int s = 0; s < d; ++s) {
      switch (slot_class[static_cast<std::size_t>(s)]) {
        case 0: diag(s, s) = cxd{1.0, 0.0}; break;
        case 1: diag(s, s) = cis_turns(rng.uniform(0.05, 0.95)); break;
        default: diag(s, s) = rng.uniform(0.1, 0.85) * rng.unit_complex(); break;
      }
    }
    gens.push_back(Mat(v * diag * vinv));
  }
  return gens;
}

Vec random_vector(Rng& rng, int d) {
  Vec x(d);
  for (int i = 0; i < d; ++i) x[i] = rng.cgauss();
  return x;
}

}  // namespace ergonet::models
