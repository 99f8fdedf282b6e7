#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "ergonet/experiments.hpp"
#include "ergonet/mean_ergodic.hpp"
#include "ergonet/models.hpp"

using namespace ergonet;
using namespace ergonet::mer;
using ops::GroupElement;
using ops::SemigroupRep;

namespace {

Mat planar_rotation(double turns) {
  Mat r(2, 2);
  const double c = std::cos(kTwoPi * turns), s = std::sin(kTwoPi * turns);
  r << cxd{c, 0}, cxd{-s, 0}, cxd{s, 0}, cxd{c, 0};
  return r;
}

// spectral projection onto the eigenvalue-1 space via eigendecomposition
Mat eigen_projection_oracle(const Mat& S, double tol = 1e-6) {
  Eigen::ComplexEigenSolver<Mat> es(S);
  const auto& vals = es.eigenvalues();
  Mat V = es.eigenvectors();
  Mat D = Mat::Zero(S.rows(), S.cols());
  for (Eigen::Index i = 0; i < vals.size(); ++i)
    if (std::abs(vals(i) - cxd{1.0, 0.0}) < tol) D(i, i) = cxd{1.0, 0.0};
  return Mat(V * D * V.partialPivLu().solve(Mat(Mat::Identity(S.rows(), S.cols()))));
}

std::vector<nets::NetScheme> cesaro_ladder() {
  std::vector<nets::NetScheme> v;
  for (int e = 4; e <= 20; e += 4) v.push_back(nets::Cesaro{1ull << e});
  return v;
}

const Mat kHalf = [] {
  Mat p(2, 2);
  p << cxd{0.5, 0}, cxd{0.5, 0}, cxd{0.5, 0}, cxd{0.5, 0};
  return p;
}();

}  // namespace

TEST_CASE("fix spaces: swap, irrational rotation, identity") {
  const auto f = fix_space({models::swap2()}, 1e-8);
  REQUIRE(f.dim() == 1);
  CHECK(std::abs(std::abs(f.basis(0, 0)) - 1.0 / std::sqrt(2.0)) <= 1e-12);
  CHECK(std::abs(f.basis(0, 0) - f.basis(1, 0)) <= 1e-12);

  CHECK(fix_space({planar_rotation(0.1234567)}, 1e-8).dim() == 0);
  CHECK(fix_space({Mat(Mat::Identity(5, 5))}, 1e-8).dim() == 5);
}

TEST_CASE("dual fix spaces: swap, stochastic chain, identity") {
  CHECK(dual_fix_space({models::swap2()}, 1e-8).dim() == 1);

  // functions action [[.5,.5],[.25,.75]]: dual fix = stationary direction (1,2)
  const auto df = dual_fix_space({models::stochastic_on_functions()}, 1e-8);
  REQUIRE(df.dim() == 1);
  const cxd a = df.basis(0, 0), b = df.basis(1, 0);
  CHECK(std::abs(b / a - cxd{2.0, 0.0}) <= 1e-9);

  CHECK(dual_fix_space({Mat(Mat::Identity(4, 4))}, 1e-8).dim() == 4);
}

TEST_CASE("range spaces: identity, swap, random contraction") {
  CHECK(range_space({Mat(Mat::Identity(3, 3))}, 1e-8).dim() == 0);
  const auto r = range_space({models::swap2()}, 1e-8);
  REQUIRE(r.dim() == 1);
  CHECK(std::abs(r.basis(0, 0) + r.basis(1, 0)) <= 1e-12);  // direction (1,-1)

  Rng rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const Mat S = models::random_peripheral_contraction(rng, 8);
    const int fdim = fix_space({S}, 1e-8).dim();
    CHECK(range_space({S}, 1e-8).dim() == 8 - fdim);
  }
}

TEST_CASE("separation check: positive cases and the x^2-map witness") {
  CHECK(separation_check(dual_fix_space({models::swap2()}, 1e-8),
                         fix_space({models::swap2()}, 1e-8), 1e-8)
            .separates);
  CHECK(separation_check(dual_fix_space({Mat(Mat::Identity(3, 3))}, 1e-8),
                         fix_space({Mat(Mat::Identity(3, 3))}, 1e-8), 1e-8)
            .separates);

  auto [S, grid] = experiments::square_map_grid_model(256, 40);
  // raw kernel of (S - I) holds the two basin indicators
  CHECK(fix_space({S}, 1e-8).dim() == 2);
  GridContinuity gc{grid, 1e6};
  const auto fix = fix_space_grid({S}, 1e-8, gc);
  REQUIRE(fix.dim() == 1);  // constants only, after the continuity filter
  const auto dual = dual_fix_space({S}, 1e-8);
  REQUIRE(dual.dim() == 2);
  const auto sep = separation_check(dual, fix, 1e-8);
  CHECK(!sep.separates);
  REQUIRE(sep.witness.size() == static_cast<Eigen::Index>(grid->size()));
  // witness ~ (delta_0 - delta_1)/sqrt(2): pairing with the constant 1 vanishes
  const Vec ones = Vec::Constant(sep.witness.size(), cxd{1.0, 0.0});
  CHECK(std::abs(sep.witness.dot(ones)) <= 1e-12);
  // mass concentrated on the two fixed grid points 0 and 1
  double mass01 = 0.0;
  const std::size_t i0 = grid->nearest_index({0.0, 0.0});
  const std::size_t i1 = grid->nearest_index({1.0, 0.0});
  mass01 = std::norm(sep.witness[static_cast<Eigen::Index>(i0)]) +
           std::norm(sep.witness[static_cast<Eigen::Index>(i1)]);
  CHECK(mass01 == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("mean ergodic projection: identity, swap, stochastic chain") {
  const Mat id3 = Mat::Identity(3, 3);
  const Mat p_id = mean_ergodic_projection(fix_space({id3}, 1e-8), range_space({id3}, 1e-8), 1e-6);
  CHECK((p_id - id3).cwiseAbs().maxCoeff() <= 1e-12);

  const Mat sw = models::swap2();
  const Mat p_sw = mean_ergodic_projection(fix_space({sw}, 1e-8), range_space({sw}, 1e-8), 1e-6);
  CHECK((p_sw - kHalf).cwiseAbs().maxCoeff() <= 1e-12);

  const Mat st = models::stochastic_on_functions();
  const Mat p_st = mean_ergodic_projection(fix_space({st}, 1e-8), range_space({st}, 1e-8), 1e-6);
  Mat want(2, 2);
  want << cxd{1.0 / 3, 0}, cxd{2.0 / 3, 0}, cxd{1.0 / 3, 0}, cxd{2.0 / 3, 0};
  CHECK((p_st - want).cwiseAbs().maxCoeff() <= 1e-10);
  // cross-validate against the eigendecomposition oracle
  CHECK((p_st - eigen_projection_oracle(st)).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("projection range/kernel correctness on random instances") {
  Rng rng(22);
  for (int trial = 0; trial < 20; ++trial) {
    const Mat S = models::random_peripheral_contraction(rng, 6);
    const auto fix = fix_space({S}, 1e-8);
    const auto rng_sp = range_space({S}, 1e-8);
    const Mat P = mean_ergodic_projection(fix, rng_sp, 1e-6);
    for (int j = 0; j < fix.dim(); ++j)
      CHECK((P * fix.basis.col(j) - fix.basis.col(j)).norm() <= 1e-9);
    for (int j = 0; j < rng_sp.dim(); ++j)
      CHECK((P * rng_sp.basis.col(j)).norm() <= 1e-9);
    CHECK((P - eigen_projection_oracle(S)).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("zero element check: pass, tight pass, deliberate failure") {
  const Mat id2 = Mat::Identity(2, 2);
  const auto ok = zero_element_check(id2, {id2}, 1e-10);
  CHECK(ok.pass);
  CHECK(ok.ps_defect == 0.0);

  const auto sw_ok = zero_element_check(kHalf, {models::swap2()}, 1e-12);
  CHECK(sw_ok.pass);

  const auto bad = zero_element_check(id2, {models::swap2()}, 1e-10);
  CHECK(!bad.pass);
  CHECK(bad.ps_defect == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("orbit subspaces") {
  Rng rng(23);
  const Vec x = models::random_vector(rng, 4);
  CHECK(orbit_subspace({Mat(Mat::Identity(4, 4))}, x, 1e-8).dim() == 1);

  Vec e0(2);
  e0 << cxd{1, 0}, cxd{0, 0};
  CHECK(orbit_subspace({models::swap2()}, e0, 1e-8).dim() == 2);

  Mat diag = Mat::Zero(2, 2);
  diag(0, 0) = cxd{1, 0};
  diag(1, 1) = cxd{0.5, 0};
  CHECK(orbit_subspace({diag}, e0, 1e-8).dim() == 1);
}

TEST_CASE("equivalence battery: worked instances all-true") {
  auto swap_rep = SemigroupRep::powers(models::swap2());
  const auto rep1 = equivalence_battery(swap_rep, std::nullopt, cesaro_ladder());
  CHECK(rep1.consistent);
  for (const auto& c : rep1.conditions) CHECK(c.pass);
  REQUIRE(rep1.projection.has_value());
  CHECK((*rep1.projection - kHalf).cwiseAbs().maxCoeff() <= 1e-10);

  auto id_rep = SemigroupRep::powers(Mat(Mat::Identity(4, 4)));
  const auto rep2 = equivalence_battery(id_rep, std::nullopt, cesaro_ladder());
  CHECK(rep2.consistent);
  for (const auto& c : rep2.conditions) CHECK(c.pass);
  CHECK((*rep2.projection - Mat::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("equivalence battery: random 2-norm contractions are mean ergodic") {
  Rng rng(24);
  for (int trial = 0; trial < 15; ++trial) {
    const int d = 3 + static_cast<int>(rng.below(14));
    auto rep = SemigroupRep::powers(models::random_peripheral_contraction(rng, d));
    const auto out = equivalence_battery(rep, std::nullopt, cesaro_ladder());
    CHECK(out.consistent);
    for (const auto& c : out.conditions) CHECK(c.pass);
    CHECK((*out.projection - eigen_projection_oracle(rep.gens[0])).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("equivalence battery: commuting families via box ladders") {
  Rng rng(25);
  for (int trial = 0; trial < 8; ++trial) {
    const int d = 3 + static_cast<int>(rng.below(6));
    const int k = 1 + static_cast<int>(rng.below(3));
    auto rep = SemigroupRep::abelian(models::random_commuting_bounded(rng, d, k));
    std::vector<nets::NetScheme> ladder;
    for (int e = 4; e <= 16; e += 4) {
      nets::FolnerBox box;
      box.lo.assign(static_cast<std::size_t>(k), 0);
      box.len.assign(static_cast<std::size_t>(k), static_cast<std::int64_t>(1) << e);
      ladder.push_back(box);
    }
    const auto out = equivalence_battery(rep, std::nullopt, ladder);
    CHECK(out.consistent);
    for (const auto& c : out.conditions) CHECK(c.pass);
  }
}

TEST_CASE("battery per-vector mode realizes the orbit-subspace reduction") {
  Rng rng(26);
  Mat diag = Mat::Zero(3, 3);
  diag(0, 0) = cxd{1, 0};
  diag(1, 1) = cxd{0.5, 0};
  diag(2, 2) = cis_turns(0.23);
  auto rep = SemigroupRep::powers(diag);
  Vec x(3);
  x << cxd{1, 0}, cxd{0, 0}, cxd{0, 0};  // x in the fix space
  const auto out = equivalence_battery(rep, std::optional<Vec>(x), cesaro_ladder());
  REQUIRE(out.per_vector.has_value());
  CHECK(out.per_vector->orbit_dim == 1);
  CHECK(out.per_vector->consistent);
  for (const auto& c : out.per_vector->conditions) CHECK(c.pass);
  // fixed vectors are reproduced exactly by power-of-two Cesaro means
  const Vec ax = std::get<Vec>(nets::cesaro(rep, 16, nets::State{x}));
  CHECK((ax - x).norm() == 0.0);
}

TEST_CASE("projection agrees with the Cesaro net limit at rate ~ 1/N") {
  // swap alone is too clean (even-N means hit P exactly); use instances with
  // planted unimodular spectrum away from 1
  Rng rng(27);
  for (int trial = 0; trial < 5; ++trial) {
    auto rep = SemigroupRep::powers(models::random_peripheral_contraction(rng, 6));
    const Mat p = *equivalence_battery(rep, std::nullopt, cesaro_ladder()).projection;
    std::vector<double> ns, errs;
    for (int e = 4; e <= 14; e += 2) {
      const std::uint64_t N = 1ull << e;
      const Mat a = nets::cesaro_matrix(rep, N);
      const double err = ops::operator_norm(Mat(a - p), space::NormContext::p(2));
      REQUIRE(err > 0.0);
      ns.push_back(static_cast<double>(N));
      errs.push_back(err);
    }
    const double slope = loglog_slope(ns, errs);
    CHECK(slope >= -1.15);
    CHECK(slope <= -0.85);
  }
}

TEST_CASE("grid-mode battery reports the x^2-map as consistently non-ergodic") {
  auto [S, grid] = experiments::square_map_grid_model(128, 30);
  auto rep = SemigroupRep::powers(S, space::NormContext::grid_sup(grid));
  BatteryConfig cfg;
  cfg.exact_mode = false;
  cfg.grid = GridContinuity{grid, 1e6};
  // probe: samples of f(x) = x (continuous, non-constant)
  Vec probe(static_cast<Eigen::Index>(grid->size()));
  for (std::size_t i = 0; i < grid->size(); ++i)
    probe[static_cast<Eigen::Index>(i)] = cxd{grid->points[i].x, 0.0};
  std::vector<nets::NetScheme> ladder = {nets::Cesaro{1u << 5}, nets::Cesaro{1u << 8},
                                         nets::Cesaro{1u << 10}};
  const auto out = equivalence_battery(rep, std::optional<Vec>(probe), ladder, cfg);
  for (const auto& c : out.conditions) CHECK(!c.pass);
  CHECK(out.consistent);
}

TEST_CASE("projection construction refuses non-decomposing grid models") {
  auto [S, grid] = experiments::square_map_grid_model(64, 20);
  const auto fix = fix_space_grid({S}, 1e-8, {grid, 1e6});
  const auto range = range_space({S}, 1e-8);
  CHECK(fix.dim() + range.dim() < S.rows());  // constants + rank(I-S) misses indicators
  CHECK_THROWS_AS(mean_ergodic_projection(fix, range, 1e-6), NotMeanErgodic);
  try {
    mean_ergodic_projection(fix, range, 1e-6);
  } catch (const NotMeanErgodic& e) {
    CHECK(e.fix_dim == fix.dim());
    CHECK(e.range_dim == range.dim());
  }
}

TEST_CASE("equivalence battery covers one-parameter and finite-cyclic carriers") {
  // one-parameter: A with a kernel direction and rotating/decaying modes
  Mat A = Mat::Zero(3, 3);
  A(1, 1) = cxd{0.0, kTwoPi * 0.37};
  A(2, 2) = cxd{-0.8, 1.1};
  auto rep = SemigroupRep::one_parameter(A, 8.0);
  std::vector<nets::NetScheme> ladder;
  for (double s : {16.0, 256.0, 4096.0}) ladder.push_back(nets::TimeAverage{s, 0.05});
  BatteryConfig cfg;
  cfg.one_param_times = {1.0, 2.5};
  cfg.quad_tol = 1e-7;
  const auto out = equivalence_battery(rep, std::nullopt, ladder, cfg);
  CHECK(out.consistent);
  for (const auto& c : out.conditions) CHECK(c.pass);
  REQUIRE(out.projection.has_value());
  Mat want = Mat::Zero(3, 3);
  want(0, 0) = cxd{1.0, 0.0};
  CHECK((*out.projection - want).cwiseAbs().maxCoeff() <= 1e-8);

  // finite cyclic group Z_2 with the full-group Folner average
  auto z2 = SemigroupRep::finite_cyclic(models::swap2(), 2);
  auto whole = ops::FolnerSequence::whole_finite_group(2);
  const auto out2 = equivalence_battery(
      z2, std::nullopt, {nets::NetScheme{nets::FolnerScheme{whole.sets[0]}}});
  CHECK(out2.consistent);
  for (const auto& c : out2.conditions) CHECK(c.pass);
  CHECK((*out2.projection - kHalf).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("battery accepts Koopman carriers by matrix realization") {
  auto grid = space::SampleGrid::circle(32);
  ops::KoopmanOperator koop(ops::DynamicsMap::rotation(3.0 / 32.0), grid);
  auto rep = SemigroupRep::powers_koopman(koop);
  const auto out = equivalence_battery(rep, std::nullopt,
                                       {nets::Cesaro{1u << 6}, nets::Cesaro{1u << 12},
                                        nets::Cesaro{1u << 18}});
  CHECK(out.consistent);
  for (const auto& c : out.conditions) CHECK(c.pass);
  // gcd(3, 32) = 1: a single orbit cycle, so Fix is the constants
  CHECK(out.fix.dim() == 1);
  CHECK(out.range.dim() == 31);
}

TEST_CASE("exact-mode battery turns disagreeing flags into a hard failure") {
  // an unreachable net tolerance makes the convergence conditions fail while
  // the structural conditions still hold; exact mode must refuse loudly
  auto rep = SemigroupRep::powers(models::swap2());
  BatteryConfig cfg;
  cfg.net_tol = 1e-18;
  CHECK_THROWS_AS(
      equivalence_battery(rep, std::nullopt, {nets::NetScheme{nets::Cesaro{3}}}, cfg),
      BatteryInconsistency);
  // the same configuration in diagnostic mode reports instead of throwing
  cfg.exact_mode = false;
  const auto out = equivalence_battery(rep, std::nullopt, {nets::NetScheme{nets::Cesaro{3}}}, cfg);
  CHECK(!out.consistent);
}
