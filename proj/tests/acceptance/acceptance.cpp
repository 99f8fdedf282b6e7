// Acceptance suite: one line per criterion, nonzero exit when any fails.
// Usage: ergonet_acceptance <path-to-ergonet-cli> <path-to-configs-dir>

#include <unistd.h>

#include <Eigen/Eigenvalues>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "ergonet/experiments.hpp"
#include "ergonet/mean_ergodic.hpp"
#include "ergonet/models.hpp"
#include "ergonet/uniform.hpp"

using namespace ergonet;
using ops::GroupElement;
using ops::Mat;
using ops::SemigroupRep;
using ops::Vec;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

void report(int criterion, const char* name, bool pass, double seconds, double budget,
            const std::string& detail) {
  const bool in_budget = seconds < budget;
  const bool ok = pass && in_budget;
  if (!ok) ++g_failures;
  std::printf("%-4s criterion %2d: %-34s %6.2fs/%gs %s\n", ok ? "PASS" : "FAIL", criterion, name,
              seconds, budget, detail.c_str());
  std::fflush(stdout);
}

Mat eigen_projection_oracle(const Mat& S, double tol = 1e-6) {
  Eigen::ComplexEigenSolver<Mat> es(S);
  const auto& vals = es.eigenvalues();
  const Mat V = es.eigenvectors();
  Mat D = Mat::Zero(S.rows(), S.cols());
  for (Eigen::Index i = 0; i < vals.size(); ++i)
    if (std::abs(vals(i) - cxd{1.0, 0.0}) < tol) D(i, i) = cxd{1.0, 0.0};
  return Mat(V * D * V.partialPivLu().solve(Mat(Mat::Identity(S.rows(), S.cols()))));
}

// 1. Telescoping exactness, 200 contractions, all three norms, N in {10, 1e3}.
void criterion1() {
  Timer t;
  Rng rng(1001);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 2 + static_cast<int>(rng.below(15));
    const int which = static_cast<int>(rng.below(3));
    const auto ctx = which == 2 ? space::NormContext{space::NormKind::Inf, nullptr}
                                : space::NormContext::p(which + 1);
    const Mat S = models::random_scaled_contraction(rng, d, ctx, rng.uniform(0.3, 1.0));
    auto rep = SemigroupRep::powers(S, ctx);
    const Vec x = models::random_vector(rng, d);
    for (std::uint64_t N : {std::uint64_t{10}, std::uint64_t{1000}}) {
      nets::EvalOptions opts;
      opts.direct_loop_max = 1ull << 40;
      const Vec ax = std::get<Vec>(nets::cesaro(rep, N, nets::State{x}, opts));
      const Vec asx = std::get<Vec>(nets::cesaro(rep, N, nets::State{Vec(S * x)}, opts));
      const Vec tele = (x - ops::power_apply(S, N, x)) / static_cast<double>(N);
      worst = std::max(worst, space::norm(Vec(ax - asx - tele), ctx));
    }
  }
  report(1, "telescoping exactness", worst <= 1e-12, t.seconds(), 10.0,
         "max residual " + format_g17(worst));
}

// 2. ||A_N - P||_2 <= 1e-3 at N = 2^20 (binary splitting), slope in
//    [-1.15, -0.85] over 2^4..2^20, P vs eigendecomposition oracle <= 1e-8.
void criterion2() {
  Timer t;
  Rng rng(1002);
  bool pass = true;
  std::string fail;
  for (int trial = 0; trial < 100 && pass; ++trial) {
    const int d = 3 + static_cast<int>(rng.below(6));
    const Mat S = models::random_peripheral_contraction(rng, d);
    auto rep = SemigroupRep::powers(S);
    const Mat P = mer::mean_ergodic_projection(mer::fix_space({S}, 1e-8),
                                               mer::range_space({S}, 1e-8), 1e-6);
    const double oracle_err =
        (P - eigen_projection_oracle(S)).cwiseAbs().maxCoeff();
    if (oracle_err > 1e-8) {
      pass = false;
      fail = "oracle mismatch " + format_g17(oracle_err);
      break;
    }
    std::vector<double> ns, errs;
    double final_err = 0.0;
    for (int e = 4; e <= 20; e += 2) {
      const std::uint64_t N = 1ull << e;
      const double err = ops::operator_norm(Mat(nets::cesaro_matrix(rep, N) - P),
                                            space::NormContext::p(2));
      ns.push_back(static_cast<double>(N));
      errs.push_back(std::max(err, 1e-300));
      final_err = err;
    }
    if (final_err > 1e-3) {
      pass = false;
      fail = "final error " + format_g17(final_err);
      break;
    }
    const double slope = loglog_slope(ns, errs);
    if (slope < -1.15 || slope > -0.85) {
      pass = false;
      fail = "slope " + format_g17(slope);
      break;
    }
  }
  report(2, "projection-net agreement", pass, t.seconds(), 60.0, fail);
}

// 3. Battery consistency on 100 random commuting families (1..3 generators).
void criterion3() {
  Timer t;
  bool pass = true;
  std::string fail;
  for (int trial = 0; trial < 100 && pass; ++trial) {
    Rng rng(2000 + static_cast<std::uint64_t>(trial));
    const int d = 3 + static_cast<int>(rng.below(6));
    const int k = 1 + static_cast<int>(rng.below(3));
    auto rep = SemigroupRep::abelian(models::random_commuting_bounded(rng, d, k));
    std::vector<nets::NetScheme> ladder;
    for (int e = 4; e <= 16; e += 4) {
      nets::FolnerBox box;
      box.lo.assign(static_cast<std::size_t>(k), 0);
      box.len.assign(static_cast<std::size_t>(k), std::int64_t{1} << e);
      ladder.push_back(std::move(box));
    }
    try {
      const auto out = mer::equivalence_battery(rep, std::nullopt, ladder);
      for (const auto& c : out.conditions)
        if (!c.pass) {
          pass = false;
          fail = "a condition failed on instance " + std::to_string(trial);
        }
      if (!out.consistent) pass = false;
    } catch (const std::exception& e) {
      pass = false;
      fail = e.what();
    }
  }
  report(3, "equivalence battery consistency", pass, t.seconds(), 60.0, fail);
}

// 4. x^2-map: separation fails with witness pairing <= 1e-12; Cauchy defect
//    of f(x) = x between N = 2^5 and 2^10 exceeds the frozen threshold 0.2.
void criterion4() {
  Timer t;
  auto [S, grid] = experiments::square_map_grid_model(256, 40);
  const auto fix = mer::fix_space_grid({S}, 1e-8, {grid, 1e6});
  const auto dual = mer::dual_fix_space({S}, 1e-8);
  const auto sep = mer::separation_check(dual, fix, 1e-8);
  double pairing = 1.0;
  if (!sep.separates && sep.witness.size() > 0) {
    const Vec ones = Vec::Constant(sep.witness.size(), cxd{1.0, 0.0});
    pairing = std::abs(sep.witness.dot(ones));
  }
  auto big_grid = space::SampleGrid::interval_with_dyadic_tail(10000, 50);
  ops::ClosedForm fx{[](const space::Point& p) { return cxd{p.x, 0.0}; }};
  const double defect = experiments::square_map_cauchy_defect(fx, *big_grid, 1u << 5, 1u << 10);
  const bool pass = !sep.separates && pairing <= 1e-12 && defect >= 0.2;
  report(4, "x^2-map non-mean-ergodic witness", pass, t.seconds(), 30.0,
         "pairing " + format_g17(pairing) + ", defect " + format_g17(defect));
}

// 5. the scalar rotation family: grid sup >= 0.5 at N in {1e2,1e3,1e4}; the direct sum at
//    theta = pi/N matches the Dirichlet closed form within 1e-6.
void criterion5() {
  Timer t;
  bool pass = true;
  std::string detail;
  for (std::uint64_t N : {std::uint64_t{100}, std::uint64_t{1000}, std::uint64_t{10000}}) {
    const auto r = experiments::dirichlet_grid_sup(N, 8 * N);
    pass = pass && r.grid_sup >= 0.5 && std::abs(r.lobe_value - r.lobe_closed_form) <= 1e-6;
    if (N == 10000)
      detail = "sup " + format_g17(r.grid_sup) + ", lobe " + format_g17(r.lobe_value);
  }
  report(5, "Dirichlet-lobe non-uniformity", pass, t.seconds(), 10.0, detail);
}

// 6. Skew product Cesaro: log-log slope of sup_upper over 2^6..2^12 in
//    [-0.6, -0.4] and sup_upper(2^12) < 0.05.
void criterion6() {
  Timer t;
  const auto model = experiments::SkewProductModel::default_model();
  std::vector<double> ns, ups;
  for (int e = 6; e <= 12; ++e) {
    const auto b = experiments::ww_cesaro_sup(model, 1ull << e);
    ns.push_back(static_cast<double>(1ull << e));
    ups.push_back(b.sup_upper);
  }
  const double slope = loglog_slope(ns, ups);
  const bool pass = slope >= -0.6 && slope <= -0.4 && ups.back() < 0.05;
  report(6, "skew-product Cesaro decay", pass, t.seconds(), 120.0,
         "slope " + format_g17(slope) + ", final " + format_g17(ups.back()));
}

// 7. Abel means at r_j = 1 - 2^-j, j = 4..10: monotone decreasing and within
//    a factor 3 of the Cesaro bound at N = 2^j.
void criterion7() {
  Timer t;
  const auto model = experiments::SkewProductModel::default_model();
  bool monotone = true, within = true;
  double prev = std::numeric_limits<double>::infinity();
  for (int j = 4; j <= 10; ++j) {
    const auto ab = experiments::ww_abel_sup(model, 1.0 - std::ldexp(1.0, -j), 1e-3);
    const auto ce = experiments::ww_cesaro_sup(model, 1ull << j);
    monotone = monotone && ab.sup_upper < prev;
    prev = ab.sup_upper;
    const double f = ab.sup_upper / ce.sup_upper;
    within = within && f <= 3.0 && f >= 1.0 / 3.0;
  }
  report(7, "skew-product Abel comparison", monotone && within, t.seconds(), 120.0,
         monotone ? "monotone, within factor 3" : "not monotone");
}

// 8. Sampled uniform-family defects never exceed the constructions' bounds:
//    2k/N (kind a), r^N + r^N (kind b approximation), 2M^2||x||/N (kind e),
//    |F^gF|/|F| M ||x|| (kind f); 50 randomized instances each.
void criterion8() {
  Timer t;
  bool pass = true;
  std::string fail;
  const double slack = 1.0 + 1e-9;

  for (int trial = 0; trial < 50 && pass; ++trial) {
    Rng rng(3000 + static_cast<std::uint64_t>(trial));
    // kind (a)
    {
      const int d = 2 + static_cast<int>(rng.below(5));
      const std::uint64_t N = 32 + rng.below(200);
      auto fam = uniform::build_family(
          uniform::FamilyKind::A,
          SemigroupRep::powers(models::random_scaled_contraction(rng, d, space::NormContext::p(2), 1.0)),
          uniform::IndexGrid::circle(16), {nets::Cesaro{N}});
      const Vec x = models::random_vector(rng, d);
      const std::int64_t k = 1 + static_cast<std::int64_t>(rng.below(4));
      const double defect =
          uniform::uniform_invariance_defect(fam, GroupElement::n(k), nets::State{x}, 0);
      const double bound = uniform::bound_kind_a(k, N, space::norm(x, fam.base.ctx));
      if (defect > bound * slack) {
        pass = false;
        fail = "kind a bound violated: " + format_g17(defect) + " > " + format_g17(bound);
      }
    }
    // kind (b): approximation defect vs r^N + r^N
    if (pass) {
      const int d = 2 + static_cast<int>(rng.below(4));
      const double r = rng.uniform(0.5, 0.95);
      const double eps = rng.uniform(0.05, 0.3);
      auto fam = uniform::build_family(
          uniform::FamilyKind::B,
          SemigroupRep::powers(models::random_scaled_contraction(rng, d, space::NormContext::p(2), 1.0)),
          uniform::IndexGrid::circle(8), {nets::Abel{r, 1e-10}});
      Vec x = models::random_vector(rng, d);
      x /= space::norm(x, space::NormContext::p(2));  // proof bound is for unit vectors
      const auto ap = uniform::approximation_defect(fam, 0, eps, {nets::State{x}});
      if (ap.value > uniform::bound_kind_b_approx(r, ap.abel_terms) * slack + 1e-10) {
        pass = false;
        fail = "kind b bound violated: " + format_g17(ap.value);
      }
      if (ap.value >= eps) {
        pass = false;
        fail = "kind b defect not below eps";
      }
    }
    // kind (e): chain step against 2 M^2 ||x|| / N
    if (pass) {
      const int d = 3 + static_cast<int>(rng.below(3));
      const int k = 1 + static_cast<int>(rng.below(2));
      auto base = SemigroupRep::abelian(models::random_commuting_bounded(rng, d, k));
      const int L = k * (1 + static_cast<int>(rng.below(2)));
      auto fam = uniform::build_family(uniform::FamilyKind::E, base,
                                       uniform::IndexGrid::torus(k, 3), {nets::ConvexChain{L}});
      const Vec x = models::random_vector(rng, d);
      const int last_gen = (L - 1) % k;
      const std::uint64_t n_last = 1ull << ((L - 1 + k - 1) / k + 1);
      GroupElement g;
      g.pow.assign(static_cast<std::size_t>(k), 0);
      g.pow[static_cast<std::size_t>(last_gen)] = 1;
      const double defect = uniform::uniform_invariance_defect(fam, g, nets::State{x}, 0);
      const double bound = uniform::bound_kind_e(fam.bound, n_last, space::norm(x, base.ctx));
      if (defect > bound * slack) {
        pass = false;
        fail = "kind e bound violated: " + format_g17(defect) + " > " + format_g17(bound);
      }
    }
    // kind (f): Folner interval with the symmetric-difference bound
    if (pass) {
      const int d = 2 + static_cast<int>(rng.below(5));
      const std::int64_t L = 16 + static_cast<std::int64_t>(rng.below(200));
      auto seq = ops::FolnerSequence::nat_intervals({{0, L}});
      auto fam = uniform::build_family(
          uniform::FamilyKind::F,
          SemigroupRep::powers(models::random_scaled_contraction(rng, d, space::NormContext::p(2), 1.0)),
          uniform::IndexGrid::circle(8), {nets::FolnerScheme{seq.sets[0]}});
      const Vec x = models::random_vector(rng, d);
      const std::int64_t h = 1 + static_cast<std::int64_t>(rng.below(5));
      const double ratio =
          ops::folner_defect_ratio(seq.sets[0], GroupElement::n(h), ops::Carrier::Powers);
      const double defect =
          uniform::uniform_invariance_defect(fam, GroupElement::n(h), nets::State{x}, 0);
      const double bound =
          uniform::bound_kind_f(ratio, fam.bound, space::norm(x, fam.base.ctx));
      if (defect > bound * slack) {
        pass = false;
        fail = "kind f bound violated: " + format_g17(defect) + " > " + format_g17(bound);
      }
    }
  }
  report(8, "uniform-family quantitative bounds", pass, t.seconds(), 60.0, fail);
}

// 9. composed-average bound on the swap kind-(a) family: beta at N = 2, defect < 1e-3 at
//    N_alpha = 1e4 and monotone along {1e2, 1e3, 1e4}.
void criterion9() {
  Timer t;
  auto fam = uniform::build_family(
      uniform::FamilyKind::A, SemigroupRep::powers(models::swap2()),
      uniform::IndexGrid::circle(128),
      {nets::Cesaro{2}, nets::Cesaro{100}, nets::Cesaro{1000}, nets::Cesaro{10000}});
  Vec x(2);
  x << cxd{1, 0}, cxd{0, 0};
  const double d2 = uniform::composed_average_defect(fam, 1, 0, nets::State{x});
  const double d3 = uniform::composed_average_defect(fam, 2, 0, nets::State{x});
  const double d4 = uniform::composed_average_defect(fam, 3, 0, nets::State{x});
  const bool pass = d4 < 1e-3 && d3 < d2 && d4 < d3;
  report(9, "composed-average defect decay", pass, t.seconds(), 60.0,
         format_g17(d2) + " > " + format_g17(d3) + " > " + format_g17(d4));
}

// 10. Determinism: shipped configs run with --jobs 1 and --jobs 8 produce
//     byte-identical report.csv.
void criterion10(const fs::path& cli, const fs::path& configs) {
  Timer t;
  const fs::path work =
      fs::temp_directory_path() / ("ergonet-acceptance-" + std::to_string(::getpid()));
  fs::remove_all(work);
  fs::create_directories(work);
  setenv("ERGONET_CACHE_DIR", (work / "cache").c_str(), 1);

  bool pass = true;
  std::string fail;
  for (const char* cfg : {"equivalence_commuting.json", "uniform_dirichlet.json",
                          "ww_cesaro_default.json"}) {
    const fs::path conf = configs / cfg;
    const std::string sub = [&] {
      std::ifstream in(conf);
      nlohmann::json j;
      in >> j;
      return j["subcommand"].get<std::string>();
    }();
    const fs::path o1 = work / (std::string(cfg) + ".j1");
    const fs::path o8 = work / (std::string(cfg) + ".j8");
    for (const auto& [jobs, out] : {std::pair<int, fs::path>{1, o1}, {8, o8}}) {
      const std::string cmd = "\"" + cli.string() + "\" " + sub + " --config \"" + conf.string() +
                              "\" --out \"" + out.string() + "\" --jobs " +
                              std::to_string(jobs) + " --no-cache > /dev/null";
      if (std::system(cmd.c_str()) != 0) {
        pass = false;
        fail = std::string(cfg) + " exited nonzero";
      }
    }
    if (!pass) break;
    std::ifstream a(o1 / "report.csv", std::ios::binary), b(o8 / "report.csv", std::ios::binary);
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    if (sa.str().empty() || sa.str() != sb.str()) {
      pass = false;
      fail = std::string(cfg) + " differs between --jobs 1 and --jobs 8";
      break;
    }
  }
  fs::remove_all(work);
  report(10, "determinism across --jobs", pass, t.seconds(), 120.0, fail);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: %s <ergonet-cli> <configs-dir>\n", argv[0]);
    return 2;
  }
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10(argv[1], argv[2]);
  if (g_failures) std::printf("%d criterion(s) FAILED\n", g_failures);
  else std::printf("all 10 criteria passed\n");
  return g_failures ? 1 : 0;
}
