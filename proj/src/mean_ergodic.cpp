#include "ergonet/mean_ergodic.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <map>

namespace ergonet::mer {

namespace {

Mat stack_gens(const std::vector<Mat>& gens, bool adjoint, double sign_identity) {
  if (gens.empty()) throw contract_error("fix_space: no generators");
  const Eigen::Index d = gens[0].rows();
  Mat stacked(static_cast<Eigen::Index>(gens.size()) * d, d);
  for (std::size_t i = 0; i < gens.size(); ++i) {
    if (gens[i].rows() != d || gens[i].cols() != d)
      throw contract_error("fix_space: generators must be square, same size");
    Mat block = adjoint ? Mat(gens[i].adjoint()) : gens[i];
    block += sign_identity * Mat::Identity(d, d);
    stacked.middleRows(static_cast<Eigen::Index>(i) * d, d) = block;
  }
  return stacked;
}

SubspaceBasis nullspace_of(const Mat& m, double tol) {
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() ? sv(0) : 0.0;
  // bounded representations are O(1)-normalized (S_0 = I), so anchor the
  // threshold at unit scale; a pure-noise stack must read as all-nullspace
  const double thresh = tol * std::max(smax, 1.0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > thresh) ++rank;
  SubspaceBasis b;
  b.tol = tol;
  b.basis = svd.matrixV().rightCols(m.cols() - rank);
  return b;
}

}  // namespace

SubspaceBasis fix_space(const std::vector<Mat>& gens, double tol) {
  return nullspace_of(stack_gens(gens, false, -1.0), tol);
}

SubspaceBasis dual_fix_space(const std::vector<Mat>& gens, double tol) {
  return nullspace_of(stack_gens(gens, true, -1.0), tol);
}

SubspaceBasis range_space(const std::vector<Mat>& gens, double tol) {
  if (gens.empty()) throw contract_error("range_space: no generators");
  const Eigen::Index d = gens[0].rows();
  Mat cols(d, static_cast<Eigen::Index>(gens.size()) * d);
  for (std::size_t i = 0; i < gens.size(); ++i)
    cols.middleCols(static_cast<Eigen::Index>(i) * d, d) = Mat::Identity(d, d) - gens[i];
  Eigen::JacobiSVD<Mat> svd(cols, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() ? sv(0) : 0.0;
  const double thresh = tol * std::max(smax, 1.0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > thresh) ++rank;
  SubspaceBasis b;
  b.tol = tol;
  b.basis = svd.matrixU().leftCols(rank);
  return b;
}

SubspaceBasis fix_space_grid(const std::vector<Mat>& gens, double tol, const GridContinuity& gc) {
  SubspaceBasis base = fix_space(gens, tol);
  if (base.dim() == 0 || !gc.grid) return base;
  const auto& g = *gc.grid;
  if (g.model == space::Model::FiniteSet || g.model == space::Model::Torus2) return base;
  if (static_cast<Eigen::Index>(g.size()) != base.basis.rows()) return base;

  const Eigen::Index m = static_cast<Eigen::Index>(g.size());
  const Eigen::Index rows = (g.model == space::Model::Circle) ? m : m - 1;
  Mat diff = Mat::Zero(rows, m);
  for (Eigen::Index i = 0; i + 1 < m; ++i) {
    const double gap = g.points[static_cast<std::size_t>(i + 1)].x - g.points[static_cast<std::size_t>(i)].x;
    if (gap <= 0.0) return base;  // unsorted grid: filter not applicable
    diff(i, i) = -1.0 / gap;
    diff(i, i + 1) = 1.0 / gap;
  }
  if (g.model == space::Model::Circle) {
    const double gap = 1.0 - g.points[static_cast<std::size_t>(m - 1)].x + g.points[0].x;
    diff(m - 1, m - 1) = -1.0 / gap;
    diff(m - 1, 0) = 1.0 / gap;
  }

  const Mat restricted = diff * base.basis;
  Eigen::JacobiSVD<Mat> svd(restricted, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  Eigen::Index steep = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > gc.lipschitz_budget) ++steep;
  SubspaceBasis out;
  out.tol = tol;
  out.basis = base.basis * svd.matrixV().rightCols(base.basis.cols() - steep);
  return out;
}

SeparationResult separation_check(const SubspaceBasis& dual_fix, const SubspaceBasis& fix,
                                  double tol) {
  SeparationResult r;
  if (dual_fix.dim() == 0) {
    r.separates = true;
    r.min_pairing_sv = 0.0;
    return r;
  }
  if (fix.dim() == 0) {
    r.separates = false;
    r.min_pairing_sv = 0.0;
    r.witness = dual_fix.basis.col(0);
    return r;
  }
  const Mat pairing = dual_fix.basis.adjoint() * fix.basis;  // a x b
  Eigen::JacobiSVD<Mat> svd(pairing, Eigen::ComputeFullU);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() ? sv(0) : 0.0;
  const double thresh = tol * std::max(smax, 1.0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > thresh) ++rank;
  r.min_pairing_sv = (sv.size() == pairing.rows() && sv.size() > 0) ? sv(sv.size() - 1) : 0.0;
  r.separates = (rank == pairing.rows());
  if (!r.separates) {
    // left-null direction: a dual fixed vector annihilating Fix S
    r.witness = dual_fix.basis * svd.matrixU().col(pairing.rows() - 1);
  }
  return r;
}

Mat mean_ergodic_projection(const SubspaceBasis& fix, const SubspaceBasis& range,
                            double angle_tol) {
  const Eigen::Index d = std::max(fix.basis.rows(), range.basis.rows());
  const Eigen::Index f = fix.dim(), r = range.dim();
  if (f + r != d)
    throw NotMeanErgodic("mean_ergodic_projection: dim fix + dim range != dim space",
                         static_cast<int>(f), static_cast<int>(r), 0.0);
  if (f == 0) return Mat::Zero(d, d);

  Mat B(d, d);
  B.leftCols(f) = fix.basis;
  if (r > 0) B.rightCols(r) = range.basis;
  Eigen::JacobiSVD<Mat> svd(B);
  const double smin = svd.singularValues()(d - 1);
  if (!(smin > angle_tol))
    throw NotMeanErgodic("mean_ergodic_projection: fix/range spans are not transversal",
                         static_cast<int>(f), static_cast<int>(r), smin);
  const Mat Binv = B.partialPivLu().solve(Mat::Identity(d, d));
  return Mat(fix.basis * Binv.topRows(f));
}

ZeroElementReport zero_element_check(const Mat& P, const std::vector<Mat>& gens, double tol,
                                     bool net_limit_provenance) {
  ZeroElementReport rep;
  const space::NormContext two = space::NormContext::p(2);
  for (const Mat& S : gens) {
    rep.ps_defect = std::max(rep.ps_defect, ops::operator_norm(Mat(P * S - P), two));
    rep.sp_defect = std::max(rep.sp_defect, ops::operator_norm(Mat(S * P - P), two));
  }
  rep.idem_defect = ops::operator_norm(Mat(P * P - P), two);
  rep.pass = rep.ps_defect <= tol && rep.sp_defect <= tol && rep.idem_defect <= tol;
  rep.structurally_in_hull = net_limit_provenance;
  return rep;
}

SubspaceBasis orbit_subspace(const std::vector<Mat>& gens, const Vec& x, double tol) {
  SubspaceBasis out;
  out.tol = tol;
  const Eigen::Index d = x.size();
  const double nx = x.norm();
  if (nx == 0.0) {
    out.basis = Mat(d, 0);
    return out;
  }
  Mat basis = Mat(x / nx);
  for (Eigen::Index round = 0; round < d; ++round) {
    Mat cand(d, basis.cols() * static_cast<Eigen::Index>(1 + gens.size()));
    cand.leftCols(basis.cols()) = basis;
    for (std::size_t i = 0; i < gens.size(); ++i)
      cand.middleCols(basis.cols() * static_cast<Eigen::Index>(i + 1), basis.cols()) =
          gens[i] * basis;
    Eigen::JacobiSVD<Mat> svd(cand, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    const double thresh = tol * (sv.size() ? sv(0) : 0.0);
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv(i) > thresh) ++rank;
    Mat next = svd.matrixU().leftCols(rank);
    if (rank == basis.cols()) {
      basis = std::move(next);
      break;
    }
    basis = std::move(next);
  }
  out.basis = std::move(basis);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct FamilyEval {
  double final_err = 0.0;    // strong error at the last rung
  double min_err = 0.0;      // best rung (cluster-point witness)
  double first_err = 0.0;
  double final_weak = 0.0;   // sup over coordinate pairings at the last rung
  double fix_dist = 0.0;     // distance of the last rung value to Fix S
  bool structurally_convex = true;
};

FamilyEval eval_family(const SemigroupRep& rep, const std::vector<nets::NetScheme>& rungs,
                       const Vec& probe, const std::optional<Mat>& P, const SubspaceBasis& fix,
                       const nets::EvalOptions& opts) {
  FamilyEval ev;
  const space::NormContext& ctx = rep.ctx;
  Vec prev;
  bool have_prev = false;
  double minb = -1.0;
  for (std::size_t j = 0; j < rungs.size(); ++j) {
    const nets::State val = nets::net_apply(rep, rungs[j], nets::State{probe}, opts);
    const Vec v = std::get<Vec>(val);
    double err;
    if (P) {
      err = space::norm(Vec(v - (*P) * probe), ctx);
    } else if (have_prev) {
      err = space::norm(Vec(v - prev), ctx);  // Cauchy proxy when no limit candidate
    } else {
      err = space::norm(v, ctx);
    }
    if (j == 0) ev.first_err = err;
    if (minb < 0.0 || err < minb) minb = err;
    if (j + 1 == rungs.size()) {
      ev.final_err = err;
      Vec diff = P ? Vec(v - (*P) * probe) : (have_prev ? Vec(v - prev) : v);
      ev.final_weak = diff.cwiseAbs().maxCoeff();
      if (fix.dim() > 0) {
        const Vec resid = v - fix.basis * (fix.basis.adjoint() * v);
        ev.fix_dist = space::norm(resid, ctx);
      } else {
        ev.fix_dist = space::norm(v, ctx);
      }
    }
    prev = v;
    have_prev = true;
    ev.structurally_convex =
        ev.structurally_convex && nets::convex_weights_info(rep, rungs[j]).structurally_convex;
  }
  ev.min_err = minb < 0.0 ? 0.0 : minb;
  return ev;
}

std::array<ConditionFlag, 8> evaluate_conditions(const SemigroupRep& rep,
                                                 const std::vector<Mat>& gens,
                                                 const SubspaceBasis& fix,
                                                 const SubspaceBasis& dual,
                                                 const SubspaceBasis& range,
                                                 std::optional<Mat>& P_out,
                                                 const std::vector<Vec>& probes,
                                                 const std::vector<nets::NetScheme>& schemes,
                                                 const BatteryConfig& cfg) {
  std::array<ConditionFlag, 8> c{};
  const Eigen::Index d = gens[0].rows();

  // (3) separation
  const SeparationResult sep = separation_check(dual, fix, cfg.rank_tol);
  c[2] = {sep.separates, sep.min_pairing_sv};

  // (4) direct-sum decomposition
  std::optional<Mat> P;
  double sep_sv = 0.0;
  bool dims_ok = (fix.dim() + range.dim() == static_cast<int>(d));
  if (dims_ok) {
    try {
      P = mean_ergodic_projection(fix, range, cfg.angle_tol);
      sep_sv = 1.0;
      if (fix.dim() > 0 && range.dim() > 0) {
        Mat B(d, d);
        B.leftCols(fix.dim()) = fix.basis;
        B.rightCols(range.dim()) = range.basis;
        Eigen::JacobiSVD<Mat> svd(B);
        sep_sv = svd.singularValues()(d - 1);
      }
    } catch (const NotMeanErgodic& e) {
      dims_ok = false;
      sep_sv = e.min_separation;
    }
  }
  c[3] = {dims_ok && P.has_value(), sep_sv};

  // group schemes into ladders by variant, ordered by index
  std::map<std::size_t, std::vector<nets::NetScheme>> families;
  for (const auto& s : schemes) families[s.index()].push_back(s);
  for (auto& [k, v] : families)
    std::stable_sort(v.begin(), v.end(), [](const nets::NetScheme& a, const nets::NetScheme& b) {
      return nets::scheme_index(a) < nets::scheme_index(b);
    });

  bool all2 = true, all5 = true, all6 = true, all7 = true, all8 = true;
  double d2 = 0, d5 = 0, d6 = 0, d7 = 0, d8 = 0;
  // hull-membership evidence for (1): a recorded-convex-weight family converged
  bool any_convex = false;
  bool convex_converged = true;
  for (const auto& probe : probes) {
    const double scale = cfg.net_tol * (1.0 + space::norm(probe, rep.ctx));
    nets::EvalOptions opts;
    opts.quad_tol = cfg.quad_tol;
    for (const auto& [k, rungs] : families) {
      const FamilyEval ev = eval_family(rep, rungs, probe, P, fix, opts);
      all2 = all2 && (ev.fix_dist <= scale);
      d2 = std::max(d2, ev.fix_dist);
      all5 = all5 && (ev.min_err <= scale);
      d5 = std::max(d5, ev.min_err);
      all6 = all6 && (ev.final_weak <= scale);
      d6 = std::max(d6, ev.final_weak);
      all7 = all7 && (ev.final_weak <= scale);
      d7 = std::max(d7, ev.final_weak);
      const bool decayed = ev.final_err <= scale && ev.final_err <= ev.first_err + scale;
      all8 = all8 && decayed;
      d8 = std::max(d8, ev.final_err);
      if (ev.structurally_convex) {
        any_convex = true;
        convex_converged = convex_converged && decayed;
      }
    }
  }
  if (families.empty() || probes.empty()) {
    all2 = all5 = all6 = all7 = all8 = false;
  }
  c[1] = {all2, d2};
  c[4] = {all5, d5};
  c[5] = {all6, d6};
  c[6] = {all7, d7};
  c[7] = {all8, d8};

  // (1) zero element: defect criterion + structural hull membership evidence
  if (P) {
    const bool in_hull = any_convex && convex_converged;
    const ZeroElementReport z = zero_element_check(*P, gens, cfg.zero_tol, in_hull);
    const double zd = std::max({z.ps_defect, z.sp_defect, z.idem_defect});
    c[0] = {z.pass && z.structurally_in_hull, zd};
  } else {
    c[0] = {false, 1.0};
  }

  P_out = std::move(P);
  return c;
}

}  // namespace

MeanErgodicReport equivalence_battery(const SemigroupRep& rep, const std::optional<Vec>& x,
                                      const std::vector<nets::NetScheme>& schemes,
                                      const BatteryConfig& cfg) {
  MeanErgodicReport report;
  const std::vector<Mat> gens = rep.generator_matrices(cfg.one_param_times);
  const Eigen::Index d = gens[0].rows();

  // the battery probes are coordinate vectors; Koopman carriers act through
  // their matrix realization on grid samples (modulation already folded in)
  SemigroupRep vec_rep = rep;
  if (rep.koopman) {
    vec_rep = SemigroupRep{};
    vec_rep.kind = ops::Carrier::Powers;
    vec_rep.gens = {gens[0]};
    vec_rep.ctx = rep.ctx;
    vec_rep.bound = rep.bound;
  }

  report.fix = cfg.grid ? fix_space_grid(gens, cfg.rank_tol, *cfg.grid)
                        : fix_space(gens, cfg.rank_tol);
  report.dual_fix = dual_fix_space(gens, cfg.rank_tol);
  report.range = range_space(gens, cfg.rank_tol);

  std::vector<Vec> probes;
  if (x) {
    probes.push_back(*x);
  } else {
    const Eigen::Index count = std::min<Eigen::Index>(d, 8);
    for (Eigen::Index i = 0; i < count; ++i) probes.push_back(Vec(Vec::Unit(d, i)));
  }

  std::optional<Mat> P;
  report.conditions = evaluate_conditions(vec_rep, gens, report.fix, report.dual_fix,
                                          report.range, P, probes, schemes, cfg);
  report.projection = P;

  report.consistent = true;
  for (const auto& f : report.conditions)
    report.consistent = report.consistent && (f.pass == report.conditions[0].pass);

  if (cfg.exact_mode && !report.consistent) {
    std::string flags;
    for (const auto& f : report.conditions) flags += f.pass ? '1' : '0';
    throw BatteryInconsistency(
        "equivalence_battery: condition flags disagree in exact mode [" + flags +
        "]; finite-dimensional bounded semigroups must satisfy all conditions");
  }

  if (x && !cfg.grid) {
    const SubspaceBasis Y = orbit_subspace(gens, *x, cfg.rank_tol);
    MeanErgodicReport::PerVector pv;
    pv.orbit_dim = Y.dim();
    if (Y.dim() > 0) {
      std::vector<Mat> rgens;
      rgens.reserve(gens.size());
      for (const Mat& g : gens) rgens.push_back(Mat(Y.basis.adjoint() * g * Y.basis));
      SemigroupRep rrep = (rgens.size() == 1)
                              ? SemigroupRep::powers(rgens[0])
                              : SemigroupRep::abelian(rgens, space::NormContext::p(2), 1e-6);
      const Vec rx = Y.basis.adjoint() * (*x);
      // restricted schemes: chain/box arity follows the generator count, the
      // single-generator ladders carry over unchanged
      std::optional<Mat> rP;
      const SubspaceBasis rfix = fix_space(rgens, cfg.rank_tol);
      const SubspaceBasis rdual = dual_fix_space(rgens, cfg.rank_tol);
      const SubspaceBasis rrange = range_space(rgens, cfg.rank_tol);
      pv.conditions = evaluate_conditions(rrep, rgens, rfix, rdual, rrange, rP, {rx}, schemes, cfg);
      pv.consistent = true;
      for (const auto& f : pv.conditions)
        pv.consistent = pv.consistent && (f.pass == pv.conditions[0].pass);
    }
    report.per_vector = pv;
  }
  return report;
}

}  // namespace ergonet::mer
