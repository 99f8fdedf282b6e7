#include "ergonet/uniform.hpp"

#include <cmath>

namespace ergonet::uniform {

using ops::Carrier;

IndexGrid IndexGrid::circle(int m, int refine) {
  if (m < 1) throw contract_error("IndexGrid: need at least one sample");
  if (refine < 2) throw contract_error("IndexGrid: refinement factor must be >= 2");
  IndexGrid g;
  g.kind = Kind::CircleChars;
  g.arity = 1;
  g.refine_factor = refine;
  g.samples.reserve(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) g.samples.push_back({static_cast<double>(j) / m});
  return g;
}

IndexGrid IndexGrid::torus(int k, int m_per_dim, int refine) {
  if (k < 1 || m_per_dim < 1) throw contract_error("IndexGrid: bad torus parameters");
  if (refine < 2) throw contract_error("IndexGrid: refinement factor must be >= 2");
  IndexGrid g;
  g.kind = Kind::TorusChars;
  g.arity = k;
  g.refine_factor = refine;
  std::size_t total = 1;
  for (int i = 0; i < k; ++i) total *= static_cast<std::size_t>(m_per_dim);
  g.samples.reserve(total);
  std::vector<double> t(static_cast<std::size_t>(k), 0.0);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    for (int d = k; d-- > 0;) {
      t[static_cast<std::size_t>(d)] =
          static_cast<double>(rem % static_cast<std::size_t>(m_per_dim)) / m_per_dim;
      rem /= static_cast<std::size_t>(m_per_dim);
    }
    g.samples.push_back(t);
  }
  return g;
}

IndexGrid IndexGrid::frequencies(double lo, double hi, int m, int refine) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || hi < lo)
    throw contract_error("IndexGrid: frequency interval must be bounded");
  if (m < 1) throw contract_error("IndexGrid: need at least one sample");
  if (refine < 2) throw contract_error("IndexGrid: refinement factor must be >= 2");
  IndexGrid g;
  g.kind = Kind::FrequencyInterval;
  g.arity = 1;
  g.refine_factor = refine;
  for (int j = 0; j < m; ++j) {
    const double f = (m == 1) ? lo : lo + (hi - lo) * j / (m - 1);
    g.samples.push_back({f});
  }
  return g;
}

IndexGrid IndexGrid::cocycle_list(std::vector<ops::Cocycle> cs) {
  if (cs.empty()) throw contract_error("IndexGrid: empty cocycle list");
  IndexGrid g;
  g.kind = Kind::CocycleList;
  g.cocycles = std::move(cs);
  return g;
}

IndexGrid IndexGrid::finite_characters(std::int64_t order) {
  if (order < 1) throw contract_error("IndexGrid: order must be >= 1");
  IndexGrid g = circle(static_cast<int>(order));
  g.refinable = false;
  return g;
}

IndexGrid IndexGrid::refined() const {
  if (kind == Kind::CocycleList || !refinable) return *this;
  IndexGrid g = *this;
  g.samples.clear();
  if (kind == Kind::CircleChars) {
    const int m = static_cast<int>(samples.size()) * refine_factor;
    for (int j = 0; j < m; ++j) g.samples.push_back({static_cast<double>(j) / m});
    return g;
  }
  if (kind == Kind::TorusChars) {
    // refine per dimension
    const int m_old = static_cast<int>(std::llround(
        std::pow(static_cast<double>(samples.size()), 1.0 / arity)));
    return torus(arity, m_old * refine_factor, refine_factor);
  }
  // FrequencyInterval
  double lo = samples.front()[0], hi = samples.back()[0];
  const int m = static_cast<int>(samples.size()) * refine_factor;
  for (int j = 0; j < m; ++j) {
    const double f = (m == 1) ? lo : lo + (hi - lo) * j / (m - 1);
    g.samples.push_back({f});
  }
  return g;
}

// ---------------------------------------------------------------------------

SemigroupRep UniformFamily::rep_at(const IndexGrid& grid, std::size_t i) const {
  if (grid.kind == IndexGrid::Kind::CocycleList) {
    if (!base.koopman) throw contract_error("UniformFamily: cocycle family needs a Koopman base");
    ops::KoopmanOperator k(base.koopman->map, base.koopman->grid, grid.cocycles.at(i));
    return SemigroupRep::powers_koopman(std::move(k));
  }
  const std::vector<double>& s = grid.samples.at(i);
  ops::Modulation m;
  if (kind == FamilyKind::D) {
    m.freq = s.at(0);
  } else {
    m.turns = s;
  }
  return base.with_modulation(std::move(m));
}

UniformFamily build_family(FamilyKind kind, SemigroupRep base, IndexGrid grid,
                           std::vector<NetScheme> schemes) {
  UniformFamily fam;
  fam.kind = kind;
  fam.schemes = std::move(schemes);
  if (fam.schemes.empty()) throw contract_error("build_family: need a net-scheme ladder");

  switch (kind) {
    case FamilyKind::A:
    case FamilyKind::B: {
      if (base.kind != Carrier::Powers || base.koopman)
        throw contract_error("build_family: kinds a/b need a single matrix contraction");
      if (ops::operator_norm(base.gens[0], base.ctx) > 1.0 + 1e-12)
        throw contract_error("build_family: kinds a/b need ||S|| <= 1");
      if (grid.kind != IndexGrid::Kind::CircleChars)
        throw contract_error("build_family: kinds a/b take a circle character grid");
      break;
    }
    case FamilyKind::C: {
      if (!base.koopman) throw contract_error("build_family: kind c needs a Koopman base");
      if (grid.kind != IndexGrid::Kind::CocycleList)
        throw contract_error("build_family: kind c takes a cocycle list");
      for (const auto& c : grid.cocycles) {
        if (c.at.size() != base.koopman->grid->size())
          throw contract_error("build_family: cocycle size does not match the grid");
        c.validate_unitary();
      }
      break;
    }
    case FamilyKind::D: {
      if (base.kind != Carrier::OneParam)
        throw contract_error("build_family: kind d needs a one-parameter base");
      if (grid.kind != IndexGrid::Kind::FrequencyInterval)
        throw contract_error("build_family: kind d takes a bounded frequency interval");
      break;
    }
    case FamilyKind::E: {
      if (base.kind != Carrier::AbelianK && base.kind != Carrier::Powers)
        throw contract_error("build_family: kind e needs commuting generators");
      if (grid.kind != IndexGrid::Kind::TorusChars && grid.kind != IndexGrid::Kind::CircleChars)
        throw contract_error("build_family: kind e takes a torus character grid");
      if (static_cast<std::size_t>(grid.arity) != base.generator_count())
        throw contract_error("build_family: character arity must match generator count");
      break;
    }
    case FamilyKind::F: {
      if (base.kind == Carrier::OneParam)
        throw contract_error("build_family: kind f is discrete here; kind d covers R+");
      if (grid.kind == IndexGrid::Kind::CocycleList)
        throw contract_error("build_family: kind f takes a character grid");
      bool has_folner = false;
      for (const auto& s : fam.schemes)
        has_folner = has_folner || std::holds_alternative<nets::FolnerScheme>(s) ||
                     std::holds_alternative<nets::FolnerBox>(s);
      if (!has_folner) throw contract_error("build_family: kind f needs Folner schemes");
      break;
    }
  }

  fam.base = std::move(base);
  fam.index = std::move(grid);

  // uniform bound certificate: unimodular modulations leave sampled norms
  // unchanged, so the base bound carries over
  fam.bound = fam.base.bound;
  return fam;
}

// ---------------------------------------------------------------------------

ApproxDefect approximation_defect(const UniformFamily& fam, std::size_t alpha, double eps,
                                  const std::vector<State>& probes) {
  if (!(eps > 0.0)) throw contract_error("approximation_defect: eps must be positive");
  const NetScheme& scheme = fam.schemes.at(alpha);
  ApproxDefect out;
  const auto info = nets::convex_weights_info(fam.base, scheme);
  if (info.structurally_convex) {
    out.value = 0.0;
    out.structurally_zero = true;
    out.support = info.support_size;
    return out;
  }
  const auto* ab = std::get_if<nets::Abel>(&scheme);
  if (!ab) throw contract_error("approximation_defect: unsupported scheme");
  const double r = ab->r;
  // smallest N with r^N < eps/2, as in the construction's proof
  const std::uint64_t N = static_cast<std::uint64_t>(
      std::max<double>(1.0, std::ceil(std::log(eps / 2.0) / std::log(r) + 1e-12)));
  out.structurally_zero = false;
  out.abel_terms = N;
  out.abel_bound = 2.0 * std::pow(r, static_cast<double>(N));
  out.support = static_cast<std::size_t>(N);

  double sup = 0.0;
  const double rN = std::pow(r, static_cast<double>(N));
  for (std::size_t i = 0; i < fam.index.size(); ++i) {
    const SemigroupRep rep = fam.rep_at(i);
    for (const State& x : probes) {
      // full Abel value at tight tail vs normalized N-term partial sum
      const State full = nets::abel(rep, r, eps * 1e-6, x).value;
      State partial = nets::zero_like(x);
      State cur = x;
      double rn = 1.0;
      for (std::uint64_t n = 0; n < N; ++n) {
        if (n > 0) {
          cur = nets::rep_apply(rep, ops::GroupElement::n(1), cur);
          rn *= r;
        }
        nets::state_axpy(cxd{(1.0 - r) / (1.0 - rN) * rn, 0.0}, cur, partial);
      }
      sup = std::max(sup, nets::state_norm(nets::state_sub(full, partial), fam.base.ctx));
    }
  }
  out.value = sup;
  return out;
}

double uniform_invariance_defect(const UniformFamily& fam, const ops::GroupElement& g,
                                 const State& x, std::size_t alpha, nets::Side side,
                                 const nets::EvalOptions& opts) {
  const NetScheme& scheme = fam.schemes.at(alpha);
  double sup = 0.0;
  for (std::size_t i = 0; i < fam.index.size(); ++i)
    sup = std::max(sup, nets::invariance_defect(fam.rep_at(i), scheme, g, x, side, opts));
  return sup;
}

double composed_average_defect(const UniformFamily& fam, std::size_t alpha, std::size_t beta,
                      const State& x, const nets::EvalOptions& opts) {
  const NetScheme& sa = fam.schemes.at(alpha);
  const NetScheme& sb = fam.schemes.at(beta);
  double sup = 0.0;
  for (std::size_t i = 0; i < fam.index.size(); ++i) {
    const SemigroupRep rep = fam.rep_at(i);
    const State ax = nets::net_apply(rep, sa, x, opts);
    const State abx = nets::net_apply(rep, sa, nets::net_apply(rep, sb, x, opts), opts);
    sup = std::max(sup, nets::state_norm(nets::state_sub(ax, abx), fam.base.ctx));
  }
  return sup;
}

double bound_kind_a(std::int64_t k, std::uint64_t N, double norm_x) {
  return 2.0 * static_cast<double>(k) / static_cast<double>(N) * norm_x;
}
double bound_kind_b_approx(double r, std::uint64_t N) {
  return 2.0 * std::pow(r, static_cast<double>(N));
}
double bound_kind_e(double M, std::uint64_t N, double norm_x) {
  return 2.0 * M * M * norm_x / static_cast<double>(N);
}
double bound_kind_f(double folner_ratio, double M, double norm_x) {
  return folner_ratio * M * norm_x;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<double> profile_sups(const UniformFamily& fam, const IndexGrid& grid, const State& x,
                                 const TargetFn& targets, int jobs,
                                 const nets::EvalOptions& opts) {
  const std::size_t n_schemes = fam.schemes.size();
  const std::size_t n_idx = grid.size();
  std::vector<double> defects(n_schemes * n_idx, 0.0);
  parallel_for(n_idx, jobs, [&](std::size_t i) {
    const SemigroupRep rep = fam.rep_at(grid, i);
    IndexPoint pt;
    if (grid.kind == IndexGrid::Kind::CocycleList)
      pt.cocycle = &grid.cocycles[i];
    else
      pt.params = &grid.samples[i];
    const State target = targets(pt, x);
    for (std::size_t a = 0; a < n_schemes; ++a) {
      const State val = nets::net_apply(rep, fam.schemes[a], x, opts);
      defects[a * n_idx + i] = nets::state_norm(nets::state_sub(val, target), fam.base.ctx);
    }
  });
  std::vector<double> sups(n_schemes, 0.0);
  for (std::size_t a = 0; a < n_schemes; ++a)
    for (std::size_t i = 0; i < n_idx; ++i) sups[a] = std::max(sups[a], defects[a * n_idx + i]);
  return sups;
}

}  // namespace

Profile uniform_convergence_profile(const UniformFamily& fam, const State& x,
                                    const TargetFn& targets, int jobs,
                                    const nets::EvalOptions& opts) {
  Profile prof;
  const std::vector<double> coarse = profile_sups(fam, fam.index, x, targets, jobs, opts);
  const IndexGrid fine_grid = fam.index.refined();
  const std::vector<double> fine = profile_sups(fam, fine_grid, x, targets, jobs, opts);

  prof.grid_stable = true;
  prof.rows.resize(fam.schemes.size());
  for (std::size_t a = 0; a < fam.schemes.size(); ++a) {
    ProfileRow& row = prof.rows[a];
    row.alpha = nets::scheme_index(fam.schemes[a]);
    row.sup_defect = coarse[a];
    row.sup_defect_refined = fine[a];
    const double big = std::max(coarse[a], fine[a]);
    row.stable = (big <= 1e-12) || (std::abs(coarse[a] - fine[a]) < 0.10 * big);
    prof.grid_stable = prof.grid_stable && row.stable;
  }
  prof.monotone_decay = prof.rows.size() > 1;
  for (std::size_t a = 0; a + 1 < prof.rows.size(); ++a) {
    const double cur = prof.rows[a].sup_defect_refined;
    const double nxt = prof.rows[a + 1].sup_defect_refined;
    prof.monotone_decay = prof.monotone_decay && (nxt < cur || (nxt == 0.0 && cur == 0.0));
  }
  prof.has_verdict = prof.grid_stable;
  return prof;
}

}  // namespace ergonet::uniform
