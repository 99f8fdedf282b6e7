#pragma once

#include <functional>

#include "ergonet/nets.hpp"

namespace ergonet::uniform {

using nets::NetScheme;
using nets::State;
using ops::SemigroupRep;

/// Sampled compact index set: unimodular characters (circle/torus grids),
/// bounded frequency intervals, or a finite cocycle list.
struct IndexGrid {
  enum class Kind { CircleChars, TorusChars, FrequencyInterval, CocycleList };
  Kind kind = Kind::CircleChars;
  int arity = 1;                              // character tuple length
  std::vector<std::vector<double>> samples;   // turns, or {frequency}
  std::vector<ops::Cocycle> cocycles;
  int refine_factor = 2;
  bool refinable = true;  // finite character groups cannot be subdivided

  static IndexGrid circle(int m, int refine = 2);
  static IndexGrid torus(int k, int m_per_dim, int refine = 2);
  static IndexGrid frequencies(double lo, double hi, int m, int refine = 2);
  static IndexGrid cocycle_list(std::vector<ops::Cocycle> cs);
  /// The full dual group of Z_order: turns j/order, not refinable.
  static IndexGrid finite_characters(std::int64_t order);

  std::size_t size() const {
    return kind == Kind::CocycleList ? cocycles.size() : samples.size();
  }
  /// refine_factor-times denser sampling (continuum kinds; identity for lists).
  IndexGrid refined() const;
};

enum class FamilyKind { A, B, C, D, E, F };

/// A family of modulated representations sharing one net-scheme ladder.
struct UniformFamily {
  FamilyKind kind = FamilyKind::A;
  SemigroupRep base;  // unmodulated
  IndexGrid index;
  std::vector<NetScheme> schemes;  // shared ladder, ordered by net index
  double bound = 1.0;              // uniform M over sampled (i, g)

  SemigroupRep rep_at(const IndexGrid& grid, std::size_t i) const;
  SemigroupRep rep_at(std::size_t i) const { return rep_at(index, i); }
};

/// Wires the per-index net constructors and certifies the uniform bound.
/// Kind-specific preconditions: a/b need a single contraction; c a Koopman
/// base with unitary cocycles; d a one-parameter base with a bounded
/// frequency interval; e commuting generators with a torus character grid;
/// f Folner schemes with a character grid.
UniformFamily build_family(FamilyKind kind, SemigroupRep base, IndexGrid grid,
                           std::vector<NetScheme> schemes);

struct ApproxDefect {
  double value = 0.0;             // sup over sampled i (0 for structurally convex schemes)
  bool structurally_zero = true;  // finite convex combination with recorded weights
  std::size_t support = 0;        // shared support size g_1..g_N
  std::uint64_t abel_terms = 0;   // N with r^N < eps/2 (Abel schemes)
  double abel_bound = 0.0;        // 2 r^N
};
/// Shared-support approximation defect for scheme rung `alpha` at accuracy eps.
ApproxDefect approximation_defect(const UniformFamily& fam, std::size_t alpha, double eps,
                                  const std::vector<State>& probes);

/// Sup over sampled indices of the invariance defect.
double uniform_invariance_defect(const UniformFamily& fam, const ops::GroupElement& g,
                                 const State& x, std::size_t alpha,
                                 nets::Side side = nets::Side::Right,
                                 const nets::EvalOptions& opts = {});

/// sup_i ||A_alpha x - A_alpha A_beta x||.
double composed_average_defect(const UniformFamily& fam, std::size_t alpha, std::size_t beta,
                      const State& x, const nets::EvalOptions& opts = {});

// Quantitative bounds carried by the constructions (for bound assertions).
double bound_kind_a(std::int64_t k, std::uint64_t N, double norm_x);          // 2k/N ||x||
double bound_kind_b_approx(double r, std::uint64_t N);                        // r^N + r^N
double bound_kind_e(double M, std::uint64_t N, double norm_x);                // 2 M^2 ||x|| / N
double bound_kind_f(double folner_ratio, double M, double norm_x);            // |F^gF|/|F| M ||x||

struct IndexPoint {
  const std::vector<double>* params = nullptr;  // turns / frequency
  const ops::Cocycle* cocycle = nullptr;
};
using TargetFn = std::function<State(const IndexPoint&, const State&)>;

struct ProfileRow {
  double alpha = 0.0;
  double sup_defect = 0.0;
  double sup_defect_refined = 0.0;
  bool stable = false;
};
struct Profile {
  std::vector<ProfileRow> rows;
  bool grid_stable = false;    // every row within 10% across refinement
  bool monotone_decay = false;
  bool has_verdict = false;    // false when grid-unstable
};

/// alpha -> sup_i ||A_alpha x - P_i x|| at two grid resolutions.
Profile uniform_convergence_profile(const UniformFamily& fam, const State& x,
                                    const TargetFn& targets, int jobs = 1,
                                    const nets::EvalOptions& opts = {});

}  // namespace ergonet::uniform
