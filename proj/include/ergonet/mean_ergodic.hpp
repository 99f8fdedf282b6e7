#pragma once

#include <array>
#include <optional>

#include "ergonet/nets.hpp"

namespace ergonet::mer {

using ops::Mat;
using ops::SemigroupRep;
using ops::Vec;

struct SubspaceBasis {
  Mat basis;         // orthonormal columns
  double tol = 0.0;  // rank tolerance used
  int dim() const { return static_cast<int>(basis.cols()); }
};

/// Orthonormal basis of the joint nullspace of the stacked (S_g - I), by
/// singular-value thresholding at tol * sigma_max.
SubspaceBasis fix_space(const std::vector<Mat>& gens, double tol);

/// Same on the conjugate transposes (Hermitian pairing convention).
SubspaceBasis dual_fix_space(const std::vector<Mat>& gens, double tol);

/// Orthonormal basis of span{(I - S_g) e_j}.
SubspaceBasis range_space(const std::vector<Mat>& gens, double tol);

/// Grid-mode continuity filter: within a candidate fix space, keep only the
/// directions whose divided differences along the grid stay below the budget.
/// This is what lets grid Koopman models see Fix S inside C(K) instead of
/// basin indicators.
struct GridContinuity {
  space::GridPtr grid;
  double lipschitz_budget = 1e6;
};
SubspaceBasis fix_space_grid(const std::vector<Mat>& gens, double tol, const GridContinuity& gc);

struct SeparationResult {
  bool separates = false;
  double min_pairing_sv = 0.0;  // smallest singular value of the pairing matrix
  Vec witness;                  // dual fixed vector annihilating Fix S (when false)
};
SeparationResult separation_check(const SubspaceBasis& dual_fix, const SubspaceBasis& fix,
                                  double tol);

/// Thrown by mean_ergodic_projection when the decomposition condition fails.
class NotMeanErgodic : public numeric_error {
 public:
  NotMeanErgodic(const std::string& what, int fix_dim, int range_dim, double sep)
      : numeric_error(what), fix_dim(fix_dim), range_dim(range_dim), min_separation(sep) {}
  int fix_dim;
  int range_dim;
  double min_separation;
};

/// Oblique projection with range = fix, kernel = range-span. Requires
/// dim fix + dim range = d and the combined basis to be invertible with
/// smallest singular value > angle_tol.
Mat mean_ergodic_projection(const SubspaceBasis& fix, const SubspaceBasis& range,
                            double angle_tol);

struct ZeroElementReport {
  double ps_defect = 0.0;    // max_g ||P S_g - P||
  double sp_defect = 0.0;    // max_g ||S_g P - P||
  double idem_defect = 0.0;  // ||P^2 - P||
  bool pass = false;
  bool structurally_in_hull = false;  // P came from a recorded-convex-weight net limit
};
ZeroElementReport zero_element_check(const Mat& P, const std::vector<Mat>& gens, double tol,
                                     bool net_limit_provenance = false);

/// Krylov-style closure of {x} union {S_g x} under the generators.
SubspaceBasis orbit_subspace(const std::vector<Mat>& gens, const Vec& x, double tol);

// ---------------------------------------------------------------------------

struct BatteryConfig {
  double rank_tol = 1e-8;     // relative SVD threshold
  double angle_tol = 1e-6;    // direct-sum conditioning threshold
  double zero_tol = 1e-8;     // zero-element defect tolerance
  double net_tol = 1e-3;      // net-convergence tolerance (artifact choice)
  double quad_tol = 1e-9;     // time-average quadrature certificate
  bool exact_mode = true;     // finite-dimensional exact; false = grid diagnostic
  std::optional<GridContinuity> grid;  // continuity filter for grid mode
  std::vector<double> one_param_times;  // generator samples for OneParam reps
};

struct ConditionFlag {
  bool pass = false;
  double defect = 0.0;
};

struct MeanErgodicReport {
  SubspaceBasis fix, dual_fix, range;
  std::optional<Mat> projection;
  std::array<ConditionFlag, 8> conditions;  // the eight equivalent characterizations
  bool consistent = false;

  struct PerVector {
    int orbit_dim = 0;
    std::array<ConditionFlag, 8> conditions;
    bool consistent = false;
  };
  std::optional<PerVector> per_vector;
};

/// Thrown when the exact-mode battery produces disagreeing condition flags
/// (a bounded finite-dimensional semigroup must satisfy all or none).
class BatteryInconsistency : public numeric_error {
 public:
  using numeric_error::numeric_error;
};

/// Evaluates the eight equivalent conditions on a finite-dimensional
/// representation using the supplied net schemes; when x is given, the same
/// battery runs restricted to the orbit subspace Y_x.
MeanErgodicReport equivalence_battery(const SemigroupRep& rep, const std::optional<Vec>& x,
                                      const std::vector<nets::NetScheme>& schemes,
                                      const BatteryConfig& cfg = {});

}  // namespace ergonet::mer
