#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "ergonet/space.hpp"

namespace ergonet::ops {

using space::GridPtr;
using space::Mat;
using space::SampledFunction;
using space::Vec;

/// Induced operator norm: exact row/column sums for p = inf/1, largest
/// singular value for p = 2, max row sum over the grid for grid-sup.
double operator_norm(const Mat& S, const space::NormContext& ctx);

Mat matrix_power(const Mat& S, std::uint64_t n);

/// S^n x by binary decomposition of n: O(log n) matrix products, one apply.
Vec power_apply(const Mat& S, std::uint64_t n, const Vec& x);

/// (sum_{n<N} T^n, T^N) by binary splitting: Q_{2m} = Q_m + T^m Q_m.
std::pair<Mat, Mat> geometric_sum(const Mat& T, std::uint64_t N);

/// exp(A) by scaling-and-squaring with the [13/13] Pade approximant.
Mat expm(const Mat& A);

/// exp(tA) x for t >= 0; refuses on overflow instead of returning NaN.
Vec matrix_exponential_apply(const Mat& A, double t, const Vec& x);

// ---------------------------------------------------------------------------
// Dynamics on compact model spaces and Koopman operators

struct DynamicsMap {
  enum class Rule { Rotation, Square, Skew, Table };
  Rule rule = Rule::Rotation;
  space::Model model = space::Model::Circle;
  double alpha = 0.0;            // rotation/skew angle
  std::vector<int> table;        // finite map, 0-based indices

  static DynamicsMap rotation(double alpha);
  static DynamicsMap square();
  static DynamicsMap skew(double alpha);
  static DynamicsMap finite_table(std::vector<int> t);

  space::Point apply(const space::Point& p) const;
  /// phi^n(p); closed form for rotation/skew, iterated otherwise.
  space::Point iterate(const space::Point& p, std::uint64_t n) const;

  /// Index permutation i -> index of phi(p_i) when phi maps the grid into
  /// itself (exact for matching rotations, skews, finite tables).
  std::optional<std::vector<std::size_t>> grid_permutation(const space::SampleGrid& g) const;
};

/// One unitary per grid point; dim == 1 is the scalar (unimodular) case.
struct Cocycle {
  int dim = 1;
  std::vector<Mat> at;
  void validate_unitary(double tol = 1e-10) const;
  static Cocycle scalar(std::vector<cxd> values);
};

/// Scalar-valued closed-form function, evaluable off-grid.
struct ClosedForm {
  std::function<cxd(const space::Point&)> eval;
};

struct KoopmanOperator {
  DynamicsMap map;
  GridPtr grid;
  std::optional<Cocycle> cocycle;

  KoopmanOperator() = default;
  KoopmanOperator(DynamicsMap m, GridPtr g, std::optional<Cocycle> c = {});

  int components() const { return cocycle ? cocycle->dim : 1; }

  /// One application: (Sf)(p) = gamma(p) f(phi(p)). Sampled input requires a
  /// grid-preserving map; closed-form input works for any map.
  SampledFunction step(const SampledFunction& f) const;
  SampledFunction apply_n(const SampledFunction& f, std::uint64_t n) const;
  SampledFunction apply_n(const ClosedForm& f, std::uint64_t n) const;
  SampledFunction sample(const ClosedForm& f) const;

  /// Matrix of the operator on grid samples (scalar cocycle only).
  Mat matrix() const;
};

// ---------------------------------------------------------------------------
// Bounded representations

enum class Carrier { Powers, AbelianK, OneParam, FiniteCyclic };

struct GroupElement {
  std::vector<std::int64_t> pow;  // Powers/FiniteCyclic: pow[0]; AbelianK: one per generator
  double t = 0.0;                 // OneParam

  static GroupElement n(std::int64_t n) { return {{n}, 0.0}; }
  static GroupElement word(std::vector<std::int64_t> w) { return {std::move(w), 0.0}; }
  static GroupElement time(double t) { return {{}, t}; }
};

/// Unimodular character of the carrier, stored in turns so chi(g) for large
/// exponents keeps full precision.
struct Modulation {
  std::vector<double> turns;  // per generator
  double freq = 0.0;          // OneParam: chi(t) = e^{2 pi i freq t}

  bool trivial() const;
  cxd value(Carrier kind, const GroupElement& g) const;
  static Modulation none() { return {}; }
  static Modulation circle(double turns1) { return {{turns1}, 0.0}; }
};

struct SemigroupRep {
  Carrier kind = Carrier::Powers;
  std::vector<Mat> gens;                    // matrix generators
  std::optional<KoopmanOperator> koopman;   // Powers alternative to gens[0]
  Mat one_param_gen;                        // A with S(t) = exp(tA)
  double one_param_t_max = 1.0;             // declared range for the bound certificate
  std::int64_t cyclic_order = 0;
  double bound = 1.0;                       // M >= sup of sampled ||S_g||
  Modulation modulation;
  space::NormContext ctx;                   // the norm the bound certifies

  bool is_matrix() const { return !koopman.has_value() && kind != Carrier::OneParam; }
  int dim() const;
  std::size_t generator_count() const;

  static SemigroupRep powers(Mat S, space::NormContext ctx = space::NormContext::p(2));
  static SemigroupRep powers_koopman(KoopmanOperator k);
  static SemigroupRep abelian(std::vector<Mat> generators,
                              space::NormContext ctx = space::NormContext::p(2),
                              double commute_tol = 1e-10);
  static SemigroupRep one_parameter(Mat A, double t_max,
                                    space::NormContext ctx = space::NormContext::p(2));
  static SemigroupRep finite_cyclic(Mat U, std::int64_t order,
                                    space::NormContext ctx = space::NormContext::p(2),
                                    double tol = 1e-9);

  SemigroupRep with_modulation(Modulation m) const;

  /// S_g x (matrix carriers). Negative exponents require invertible
  /// generators and are resolved at call time.
  Vec apply_vec(const GroupElement& g, const Vec& x) const;
  /// S_g f (Koopman carrier; g = n >= 0).
  SampledFunction apply_fn(const GroupElement& g, const SampledFunction& f) const;

  /// Generator matrices for fixed-space/battery computations. Koopman
  /// materializes; OneParam samples exp(tau A) at the given times.
  std::vector<Mat> generator_matrices(const std::vector<double>& one_param_times = {}) const;
};

// ---------------------------------------------------------------------------
// Folner data (discrete carriers; counting measure)

struct FolnerSet {
  std::vector<GroupElement> elements;
  std::string label;
  std::size_t size() const { return elements.size(); }
};

struct FolnerSequence {
  std::vector<FolnerSet> sets;

  static FolnerSequence nat_intervals(const std::vector<std::pair<std::int64_t, std::int64_t>>& a_len);
  static FolnerSequence boxes(const std::vector<std::pair<std::vector<std::int64_t>, std::vector<std::int64_t>>>& lo_len);
  static FolnerSequence whole_finite_group(std::int64_t order);
};

/// |F delta gF| / |F| for discrete carriers (FiniteCyclic translates mod the order).
double folner_defect_ratio(const FolnerSet& F, const GroupElement& g, Carrier kind,
                           std::int64_t cyclic_order = 0);

}  // namespace ergonet::ops
