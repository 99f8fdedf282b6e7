#pragma once

#include <map>
#include <string>
#include <variant>

#include "ergonet/operators.hpp"

namespace ergonet::nets {

using ops::Mat;
using ops::SemigroupRep;
using ops::Vec;
using space::SampledFunction;

/// A vector or a sampled function; the net constructions act on both.
using State = std::variant<Vec, SampledFunction>;

State zero_like(const State& x);
void state_axpy(cxd a, const State& x, State& y);
void state_scale(cxd a, State& y);
State state_sub(const State& a, const State& b);
double state_norm(const State& x, const space::NormContext& ctx);
State rep_apply(const SemigroupRep& rep, const ops::GroupElement& g, const State& x);

// ---------------------------------------------------------------------------

struct Cesaro {
  std::uint64_t N = 1;
};
struct Abel {
  double r = 0.5;
  double tail_eps = 1e-12;
};
struct TimeAverage {
  double s = 1.0;
  double h = 0.125;
};
struct ConvexChain {
  int length = 1;
};
struct FolnerScheme {
  ops::FolnerSet set;
};
// Product box {lo_i, .., lo_i+len_i-1} over the generators; factorized
// evaluation for commuting matrix representations.
struct FolnerBox {
  std::vector<std::int64_t> lo;
  std::vector<std::int64_t> len;
};

using NetScheme = std::variant<Cesaro, Abel, TimeAverage, ConvexChain, FolnerScheme, FolnerBox>;

std::string scheme_label(const NetScheme& s);
/// Numeric net index for reports (N, r, s, chain length, |F|).
double scheme_index(const NetScheme& s);

struct EvalOptions {
  std::uint64_t direct_loop_max = 1024;  // matrix Cesaro switches to binary splitting above
  double quad_tol = 1e-9;
};

// ---------------------------------------------------------------------------

/// (1/N) sum_{n<N} chi(n) S^n x. Matrix path uses binary splitting
/// (Q_{2N} = Q_N + S^N Q_N) above opts.direct_loop_max.
State cesaro(const SemigroupRep& rep, std::uint64_t N, const State& x,
             const EvalOptions& opts = {});

/// The Cesaro mean as an operator (matrix representations).
Mat cesaro_matrix(const SemigroupRep& rep, std::uint64_t N, const EvalOptions& opts = {});

struct AbelResult {
  State value;
  std::uint64_t n_truncated = 0;
  double tail_bound = 0.0;  // M ||x|| r^N0, certified <= tail_eps
};
/// (1-r) sum_n r^n chi(n) S^n x, truncated at the certified geometric tail.
AbelResult abel(const SemigroupRep& rep, double r, double tail_eps, const State& x);

struct TimeAverageResult {
  Vec value;
  double error_estimate = 0.0;  // Richardson step-halving estimate
  int intervals = 0;
};
/// (1/s) int_0^s chi(t) S(t) x dt by composite Simpson at step <= h; fails
/// loudly if step-halving does not certify quad_tol.
TimeAverageResult time_average(const SemigroupRep& rep, double s, double h, const Vec& x,
                               double quad_tol = 1e-9);

struct ChainStep {
  Vec value;
  std::map<std::vector<std::int64_t>, double> weights;  // convex weights over S^w
  std::uint64_t block_len = 0;
  int generator = 0;
};
/// A_0 = I, A_{j+1} = W_j A_j with W_j the N_j-term Cesaro block of generator
/// (j mod k), N_j = 2^(ceil(j/k)+1). Returns the trace A_1 x .. A_L x.
std::vector<ChainStep> convex_chain(const SemigroupRep& rep, int length, const Vec& x);

/// (1/|F|) sum_{g in F} chi(g) S_g x (counting measure).
State folner_average(const SemigroupRep& rep, const ops::FolnerSet& F, const State& x);

/// Factorized box average for commuting matrix generators.
Vec folner_box_average(const SemigroupRep& rep, const std::vector<std::int64_t>& lo,
                       const std::vector<std::int64_t>& len, const Vec& x);

State net_apply(const SemigroupRep& rep, const NetScheme& s, const State& x,
                const EvalOptions& opts = {});

enum class Side { Right, Left };

/// Right: ||A x - A S_g x||; left: ||A x - S_g A x|| in the rep's norm.
double invariance_defect(const SemigroupRep& rep, const NetScheme& s,
                         const ops::GroupElement& g, const State& x, Side side,
                         const EvalOptions& opts = {});

struct ConvexWeightsInfo {
  bool structurally_convex = false;  // finite convex combination by construction
  double weight_sum = 0.0;
  std::size_t support_size = 0;
};
ConvexWeightsInfo convex_weights_info(const SemigroupRep& rep, const NetScheme& s);

}  // namespace ergonet::nets
