#include "ergonet/nets.hpp"

#include <cmath>

#include "ergonet/kernels.hpp"

namespace ergonet::nets {

namespace {

using ops::Carrier;
using ops::GroupElement;

const Vec* as_vec(const State& s) { return std::get_if<Vec>(&s); }

/// chi(n) for the single-generator carriers, exact in n.
cxd chi_n(const SemigroupRep& rep, std::uint64_t n) {
  return rep.modulation.value(rep.kind, GroupElement::n(static_cast<std::int64_t>(n)));
}

/// One unmodulated application of the generator (Powers carrier).
State step_once(const SemigroupRep& rep, const State& x) {
  if (rep.koopman) return rep.koopman->step(std::get<SampledFunction>(x));
  return State{Vec(rep.gens[0] * std::get<Vec>(x))};
}

std::span<const cxd> state_span(const State& s) {
  if (const Vec* v = std::get_if<Vec>(&s); v)
    return {v->data(), static_cast<std::size_t>(v->size())};
  const auto& f = std::get<SampledFunction>(s);
  return {f.values.data(), f.values.size()};
}

std::span<cxd> state_span_mut(State& s) {
  if (Vec* v = std::get_if<Vec>(&s); v) return {v->data(), static_cast<std::size_t>(v->size())};
  auto& f = std::get<SampledFunction>(s);
  return {f.values.data(), f.values.size()};
}

}  // namespace

State zero_like(const State& x) {
  if (const Vec* v = as_vec(x); v) return State{Vec(Vec::Zero(v->size()))};
  const auto& f = std::get<SampledFunction>(x);
  return State{SampledFunction::zero(f.grid, f.components)};
}

void state_axpy(cxd a, const State& x, State& y) {
  auto xs = state_span(x);
  auto ys = state_span_mut(y);
  if (xs.size() != ys.size()) throw contract_error("state_axpy: size mismatch");
  kernels::active().caxpy(xs.size(), a, xs.data(), ys.data());
}

void state_scale(cxd a, State& y) {
  auto ys = state_span_mut(y);
  kernels::active().cscale(ys.size(), a, ys.data());
}

State state_sub(const State& a, const State& b) {
  State out = a;
  state_axpy(cxd{-1.0, 0.0}, b, out);
  return out;
}

double state_norm(const State& x, const space::NormContext& ctx) {
  if (const Vec* v = as_vec(x); v) return space::norm(*v, ctx);
  return space::norm(std::get<SampledFunction>(x), ctx);
}

State rep_apply(const SemigroupRep& rep, const GroupElement& g, const State& x) {
  if (rep.koopman) return rep.apply_fn(g, std::get<SampledFunction>(x));
  return State{rep.apply_vec(g, std::get<Vec>(x))};
}

// ---------------------------------------------------------------------------

std::string scheme_label(const NetScheme& s) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Cesaro>) return "cesaro N=" + std::to_string(v.N);
        if constexpr (std::is_same_v<T, Abel>) return "abel r=" + format_g17(v.r);
        if constexpr (std::is_same_v<T, TimeAverage>) return "time s=" + format_g17(v.s);
        if constexpr (std::is_same_v<T, ConvexChain>)
          return "chain L=" + std::to_string(v.length);
        if constexpr (std::is_same_v<T, FolnerScheme>) return "folner " + v.set.label;
        if constexpr (std::is_same_v<T, FolnerBox>)
          return "box len=" + (v.len.empty() ? "0" : std::to_string(v.len[0]));
      },
      s);
}

double scheme_index(const NetScheme& s) {
  return std::visit(
      [](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Cesaro>) return static_cast<double>(v.N);
        if constexpr (std::is_same_v<T, Abel>) return v.r;
        if constexpr (std::is_same_v<T, TimeAverage>) return v.s;
        if constexpr (std::is_same_v<T, ConvexChain>) return static_cast<double>(v.length);
        if constexpr (std::is_same_v<T, FolnerScheme>) return static_cast<double>(v.set.size());
        if constexpr (std::is_same_v<T, FolnerBox>) {
          double t = 1.0;
          for (auto l : v.len) t *= static_cast<double>(l);
          return t;
        }
      },
      s);
}

// ---------------------------------------------------------------------------

State cesaro(const SemigroupRep& rep, std::uint64_t N, const State& x, const EvalOptions& opts) {
  if (N < 1) throw contract_error("cesaro: N must be >= 1");
  if (rep.kind != Carrier::Powers && rep.kind != Carrier::FiniteCyclic)
    throw contract_error("cesaro: needs a powers-of-one-operator representation");

  if (rep.is_matrix() && N > opts.direct_loop_max) {
    const Vec* xv = as_vec(x);
    if (!xv) throw contract_error("cesaro: matrix path needs a coordinate vector");
    return State{Vec(cesaro_matrix(rep, N, opts) * (*xv))};
  }

  auto xs = state_span(x);
  PairwiseVecSum acc(xs.size());
  State cur = x;
  std::vector<cxd> buf(xs.size());
  for (std::uint64_t n = 0; n < N; ++n) {
    if (n > 0) cur = step_once(rep, cur);
    auto cs = state_span(cur);
    const cxd w = chi_n(rep, n);
    for (std::size_t i = 0; i < cs.size(); ++i) buf[i] = w * cs[i];
    acc.add(buf);
  }
  State out = zero_like(x);
  auto os = state_span_mut(out);
  const std::vector<cxd> total = acc.result();
  const double invN = 1.0 / static_cast<double>(N);
  for (std::size_t i = 0; i < os.size(); ++i) os[i] = total[i] * invN;
  return out;
}

Mat cesaro_matrix(const SemigroupRep& rep, std::uint64_t N, const EvalOptions&) {
  if (N < 1) throw contract_error("cesaro_matrix: N must be >= 1");
  if (!rep.is_matrix()) throw contract_error("cesaro_matrix: needs a matrix representation");
  Mat T = rep.gens[0];
  if (!rep.modulation.trivial()) T *= rep.modulation.value(rep.kind, GroupElement::n(1));
  auto [q, p] = ops::geometric_sum(T, N);
  (void)p;
  return Mat(q / static_cast<double>(N));
}

AbelResult abel(const SemigroupRep& rep, double r, double tail_eps, const State& x) {
  if (!(r > 0.0 && r < 1.0)) throw contract_error("abel: r must lie in (0,1)");
  if (!(tail_eps > 0.0)) throw contract_error("abel: tail_eps must be positive");
  if (rep.kind != Carrier::Powers && rep.kind != Carrier::FiniteCyclic)
    throw contract_error("abel: needs a powers-of-one-operator representation");

  const double nx = state_norm(x, rep.ctx);
  AbelResult res;
  if (nx == 0.0) {
    res.value = zero_like(x);
    res.n_truncated = 1;
    res.tail_bound = 0.0;
    return res;
  }
  const double scale = rep.bound * nx;
  std::uint64_t N0 = 1;
  if (scale * r > tail_eps) {
    N0 = static_cast<std::uint64_t>(std::ceil(std::log(tail_eps / scale) / std::log(r)));
    N0 = std::max<std::uint64_t>(N0, 1);
  }

  auto xs = state_span(x);
  PairwiseVecSum acc(xs.size());
  State cur = x;
  std::vector<cxd> buf(xs.size());
  double rn = 1.0;
  for (std::uint64_t n = 0; n < N0; ++n) {
    if (n > 0) {
      cur = step_once(rep, cur);
      rn *= r;
    }
    auto cs = state_span(cur);
    const cxd w = chi_n(rep, n) * ((1.0 - r) * rn);
    for (std::size_t i = 0; i < cs.size(); ++i) buf[i] = w * cs[i];
    acc.add(buf);
  }
  res.value = zero_like(x);
  auto os = state_span_mut(res.value);
  const std::vector<cxd> total = acc.result();
  for (std::size_t i = 0; i < os.size(); ++i) os[i] = total[i];
  res.n_truncated = N0;
  res.tail_bound = scale * std::pow(r, static_cast<double>(N0));
  return res;
}

TimeAverageResult time_average(const SemigroupRep& rep, double s, double h, const Vec& x,
                               double quad_tol) {
  if (rep.kind != Carrier::OneParam)
    throw contract_error("time_average: needs a one-parameter representation");
  if (!(s > 0.0)) throw contract_error("time_average: s must be positive");
  if (!(h > 0.0 && h <= s)) throw contract_error("time_average: need 0 < h <= s");

  auto simpson = [&](int n) -> Vec {
    // n even intervals of width s/n
    const double step = s / n;
    const Mat E = ops::expm(Mat(step * rep.one_param_gen));
    PairwiseVecSum acc(static_cast<std::size_t>(x.size()));
    Vec v = x;
    std::vector<cxd> buf(static_cast<std::size_t>(x.size()));
    for (int j = 0; j <= n; ++j) {
      if (j > 0) v = E * v;
      double w = (j == 0 || j == n) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
      const cxd coeff = rep.modulation.value(Carrier::OneParam, GroupElement::time(j * step)) *
                        (w * step / (3.0 * s));
      for (Eigen::Index i = 0; i < x.size(); ++i) buf[static_cast<std::size_t>(i)] = coeff * v[i];
      acc.add(buf);
    }
    const std::vector<cxd> total = acc.result();
    Vec out(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = total[static_cast<std::size_t>(i)];
    return out;
  };

  int n = static_cast<int>(std::ceil(s / h));
  if (n % 2 == 1) ++n;
  n = std::max(n, 2);
  const Vec coarse = simpson(n);
  const Vec fine = simpson(2 * n);
  const double est = space::norm(Vec(fine - coarse), rep.ctx) / 15.0;
  if (!(est <= quad_tol))
    throw numeric_error("time_average: step-halving estimate " + format_g17(est) +
                        " exceeds tolerance " + format_g17(quad_tol) + " at " +
                        std::to_string(2 * n) + " intervals; reduce h");
  return {fine, est, 2 * n};
}

std::vector<ChainStep> convex_chain(const SemigroupRep& rep, int length, const Vec& x) {
  if (length < 1) throw contract_error("convex_chain: length must be >= 1");
  if (!rep.is_matrix())
    throw contract_error("convex_chain: needs commuting matrix generators");
  const int k = static_cast<int>(rep.gens.size());
  std::vector<ChainStep> steps;
  Vec cur = x;
  std::map<std::vector<std::int64_t>, double> weights;
  weights[std::vector<std::int64_t>(static_cast<std::size_t>(k), 0)] = 1.0;

  for (int j = 0; j < length; ++j) {
    const int gen = j % k;
    const std::uint64_t N = 1ull << ((j + k - 1) / k + 1);  // 2^(ceil(j/k)+1)
    // cur <- (1/N) sum_{n<N} chi(n e_gen) S_gen^n cur
    PairwiseVecSum acc(static_cast<std::size_t>(cur.size()));
    Vec v = cur;
    std::vector<cxd> buf(static_cast<std::size_t>(cur.size()));
    GroupElement e;
    e.pow.assign(static_cast<std::size_t>(k), 0);
    for (std::uint64_t n = 0; n < N; ++n) {
      if (n > 0) v = rep.gens[static_cast<std::size_t>(gen)] * v;
      e.pow[static_cast<std::size_t>(gen)] = static_cast<std::int64_t>(n);
      const cxd w = rep.modulation.value(rep.kind, e);
      for (Eigen::Index i = 0; i < v.size(); ++i) buf[static_cast<std::size_t>(i)] = w * v[i];
      acc.add(buf);
    }
    const std::vector<cxd> total = acc.result();
    for (Eigen::Index i = 0; i < cur.size(); ++i)
      cur[i] = total[static_cast<std::size_t>(i)] / static_cast<double>(N);

    std::map<std::vector<std::int64_t>, double> next;
    for (const auto& [w, c] : weights) {
      std::vector<std::int64_t> key = w;
      for (std::uint64_t n = 0; n < N; ++n) {
        key[static_cast<std::size_t>(gen)] = w[static_cast<std::size_t>(gen)] + static_cast<std::int64_t>(n);
        next[key] += c / static_cast<double>(N);
      }
    }
    weights = std::move(next);
    steps.push_back({cur, weights, N, gen});
  }
  return steps;
}

State folner_average(const SemigroupRep& rep, const ops::FolnerSet& F, const State& x) {
  if (F.elements.empty()) throw contract_error("folner_average: empty Folner set");

  // fast path: consecutive powers of a single generator
  bool consecutive = (rep.kind == Carrier::Powers || rep.kind == Carrier::FiniteCyclic);
  if (consecutive)
    for (std::size_t i = 0; i < F.elements.size(); ++i)
      if (F.elements[i].pow.size() != 1 ||
          F.elements[i].pow[0] != F.elements[0].pow[0] + static_cast<std::int64_t>(i)) {
        consecutive = false;
        break;
      }

  auto xs = state_span(x);
  PairwiseVecSum acc(xs.size());
  std::vector<cxd> buf(xs.size());
  if (consecutive) {
    const std::int64_t a = F.elements[0].pow[0];
    if (a < 0) throw contract_error("folner_average: interval start outside the carrier");
    State cur = rep.koopman
                    ? State{rep.koopman->apply_n(std::get<SampledFunction>(x),
                                                 static_cast<std::uint64_t>(a))}
                    : State{Vec(ops::power_apply(rep.gens[0], static_cast<std::uint64_t>(a),
                                                 std::get<Vec>(x)))};
    for (std::size_t i = 0; i < F.elements.size(); ++i) {
      if (i > 0) cur = step_once(rep, cur);
      auto cs = state_span(cur);
      const cxd w = rep.modulation.value(rep.kind, F.elements[i]);
      for (std::size_t j = 0; j < cs.size(); ++j) buf[j] = w * cs[j];
      acc.add(buf);
    }
  } else {
    for (const auto& g : F.elements) {
      // rep_apply includes chi(g)
      const State term = rep_apply(rep, g, x);
      auto cs = state_span(term);
      acc.add({cs.data(), cs.size()});
    }
  }
  State out = zero_like(x);
  auto os = state_span_mut(out);
  const std::vector<cxd> total = acc.result();
  const double inv = 1.0 / static_cast<double>(F.elements.size());
  for (std::size_t i = 0; i < os.size(); ++i) os[i] = total[i] * inv;
  return out;
}

Vec folner_box_average(const SemigroupRep& rep, const std::vector<std::int64_t>& lo,
                       const std::vector<std::int64_t>& len, const Vec& x) {
  if (!rep.is_matrix()) throw contract_error("folner_box_average: needs matrix generators");
  if (lo.size() != rep.gens.size() || len.size() != rep.gens.size())
    throw contract_error("folner_box_average: box arity must match generator count");
  Vec y = x;
  for (std::size_t i = 0; i < rep.gens.size(); ++i) {
    if (lo[i] < 0 || len[i] < 1) throw contract_error("folner_box_average: bad box");
    Mat T = rep.gens[i];
    if (!rep.modulation.trivial() && i < rep.modulation.turns.size())
      T *= cis_turns(rep.modulation.turns[i]);
    auto [q, p] = ops::geometric_sum(T, static_cast<std::uint64_t>(len[i]));
    (void)p;
    y = (q * y) / static_cast<double>(len[i]);
    if (lo[i] > 0) y = ops::matrix_power(T, static_cast<std::uint64_t>(lo[i])) * y;
  }
  return y;
}

State net_apply(const SemigroupRep& rep, const NetScheme& s, const State& x,
                const EvalOptions& opts) {
  return std::visit(
      [&](const auto& v) -> State {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Cesaro>) return cesaro(rep, v.N, x, opts);
        if constexpr (std::is_same_v<T, Abel>) return abel(rep, v.r, v.tail_eps, x).value;
        if constexpr (std::is_same_v<T, TimeAverage>) {
          const Vec* xv = as_vec(x);
          if (!xv) throw contract_error("time_average: vector input required");
          return State{time_average(rep, v.s, v.h, *xv, opts.quad_tol).value};
        }
        if constexpr (std::is_same_v<T, ConvexChain>) {
          const Vec* xv = as_vec(x);
          if (!xv) throw contract_error("convex_chain: vector input required");
          auto steps = convex_chain(rep, v.length, *xv);
          return State{steps.back().value};
        }
        if constexpr (std::is_same_v<T, FolnerScheme>) return folner_average(rep, v.set, x);
        if constexpr (std::is_same_v<T, FolnerBox>) {
          const Vec* xv = as_vec(x);
          if (!xv) throw contract_error("folner_box_average: vector input required");
          return State{folner_box_average(rep, v.lo, v.len, *xv)};
        }
      },
      s);
}

double invariance_defect(const SemigroupRep& rep, const NetScheme& s, const GroupElement& g,
                         const State& x, Side side, const EvalOptions& opts) {
  const State ax = net_apply(rep, s, x, opts);
  if (side == Side::Right) {
    const State sgx = rep_apply(rep, g, x);
    const State asgx = net_apply(rep, s, sgx, opts);
    return state_norm(state_sub(ax, asgx), rep.ctx);
  }
  const State sax = rep_apply(rep, g, ax);
  return state_norm(state_sub(ax, sax), rep.ctx);
}

ConvexWeightsInfo convex_weights_info(const SemigroupRep& rep, const NetScheme& s) {
  return std::visit(
      [&](const auto& v) -> ConvexWeightsInfo {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Cesaro>) return {true, 1.0, v.N};
        if constexpr (std::is_same_v<T, Abel>) {
          // closure point of co S, not a finite combination
          return {false, 1.0, 0};
        }
        if constexpr (std::is_same_v<T, TimeAverage>) {
          // composite Simpson has positive weights summing to 1
          return {true, 1.0, 0};
        }
        if constexpr (std::is_same_v<T, ConvexChain>) {
          const int k = static_cast<int>(rep.gens.empty() ? 1 : rep.gens.size());
          std::size_t support = 1;
          for (int j = 0; j < v.length; ++j)
            support += (1ull << ((j + k - 1) / k + 1)) - 1;
          return {true, 1.0, support};
        }
        if constexpr (std::is_same_v<T, FolnerScheme>) return {true, 1.0, v.set.size()};
        if constexpr (std::is_same_v<T, FolnerBox>) {
          std::size_t total = 1;
          for (auto l : v.len) total *= static_cast<std::size_t>(l);
          return {true, 1.0, total};
        }
      },
      s);
}

}  // namespace ergonet::nets
