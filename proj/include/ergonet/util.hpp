#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace ergonet {

using cxd = std::complex<double>;

/// Thrown when a documented precondition is violated.
class contract_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a computation cannot meet its accuracy/certificate contract.
class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// e^{2*pi*i*t} with t in turns; t is reduced mod 1 first.
inline cxd cis_turns(double t) {
  t -= std::floor(t);
  return {std::cos(kTwoPi * t), std::sin(kTwoPi * t)};
}

/// frac(a*b) computed with a two-product so the reduction is accurate to
/// ~1 ulp of a turn even when a*b is ~2^50.
inline double mul_mod1(double a, double b) {
  const double hi = a * b;
  const double lo = std::fma(a, b, -hi);
  double f = (hi - std::floor(hi)) + lo;
  f -= std::floor(f);
  return f;
}

/// Pairwise (cascade) summation of scalars fed one at a time.
class PairwiseSum {
 public:
  void add(double v) {
    for (std::size_t level = 0; ; ++level) {
      if (level == parts_.size()) {
        parts_.push_back(v);
        occupied_.push_back(true);
        return;
      }
      if (!occupied_[level]) {
        parts_[level] = v;
        occupied_[level] = true;
        return;
      }
      v += parts_[level];
      occupied_[level] = false;
    }
  }
  double result() const {
    double s = 0.0;
    for (std::size_t i = 0; i < parts_.size(); ++i)
      if (occupied_[i]) s += parts_[i];
    return s;
  }

 private:
  std::vector<double> parts_;
  std::vector<bool> occupied_;
};

/// Pairwise summation of same-length complex vectors (terms of a net sum).
/// Summation order depends only on the number of terms, never on scheduling.
class PairwiseVecSum {
 public:
  explicit PairwiseVecSum(std::size_t dim) : dim_(dim) {}

  void add(std::span<const cxd> term) {
    if (term.size() != dim_) throw contract_error("PairwiseVecSum: dimension mismatch");
    std::vector<cxd> v(term.begin(), term.end());
    for (std::size_t level = 0; ; ++level) {
      if (level == parts_.size()) {
        parts_.push_back(std::move(v));
        return;
      }
      if (parts_[level].empty()) {
        parts_[level] = std::move(v);
        return;
      }
      for (std::size_t i = 0; i < dim_; ++i) v[i] += parts_[level][i];
      parts_[level].clear();
    }
  }

  std::vector<cxd> result() const {
    std::vector<cxd> s(dim_, cxd{0.0, 0.0});
    for (const auto& p : parts_)
      if (!p.empty())
        for (std::size_t i = 0; i < dim_; ++i) s[i] += p[i];
    return s;
  }

 private:
  std::size_t dim_;
  std::vector<std::vector<cxd>> parts_;
};

/// Deterministic parallel loop: contiguous chunks, disjoint writes only.
/// fn(i) must not touch shared mutable state.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

/// Deterministic RNG for randomized batteries. Distributions are implemented
/// here (not std::*_distribution) so a given seed replays identically.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double u01() {
    // 53-bit mantissa uniform in [0,1)
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }
  double uniform(double a, double b) { return a + (b - a) * u01(); }
  std::uint64_t next_u64() { return eng_(); }
  std::uint64_t below(std::uint64_t n) { return eng_() % n; }

  double gauss() {
    // Box-Muller; cache the second value
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u = 0.0;
    do { u = u01(); } while (u <= 0.0);
    const double v = u01();
    const double r = std::sqrt(-2.0 * std::log(u));
    spare_ = r * std::sin(kTwoPi * v);
    have_spare_ = true;
    return r * std::cos(kTwoPi * v);
  }

  cxd cgauss() { return {gauss(), gauss()}; }
  cxd unit_complex() { return cis_turns(u01()); }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Locale-independent formatting with 17 significant digits.
inline std::string format_g17(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace ergonet
