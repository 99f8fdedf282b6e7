// NEON variants for aarch64 (one complex per 128-bit register).

#include "ergonet/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

#include "ergonet/util.hpp"

namespace ergonet::kernels {
namespace {

// [re, im] * [br, bi]; multiply by the exact sign vector keeps the per-
// component rounding identical to the scalar reference.
inline float64x2_t cmul_f64(float64x2_t a, float64x2_t b) {
  const float64x2_t sign = {-1.0, 1.0};
  const float64x2_t t1 = vmulq_laneq_f64(b, a, 0);            // [ar*br, ar*bi]
  const float64x2_t bsw = vextq_f64(b, b, 1);                 // [bi, br]
  const float64x2_t t2 = vmulq_laneq_f64(bsw, a, 1);          // [ai*bi, ai*br]
  return vaddq_f64(t1, vmulq_f64(t2, sign));
}

void caxpy_neon(std::size_t n, std::complex<double> a, const std::complex<double>* x,
                std::complex<double>* y) {
  const float64x2_t av = {a.real(), a.imag()};
  auto* yd = reinterpret_cast<double*>(y);
  const auto* xd = reinterpret_cast<const double*>(x);
  for (std::size_t j = 0; j < n; ++j) {
    const float64x2_t xv = vld1q_f64(xd + 2 * j);
    const float64x2_t yv = vld1q_f64(yd + 2 * j);
    vst1q_f64(yd + 2 * j, vaddq_f64(yv, cmul_f64(av, xv)));
  }
}

void cscale_neon(std::size_t n, std::complex<double> a, std::complex<double>* y) {
  const float64x2_t av = {a.real(), a.imag()};
  auto* yd = reinterpret_cast<double*>(y);
  for (std::size_t j = 0; j < n; ++j) {
    const float64x2_t yv = vld1q_f64(yd + 2 * j);
    vst1q_f64(yd + 2 * j, cmul_f64(av, yv));
  }
}

void cmul_pointwise_neon(std::size_t n, const std::complex<double>* x,
                         std::complex<double>* y) {
  auto* yd = reinterpret_cast<double*>(y);
  const auto* xd = reinterpret_cast<const double*>(x);
  for (std::size_t j = 0; j < n; ++j) {
    const float64x2_t xv = vld1q_f64(xd + 2 * j);
    const float64x2_t yv = vld1q_f64(yd + 2 * j);
    vst1q_f64(yd + 2 * j, cmul_f64(xv, yv));
  }
}

double sup_abs2_neon(std::size_t n, const std::complex<double>* x) {
  const auto* xd = reinterpret_cast<const double*>(x);
  double m = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const float64x2_t v = vld1q_f64(xd + 2 * j);
    const float64x2_t sq = vmulq_f64(v, v);
    const double a2 = vgetq_lane_f64(sq, 0) + vgetq_lane_f64(sq, 1);
    if (a2 > m) m = a2;
  }
  return m;
}

void phasor_accumulate_neon(std::size_t n, std::complex<double> c, double turns0,
                            double dturns, std::complex<double>* y) {
  const float64x2_t cv = {c.real(), c.imag()};
  const cxd r2c = cis_turns(2.0 * dturns);
  const float64x2_t rot2 = {r2c.real(), r2c.imag()};
  auto* yd = reinterpret_cast<double*>(y);
  const double t0 = turns0 - std::floor(turns0);
  const double cr = c.real(), ci = c.imag();
  for (std::size_t base = 0; base < n; base += kPhasorBlock) {
    const std::size_t end = std::min(n, base + kPhasorBlock);
    const double tb = t0 + mul_mod1(static_cast<double>(base), dturns);
    const cxd w0 = cis_turns(tb);
    const cxd w1 = cis_turns(tb + dturns);
    float64x2_t wa = {w0.real(), w0.imag()};
    float64x2_t wb = {w1.real(), w1.imag()};
    std::size_t j = base;
    for (; j + 2 <= end; j += 2) {
      const float64x2_t ya = vld1q_f64(yd + 2 * j);
      const float64x2_t yb = vld1q_f64(yd + 2 * j + 2);
      vst1q_f64(yd + 2 * j, vaddq_f64(ya, cmul_f64(cv, wa)));
      vst1q_f64(yd + 2 * j + 2, vaddq_f64(yb, cmul_f64(cv, wb)));
      wa = cmul_f64(rot2, wa);
      wb = cmul_f64(rot2, wb);
    }
    for (; j < end; ++j) {
      const cxd w = cis_turns(t0 + mul_mod1(static_cast<double>(j), dturns));
      const double wr = w.real(), wi = w.imag();
      y[j] = {y[j].real() + (cr * wr - ci * wi), y[j].imag() + (cr * wi + ci * wr)};
    }
  }
}

constexpr Kernels kNeon = {
    "neon", caxpy_neon, cscale_neon, cmul_pointwise_neon,
    sup_abs2_neon, phasor_accumulate_neon,
};

}  // namespace

const Kernels* neon_table() { return &kNeon; }

}  // namespace ergonet::kernels

#else

namespace ergonet::kernels {
const Kernels* neon_table() { return nullptr; }
}  // namespace ergonet::kernels

#endif
