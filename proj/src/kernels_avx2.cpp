// AVX2 variants. This TU is compiled with -mavx2 on x86-64 targets only; the
// dispatcher additionally checks the running CPU before handing these out.
// Complex layout: [re0, im0, re1, im1] per __m256d (two complexes).

#include "ergonet/kernels.hpp"

#if defined(__AVX2__)

#include <immintrin.h>

#include "ergonet/util.hpp"

namespace ergonet::kernels {
namespace {

// a*b elementwise for packed complexes. mul/addsub only (no FMA) so each
// component sees the same two products and one add/sub as the scalar path.
inline __m256d cmul_pd(__m256d a, __m256d b) {
  const __m256d re = _mm256_movedup_pd(a);
  const __m256d im = _mm256_permute_pd(a, 0xF);
  const __m256d bsw = _mm256_permute_pd(b, 0x5);
  return _mm256_addsub_pd(_mm256_mul_pd(re, b), _mm256_mul_pd(im, bsw));
}

inline __m256d broadcast_c(std::complex<double> a) {
  return _mm256_setr_pd(a.real(), a.imag(), a.real(), a.imag());
}

void caxpy_avx2(std::size_t n, std::complex<double> a, const std::complex<double>* x,
                std::complex<double>* y) {
  const __m256d av = broadcast_c(a);
  auto* yd = reinterpret_cast<double*>(y);
  const auto* xd = reinterpret_cast<const double*>(x);
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    const __m256d xv = _mm256_loadu_pd(xd + 2 * j);
    const __m256d yv = _mm256_loadu_pd(yd + 2 * j);
    _mm256_storeu_pd(yd + 2 * j, _mm256_add_pd(yv, cmul_pd(av, xv)));
  }
  const double ar = a.real(), ai = a.imag();
  for (; j < n; ++j) {
    const double xr = x[j].real(), xi = x[j].imag();
    y[j] = {y[j].real() + (ar * xr - ai * xi), y[j].imag() + (ar * xi + ai * xr)};
  }
}

void cscale_avx2(std::size_t n, std::complex<double> a, std::complex<double>* y) {
  const __m256d av = broadcast_c(a);
  auto* yd = reinterpret_cast<double*>(y);
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    const __m256d yv = _mm256_loadu_pd(yd + 2 * j);
    _mm256_storeu_pd(yd + 2 * j, cmul_pd(av, yv));
  }
  const double ar = a.real(), ai = a.imag();
  for (; j < n; ++j) {
    const double yr = y[j].real(), yi = y[j].imag();
    y[j] = {ar * yr - ai * yi, ar * yi + ai * yr};
  }
}

void cmul_pointwise_avx2(std::size_t n, const std::complex<double>* x,
                         std::complex<double>* y) {
  auto* yd = reinterpret_cast<double*>(y);
  const auto* xd = reinterpret_cast<const double*>(x);
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    const __m256d xv = _mm256_loadu_pd(xd + 2 * j);
    const __m256d yv = _mm256_loadu_pd(yd + 2 * j);
    _mm256_storeu_pd(yd + 2 * j, cmul_pd(xv, yv));
  }
  for (; j < n; ++j) {
    const double xr = x[j].real(), xi = x[j].imag();
    const double yr = y[j].real(), yi = y[j].imag();
    y[j] = {xr * yr - xi * yi, xr * yi + xi * yr};
  }
}

double sup_abs2_avx2(std::size_t n, const std::complex<double>* x) {
  const auto* xd = reinterpret_cast<const double*>(x);
  __m256d acc = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    const __m256d v = _mm256_loadu_pd(xd + 2 * j);
    const __m256d sq = _mm256_mul_pd(v, v);
    acc = _mm256_max_pd(acc, _mm256_hadd_pd(sq, sq));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double m = lanes[0] > lanes[2] ? lanes[0] : lanes[2];
  for (; j < n; ++j) {
    const double r = x[j].real(), i = x[j].imag();
    const double a2 = r * r + i * i;
    if (a2 > m) m = a2;
  }
  return m;
}

void phasor_accumulate_avx2(std::size_t n, std::complex<double> c, double turns0,
                            double dturns, std::complex<double>* y) {
  static_assert(kPhasorBlock % 4 == 0);
  const __m256d cv = broadcast_c(c);
  const __m256d rot4 = broadcast_c(cis_turns(4.0 * dturns));
  auto* yd = reinterpret_cast<double*>(y);
  const double t0 = turns0 - std::floor(turns0);
  const double cr = c.real(), ci = c.imag();
  for (std::size_t base = 0; base < n; base += kPhasorBlock) {
    const std::size_t end = std::min(n, base + kPhasorBlock);
    const double tb = t0 + mul_mod1(static_cast<double>(base), dturns);
    const cxd w0 = cis_turns(tb);
    const cxd w1 = cis_turns(tb + dturns);
    const cxd w2 = cis_turns(tb + 2.0 * dturns);
    const cxd w3 = cis_turns(tb + 3.0 * dturns);
    __m256d wa = _mm256_setr_pd(w0.real(), w0.imag(), w1.real(), w1.imag());
    __m256d wb = _mm256_setr_pd(w2.real(), w2.imag(), w3.real(), w3.imag());
    std::size_t j = base;
    for (; j + 4 <= end; j += 4) {
      const __m256d ya = _mm256_loadu_pd(yd + 2 * j);
      const __m256d yb = _mm256_loadu_pd(yd + 2 * j + 4);
      _mm256_storeu_pd(yd + 2 * j, _mm256_add_pd(ya, cmul_pd(cv, wa)));
      _mm256_storeu_pd(yd + 2 * j + 4, _mm256_add_pd(yb, cmul_pd(cv, wb)));
      wa = cmul_pd(rot4, wa);
      wb = cmul_pd(rot4, wb);
    }
    for (; j < end; ++j) {
      const cxd w = cis_turns(t0 + mul_mod1(static_cast<double>(j), dturns));
      const double wr = w.real(), wi = w.imag();
      y[j] = {y[j].real() + (cr * wr - ci * wi), y[j].imag() + (cr * wi + ci * wr)};
    }
  }
}

constexpr Kernels kAvx2 = {
    "avx2", caxpy_avx2, cscale_avx2, cmul_pointwise_avx2,
    sup_abs2_avx2, phasor_accumulate_avx2,
};

}  // namespace

const Kernels* avx2_table() { return &kAvx2; }

}  // namespace ergonet::kernels

#else

namespace ergonet::kernels {
const Kernels* avx2_table() { return nullptr; }
}  // namespace ergonet::kernels

#endif
