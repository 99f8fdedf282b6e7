#include "ergonet/kernels.hpp"

#include "ergonet/util.hpp"

// Reference kernels. Complex arithmetic is written out on re/im parts so the
// operation sequence (two products, one add/sub per component) is pinned down;
// the SIMD variants replay exactly the same sequence. The build disables FP
// contraction, so no path silently fuses into FMA.

namespace ergonet::kernels {
namespace {

void caxpy_scalar(std::size_t n, std::complex<double> a, const std::complex<double>* x,
                  std::complex<double>* y) {
  const double ar = a.real(), ai = a.imag();
  for (std::size_t j = 0; j < n; ++j) {
    const double xr = x[j].real(), xi = x[j].imag();
    const double pr = ar * xr - ai * xi;
    const double pi = ar * xi + ai * xr;
    y[j] = {y[j].real() + pr, y[j].imag() + pi};
  }
}

void cscale_scalar(std::size_t n, std::complex<double> a, std::complex<double>* y) {
  const double ar = a.real(), ai = a.imag();
  for (std::size_t j = 0; j < n; ++j) {
    const double yr = y[j].real(), yi = y[j].imag();
    y[j] = {ar * yr - ai * yi, ar * yi + ai * yr};
  }
}

void cmul_pointwise_scalar(std::size_t n, const std::complex<double>* x,
                           std::complex<double>* y) {
  for (std::size_t j = 0; j < n; ++j) {
    const double xr = x[j].real(), xi = x[j].imag();
    const double yr = y[j].real(), yi = y[j].imag();
    y[j] = {xr * yr - xi * yi, xr * yi + xi * yr};
  }
}

double sup_abs2_scalar(std::size_t n, const std::complex<double>* x) {
  double m = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double r = x[j].real(), i = x[j].imag();
    const double a2 = r * r + i * i;
    if (a2 > m) m = a2;
  }
  return m;
}

void phasor_accumulate_scalar(std::size_t n, std::complex<double> c, double turns0,
                              double dturns, std::complex<double>* y) {
  const double cr = c.real(), ci = c.imag();
  const cxd rot = cis_turns(dturns);
  const double rr = rot.real(), ri = rot.imag();
  for (std::size_t base = 0; base < n; base += kPhasorBlock) {
    const std::size_t end = std::min(n, base + kPhasorBlock);
    // exact-ish phase at block start: turns0 + base*dturns reduced mod 1
    cxd w = cis_turns((turns0 - std::floor(turns0)) +
                      mul_mod1(static_cast<double>(base), dturns));
    double wr = w.real(), wi = w.imag();
    for (std::size_t j = base; j < end; ++j) {
      const double pr = cr * wr - ci * wi;
      const double pi = cr * wi + ci * wr;
      y[j] = {y[j].real() + pr, y[j].imag() + pi};
      const double nr = wr * rr - wi * ri;
      const double ni = wr * ri + wi * rr;
      wr = nr;
      wi = ni;
    }
  }
}

constexpr Kernels kScalar = {
    "scalar", caxpy_scalar, cscale_scalar, cmul_pointwise_scalar,
    sup_abs2_scalar, phasor_accumulate_scalar,
};

}  // namespace

const Kernels& scalar() { return kScalar; }

}  // namespace ergonet::kernels
