#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace ergonet::kernels {

// Data-parallel inner loops shared by the norm and averaging code paths.
// Every entry point has a scalar reference implementation plus SIMD variants
// selected at runtime. caxpy/cscale/cmul_pointwise/sup_abs2 are specified to
// be bit-identical to the scalar reference (same per-element arithmetic, no
// FMA contraction); phasor_accumulate uses a different rotation chaining per
// lane and is equivalence-tested to a tolerance instead.
struct Kernels {
  const char* name;

  // y[j] += a * x[j]
  void (*caxpy)(std::size_t n, std::complex<double> a,
                const std::complex<double>* x, std::complex<double>* y);

  // y[j] *= a
  void (*cscale)(std::size_t n, std::complex<double> a, std::complex<double>* y);

  // y[j] *= x[j]
  void (*cmul_pointwise)(std::size_t n, const std::complex<double>* x,
                         std::complex<double>* y);

  // max_j (Re x[j]^2 + Im x[j]^2)
  double (*sup_abs2)(std::size_t n, const std::complex<double>* x);

  // y[j] += c * e^{2*pi*i*(turns0 + j*dturns)}; the phasor is re-seeded from
  // libm sin/cos every block so rotation drift stays ~1e-13 over any n.
  void (*phasor_accumulate)(std::size_t n, std::complex<double> c, double turns0,
                            double dturns, std::complex<double>* y);
};

// Phasor re-seed interval; both scalar and SIMD paths restart at multiples
// of this so their drift envelopes match.
inline constexpr std::size_t kPhasorBlock = 256;

const Kernels& scalar();

// nullptr when the build target or the running CPU lacks the extension.
const Kernels* avx2();
const Kernels* neon();

// Runtime-selected table. Honors ERGONET_KERNELS=scalar|avx2|neon, falling
// back to scalar when the requested variant is unavailable.
const Kernels& active();

// All variants usable on this machine (scalar first); for equivalence tests.
std::vector<const Kernels*> available();

}  // namespace ergonet::kernels
