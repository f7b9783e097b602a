#pragma once

#include <complex>
#include <cstddef>
#include <string_view>

namespace qfolio::kernels {

using cplx = std::complex<double>;

/// Row-major 2x2 complex matrix.
struct Mat2 {
  cplx m00, m01, m10, m11;
};

/// Amplitude-array kernels. Index of basis state |z> is sum_k z_k 2^k.
/// Every entry point takes `dim` = 2^n amplitudes, n >= 1.
struct KernelTable {
  std::string_view name;

  void (*apply_1q)(cplx* amps, std::size_t dim, unsigned target, const Mat2& m);
  /// Negates amplitudes whose bits a and b are both set.
  void (*apply_cz)(cplx* amps, std::size_t dim, unsigned a, unsigned b);
  /// Swaps |..c=1..t=0..> with |..c=1..t=1..>.
  void (*apply_cx)(cplx* amps, std::size_t dim, unsigned control, unsigned target);
  /// amps[z] *= phases[z]
  void (*apply_diagonal)(cplx* amps, const cplx* phases, std::size_t dim);
  /// sum_z |amps[z]|^2 * values[z]
  double (*expectation)(const cplx* amps, const double* values, std::size_t dim);
  /// out[z] = |amps[z]|^2
  void (*probabilities)(const cplx* amps, double* out, std::size_t dim);
  /// sum_z |amps[z]|^2
  double (*norm_sq)(const cplx* amps, std::size_t dim);
};

/// Portable reference implementation.
const KernelTable& scalar();

/// AVX2+FMA implementation, or nullptr when not compiled in or the CPU lacks it.
const KernelTable* avx2();

/// Table used by the simulator. Picked once on first call: the widest
/// supported variant, unless QFOLIO_KERNELS=scalar|avx2 says otherwise.
const KernelTable& active();

}  // namespace qfolio::kernels
