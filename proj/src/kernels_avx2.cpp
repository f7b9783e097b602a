// AVX2 + FMA amplitude kernels. Compiled with per-function target attributes
// so the translation unit itself stays baseline-x86-64; the table is only
// handed out after a runtime CPU check.

#include "qfolio/kernels.hpp"

#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
#define QFOLIO_HAVE_AVX2_KERNELS 1
#include <immintrin.h>
#endif

namespace qfolio::kernels {

#ifdef QFOLIO_HAVE_AVX2_KERNELS

namespace {

#define QF_AVX2 __attribute__((target("avx2,fma")))

// Two packed complex numbers [r0, i0, r1, i1] times per-lane complex
// coefficients given as broadcast real/imag vectors.
QF_AVX2 inline __m256d cmul(__m256d cr, __m256d ci, __m256d v) {
  const __m256d swapped = _mm256_permute_pd(v, 0b0101);
  return _mm256_fmaddsub_pd(cr, v, _mm256_mul_pd(ci, swapped));
}

QF_AVX2 inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

QF_AVX2 void apply_1q(cplx* amps, std::size_t dim, unsigned target, const Mat2& m) {
  auto* d = reinterpret_cast<double*>(amps);
  if (target == 0) {
    // Pair (2k, 2k+1) lives in one register.
    const __m256d c0r = _mm256_set_pd(m.m10.real(), m.m10.real(), m.m00.real(), m.m00.real());
    const __m256d c0i = _mm256_set_pd(m.m10.imag(), m.m10.imag(), m.m00.imag(), m.m00.imag());
    const __m256d c1r = _mm256_set_pd(m.m11.real(), m.m11.real(), m.m01.real(), m.m01.real());
    const __m256d c1i = _mm256_set_pd(m.m11.imag(), m.m11.imag(), m.m01.imag(), m.m01.imag());
    for (std::size_t i = 0; i < dim; i += 2) {
      const __m256d v = _mm256_loadu_pd(d + 2 * i);
      const __m256d lo = _mm256_permute2f128_pd(v, v, 0x00);
      const __m256d hi = _mm256_permute2f128_pd(v, v, 0x11);
      _mm256_storeu_pd(d + 2 * i, _mm256_add_pd(cmul(c0r, c0i, lo), cmul(c1r, c1i, hi)));
    }
    return;
  }

  const __m256d m00r = _mm256_set1_pd(m.m00.real()), m00i = _mm256_set1_pd(m.m00.imag());
  const __m256d m01r = _mm256_set1_pd(m.m01.real()), m01i = _mm256_set1_pd(m.m01.imag());
  const __m256d m10r = _mm256_set1_pd(m.m10.real()), m10i = _mm256_set1_pd(m.m10.imag());
  const __m256d m11r = _mm256_set1_pd(m.m11.real()), m11i = _mm256_set1_pd(m.m11.imag());
  const std::size_t stride = std::size_t{1} << target;
  for (std::size_t base = 0; base < dim; base += 2 * stride) {
    for (std::size_t i = base; i < base + stride; i += 2) {
      double* p0 = d + 2 * i;
      double* p1 = d + 2 * (i + stride);
      const __m256d a0 = _mm256_loadu_pd(p0);
      const __m256d a1 = _mm256_loadu_pd(p1);
      _mm256_storeu_pd(p0, _mm256_add_pd(cmul(m00r, m00i, a0), cmul(m01r, m01i, a1)));
      _mm256_storeu_pd(p1, _mm256_add_pd(cmul(m10r, m10i, a0), cmul(m11r, m11i, a1)));
    }
  }
}

QF_AVX2 void apply_cz(cplx* amps, std::size_t dim, unsigned a, unsigned b) {
  auto* d = reinterpret_cast<double*>(amps);
  const std::size_t mask = (std::size_t{1} << a) | (std::size_t{1} << b);
  const __m256d flip_both = _mm256_set1_pd(-0.0);
  const __m256d flip_high = _mm256_set_pd(-0.0, -0.0, 0.0, 0.0);
  const bool low_bit = (mask & 1U) != 0;
  for (std::size_t i = 0; i < dim; i += 2) {
    // i is even; with bit 0 outside the mask both lanes share the predicate,
    // otherwise only the odd lane can match.
    if (((i | 1U) & mask) != mask) continue;
    double* p = d + 2 * i;
    _mm256_storeu_pd(p, _mm256_xor_pd(_mm256_loadu_pd(p), low_bit ? flip_high : flip_both));
  }
}

QF_AVX2 void apply_cx(cplx* amps, std::size_t dim, unsigned control, unsigned target) {
  auto* d = reinterpret_cast<double*>(amps);
  const std::size_t cm = std::size_t{1} << control;
  const std::size_t tm = std::size_t{1} << target;
  if (target == 0) {
    // control >= 1: swap the halves of each register whose control bit is set.
    for (std::size_t i = 0; i < dim; i += 2) {
      if (!(i & cm)) continue;
      const __m256d v = _mm256_loadu_pd(d + 2 * i);
      _mm256_storeu_pd(d + 2 * i, _mm256_permute2f128_pd(v, v, 0x01));
    }
    return;
  }
  for (std::size_t i = 0; i < dim; i += 2) {
    if (i & tm) continue;
    double* p0 = d + 2 * i;
    double* p1 = d + 2 * (i | tm);
    const __m256d a = _mm256_loadu_pd(p0);
    const __m256d b = _mm256_loadu_pd(p1);
    if (control == 0) {
      // Only the odd lane (bit 0 set) is controlled.
      _mm256_storeu_pd(p0, _mm256_blend_pd(a, b, 0b1100));
      _mm256_storeu_pd(p1, _mm256_blend_pd(b, a, 0b1100));
    } else if (i & cm) {
      _mm256_storeu_pd(p0, b);
      _mm256_storeu_pd(p1, a);
    }
  }
}

QF_AVX2 void apply_diagonal(cplx* amps, const cplx* phases, std::size_t dim) {
  auto* d = reinterpret_cast<double*>(amps);
  const auto* p = reinterpret_cast<const double*>(phases);
  for (std::size_t i = 0; i < dim; i += 2) {
    const __m256d a = _mm256_loadu_pd(d + 2 * i);
    const __m256d ph = _mm256_loadu_pd(p + 2 * i);
    const __m256d pr = _mm256_movedup_pd(ph);
    const __m256d pi = _mm256_permute_pd(ph, 0b1111);
    const __m256d swapped = _mm256_permute_pd(a, 0b0101);
    _mm256_storeu_pd(d + 2 * i, _mm256_fmaddsub_pd(a, pr, _mm256_mul_pd(swapped, pi)));
  }
}

// |a|^2 for four consecutive amplitudes, in index order.
QF_AVX2 inline __m256d prob4(const double* d) {
  const __m256d v0 = _mm256_loadu_pd(d);
  const __m256d v1 = _mm256_loadu_pd(d + 4);
  const __m256d h = _mm256_hadd_pd(_mm256_mul_pd(v0, v0), _mm256_mul_pd(v1, v1));  // p0 p2 p1 p3
  return _mm256_permute4x64_pd(h, 0b11011000);
}

QF_AVX2 double expectation(const cplx* amps, const double* values, std::size_t dim) {
  const auto* d = reinterpret_cast<const double*>(amps);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= dim; i += 4) acc = _mm256_fmadd_pd(prob4(d + 2 * i), _mm256_loadu_pd(values + i), acc);
  double total = hsum(acc);
  for (; i < dim; ++i) total += (d[2 * i] * d[2 * i] + d[2 * i + 1] * d[2 * i + 1]) * values[i];
  return total;
}

QF_AVX2 void probabilities(const cplx* amps, double* out, std::size_t dim) {
  const auto* d = reinterpret_cast<const double*>(amps);
  std::size_t i = 0;
  for (; i + 4 <= dim; i += 4) _mm256_storeu_pd(out + i, prob4(d + 2 * i));
  for (; i < dim; ++i) out[i] = d[2 * i] * d[2 * i] + d[2 * i + 1] * d[2 * i + 1];
}

QF_AVX2 double norm_sq(const cplx* amps, std::size_t dim) {
  const auto* d = reinterpret_cast<const double*>(amps);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= 2 * dim; i += 4) {
    const __m256d v = _mm256_loadu_pd(d + i);
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  double total = hsum(acc);
  for (; i < 2 * dim; ++i) total += d[i] * d[i];
  return total;
}

#undef QF_AVX2

constexpr KernelTable kAvx2{"avx2", apply_1q, apply_cz, apply_cx, apply_diagonal,
                            expectation, probabilities, norm_sq};

}  // namespace

const KernelTable* avx2() {
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &kAvx2 : nullptr;
}

#else

const KernelTable* avx2() { return nullptr; }

#endif

}  // namespace qfolio::kernels
