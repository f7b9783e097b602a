#include <utility>

#include "qfolio/kernels.hpp"

namespace qfolio::kernels {

namespace {

// Explicit real arithmetic: std::complex operator* goes through the
// NaN-recovering __muldc3 path without -ffast-math.
inline void cmul_acc(double ar, double ai, double br, double bi, double& re, double& im) {
  re += ar * br - ai * bi;
  im += ar * bi + ai * br;
}

void apply_1q(cplx* amps, std::size_t dim, unsigned target, const Mat2& m) {
  auto* d = reinterpret_cast<double*>(amps);
  const std::size_t stride = std::size_t{1} << target;
  for (std::size_t base = 0; base < dim; base += 2 * stride) {
    for (std::size_t i = base; i < base + stride; ++i) {
      const std::size_t j = i + stride;
      const double r0 = d[2 * i], i0 = d[2 * i + 1];
      const double r1 = d[2 * j], i1 = d[2 * j + 1];
      double nr0 = 0, ni0 = 0, nr1 = 0, ni1 = 0;
      cmul_acc(m.m00.real(), m.m00.imag(), r0, i0, nr0, ni0);
      cmul_acc(m.m01.real(), m.m01.imag(), r1, i1, nr0, ni0);
      cmul_acc(m.m10.real(), m.m10.imag(), r0, i0, nr1, ni1);
      cmul_acc(m.m11.real(), m.m11.imag(), r1, i1, nr1, ni1);
      d[2 * i] = nr0;
      d[2 * i + 1] = ni0;
      d[2 * j] = nr1;
      d[2 * j + 1] = ni1;
    }
  }
}

void apply_cz(cplx* amps, std::size_t dim, unsigned a, unsigned b) {
  const std::size_t mask = (std::size_t{1} << a) | (std::size_t{1} << b);
  for (std::size_t i = 0; i < dim; ++i)
    if ((i & mask) == mask) amps[i] = -amps[i];
}

void apply_cx(cplx* amps, std::size_t dim, unsigned control, unsigned target) {
  const std::size_t cm = std::size_t{1} << control;
  const std::size_t tm = std::size_t{1} << target;
  for (std::size_t i = 0; i < dim; ++i)
    if ((i & cm) && !(i & tm)) std::swap(amps[i], amps[i | tm]);
}

void apply_diagonal(cplx* amps, const cplx* phases, std::size_t dim) {
  auto* d = reinterpret_cast<double*>(amps);
  const auto* p = reinterpret_cast<const double*>(phases);
  for (std::size_t i = 0; i < dim; ++i) {
    double re = 0, im = 0;
    cmul_acc(d[2 * i], d[2 * i + 1], p[2 * i], p[2 * i + 1], re, im);
    d[2 * i] = re;
    d[2 * i + 1] = im;
  }
}

double expectation(const cplx* amps, const double* values, std::size_t dim) {
  const auto* d = reinterpret_cast<const double*>(amps);
  double acc = 0.0;
  for (std::size_t i = 0; i < dim; ++i) acc += (d[2 * i] * d[2 * i] + d[2 * i + 1] * d[2 * i + 1]) * values[i];
  return acc;
}

void probabilities(const cplx* amps, double* out, std::size_t dim) {
  const auto* d = reinterpret_cast<const double*>(amps);
  for (std::size_t i = 0; i < dim; ++i) out[i] = d[2 * i] * d[2 * i] + d[2 * i + 1] * d[2 * i + 1];
}

double norm_sq(const cplx* amps, std::size_t dim) {
  const auto* d = reinterpret_cast<const double*>(amps);
  double acc = 0.0;
  for (std::size_t i = 0; i < 2 * dim; ++i) acc += d[i] * d[i];
  return acc;
}

constexpr KernelTable kScalar{"scalar", apply_1q, apply_cz, apply_cx, apply_diagonal,
                              expectation, probabilities, norm_sq};

}  // namespace

const KernelTable& scalar() { return kScalar; }

}  // namespace qfolio::kernels
