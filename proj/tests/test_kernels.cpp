#include "doctest.h"

#include "qfolio/kernels.hpp"
#include "qfolio/statevector.hpp"
#include "support.hpp"

using namespace qfolio;
using kernels::KernelTable;

namespace {

std::vector<cplx> random_amps(Xoshiro256& rng, std::size_t dim) {
  std::vector<cplx> v(dim);
  for (auto& a : v) a = {qtest::normal(rng), qtest::normal(rng)};
  return v;
}

kernels::Mat2 random_mat(Xoshiro256& rng) {
  return {{qtest::normal(rng), qtest::normal(rng)},
          {qtest::normal(rng), qtest::normal(rng)},
          {qtest::normal(rng), qtest::normal(rng)},
          {qtest::normal(rng), qtest::normal(rng)}};
}

double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

TEST_CASE("dispatch picks a usable table") {
  const auto& active = kernels::active();
  CHECK_FALSE(active.name.empty());
  CHECK(kernels::scalar().name == "scalar");
  if (kernels::avx2()) CHECK(kernels::avx2()->name == "avx2");
  MESSAGE("active kernels: " << active.name);
}

TEST_CASE("simd kernels agree with the scalar reference") {
  const KernelTable* simd = kernels::avx2();
  if (!simd) {
    MESSAGE("no SIMD kernels on this machine; nothing to compare");
    return;
  }
  const KernelTable& ref = kernels::scalar();
  Xoshiro256 rng(99);

  for (std::size_t n = 1; n <= 10; ++n) {
    const std::size_t dim = std::size_t{1} << n;
    for (unsigned t = 0; t < n; ++t) {
      auto a = random_amps(rng, dim), b = a;
      const auto m = random_mat(rng);
      ref.apply_1q(a.data(), dim, t, m);
      simd->apply_1q(b.data(), dim, t, m);
      CHECK(max_diff(a, b) < 1e-12);

      for (unsigned u = 0; u < n; ++u) {
        if (u == t) continue;
        auto c = random_amps(rng, dim), d = c;
        ref.apply_cx(c.data(), dim, u, t);
        simd->apply_cx(d.data(), dim, u, t);
        CHECK(c == d);
        ref.apply_cz(c.data(), dim, u, t);
        simd->apply_cz(d.data(), dim, u, t);
        CHECK(c == d);
      }
    }

    auto a = random_amps(rng, dim), b = a;
    const auto phases = random_amps(rng, dim);
    ref.apply_diagonal(a.data(), phases.data(), dim);
    simd->apply_diagonal(b.data(), phases.data(), dim);
    CHECK(max_diff(a, b) < 1e-12);

    std::vector<double> values(dim);
    for (auto& v : values) v = qtest::normal(rng);
    const double e1 = ref.expectation(a.data(), values.data(), dim);
    const double e2 = simd->expectation(a.data(), values.data(), dim);
    CHECK(std::abs(e1 - e2) <= 1e-12 * (1.0 + std::abs(e1)) * double(dim));

    std::vector<double> p1(dim), p2(dim);
    ref.probabilities(a.data(), p1.data(), dim);
    simd->probabilities(a.data(), p2.data(), dim);
    for (std::size_t i = 0; i < dim; ++i) CHECK(std::abs(p1[i] - p2[i]) <= 1e-14 * (1.0 + p1[i]));

    const double n1 = ref.norm_sq(a.data(), dim), n2 = simd->norm_sq(a.data(), dim);
    CHECK(std::abs(n1 - n2) <= 1e-12 * n1);
  }
}

TEST_CASE("whole circuits agree across kernel tables") {
  const KernelTable* simd = kernels::avx2();
  if (!simd) return;
  Xoshiro256 rng(5);
  for (std::size_t n : {1, 2, 3, 5, 8, 11}) {
    auto s = StateVector::zero(n), v = StateVector::zero(n);
    s.use_kernels(kernels::scalar());
    v.use_kernels(*simd);
    for (int g = 0; g < 300; ++g) {
      const auto gate = qtest::random_gate(rng, n);
      s.apply(gate);
      v.apply(gate);
    }
    double d = 0;
    for (std::size_t i = 0; i < s.dim(); ++i) d = std::max(d, std::abs(s.amplitudes()[i] - v.amplitudes()[i]));
    CHECK(d < 1e-11);
  }
}
