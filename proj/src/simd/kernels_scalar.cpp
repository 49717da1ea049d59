#include <cmath>

#include "rdemod/simd/kernels.hpp"
#include "tables.hpp"

namespace rdemod::simd {
namespace {

void real_scale(const double* d, const cplx* x, cplx* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = cplx(d[i] * x[i].real(), d[i] * x[i].imag());
}

void block_sum(const cplx* x, std::size_t block, cplx* out, std::size_t rows) {
  for (std::size_t r = 0; r < rows; ++r) {
    double re = 0.0, im = 0.0;
    const cplx* p = x + r * block;
    for (std::size_t i = 0; i < block; ++i) {
      re += p[i].real();
      im += p[i].imag();
    }
    out[r] = cplx(re, im);
  }
}

void block_spread(const cplx* y, std::size_t block, cplx* out, std::size_t rows) {
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t i = 0; i < block; ++i) out[r * block + i] = y[r];
}

void smoothed_magnitude(const cplx* v, double eps, double* out, std::size_t n) {
  const double e2 = eps * eps;
  for (std::size_t i = 0; i < n; ++i) {
    const double re = v[i].real(), im = v[i].imag();
    const double m2 = re * re + im * im;
    out[i] = std::sqrt(m2 + e2);
  }
}

double weighted_energy(const cplx* v, const double* d, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double re = v[i].real(), im = v[i].imag();
    acc += (re * re + im * im) / d[i];
  }
  return acc;
}

cplx dotc(const cplx* a, const cplx* b, std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
    im += a[i].real() * b[i].imag() - a[i].imag() * b[i].real();
  }
  return {re, im};
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar",        &real_scale,      &block_sum, &block_spread,
                                 &smoothed_magnitude, &weighted_energy, &dotc};
  return table;
}

}  // namespace rdemod::simd
