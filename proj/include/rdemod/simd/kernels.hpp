#pragma once

// Data-parallel inner loops used by the demodulator operator and the IRLS
// solver. Each kernel has a scalar reference implementation and, on x86-64,
// an AVX2 implementation. The table is picked once at startup from CPUID;
// setting RDEMOD_SIMD=scalar in the environment forces the reference path.

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>

namespace rdemod::simd {

using cplx = std::complex<double>;

struct KernelTable {
  const char* name;
  // out[i] = d[i] * x[i]
  void (*real_scale)(const double* d, const cplx* x, cplx* out, std::size_t n);
  // out[r] = sum of x[r*block .. (r+1)*block)
  void (*block_sum)(const cplx* x, std::size_t block, cplx* out, std::size_t rows);
  // out[r*block + i] = y[r] for i < block
  void (*block_spread)(const cplx* y, std::size_t block, cplx* out, std::size_t rows);
  // out[i] = sqrt(|v[i]|^2 + eps^2)
  void (*smoothed_magnitude)(const cplx* v, double eps, double* out, std::size_t n);
  // sum |v[i]|^2 / d[i]
  double (*weighted_energy)(const cplx* v, const double* d, std::size_t n);
  // sum conj(a[i]) * b[i]
  cplx (*dotc)(const cplx* a, const cplx* b, std::size_t n);
};

const KernelTable& scalar_table();

/// nullptr when the build target or the running CPU lacks AVX2+FMA.
const KernelTable* avx2_table();

/// The table selected for this process.
const KernelTable& active();

inline void real_scale(std::span<const double> d, std::span<const cplx> x, std::span<cplx> out) {
  if (d.size() != x.size() || out.size() != x.size())
    throw std::domain_error("real_scale: length mismatch");
  active().real_scale(d.data(), x.data(), out.data(), x.size());
}

inline void block_sum(std::span<const cplx> x, std::size_t block, std::span<cplx> out) {
  if (block == 0 || out.size() * block != x.size())
    throw std::domain_error("block_sum: length mismatch");
  active().block_sum(x.data(), block, out.data(), out.size());
}

inline void block_spread(std::span<const cplx> y, std::size_t block, std::span<cplx> out) {
  if (block == 0 || y.size() * block != out.size())
    throw std::domain_error("block_spread: length mismatch");
  active().block_spread(y.data(), block, out.data(), y.size());
}

inline void smoothed_magnitude(std::span<const cplx> v, double eps, std::span<double> out) {
  if (out.size() != v.size()) throw std::domain_error("smoothed_magnitude: length mismatch");
  active().smoothed_magnitude(v.data(), eps, out.data(), v.size());
}

inline double weighted_energy(std::span<const cplx> v, std::span<const double> d) {
  if (d.size() != v.size()) throw std::domain_error("weighted_energy: length mismatch");
  return active().weighted_energy(v.data(), d.data(), v.size());
}

inline cplx dotc(std::span<const cplx> a, std::span<const cplx> b) {
  if (a.size() != b.size()) throw std::domain_error("dotc: length mismatch");
  return active().dotc(a.data(), b.data(), a.size());
}

}  // namespace rdemod::simd
