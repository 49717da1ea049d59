#include "tables.hpp"

#if defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>

namespace rdemod::simd {
namespace {

// Tails are handed to the reference kernels so that element-wise kernels stay
// bit-identical to the scalar path.

void real_scale(const double* d, const cplx* x, cplx* out, std::size_t n) {
  const double* xs = reinterpret_cast<const double*>(x);
  double* os = reinterpret_cast<double*>(out);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d dd = _mm256_permute4x64_pd(_mm256_castpd128_pd256(_mm_loadu_pd(d + i)), 0x50);
    _mm256_storeu_pd(os + 2 * i, _mm256_mul_pd(dd, _mm256_loadu_pd(xs + 2 * i)));
  }
  if (i < n) scalar_table().real_scale(d + i, x + i, out + i, n - i);
}

inline cplx horizontal_complex_sum(__m256d acc) {
  const __m128d lo = _mm256_castpd256_pd128(acc);
  const __m128d hi = _mm256_extractf128_pd(acc, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return {_mm_cvtsd_f64(s), _mm_cvtsd_f64(_mm_unpackhi_pd(s, s))};
}

void block_sum(const cplx* x, std::size_t block, cplx* out, std::size_t rows) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* p = reinterpret_cast<const double*>(x + r * block);
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= block; i += 4) {
      acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(p + 2 * i));
      acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(p + 2 * i + 4));
    }
    for (; i + 2 <= block; i += 2) acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(p + 2 * i));
    cplx s = horizontal_complex_sum(_mm256_add_pd(acc0, acc1));
    for (; i < block; ++i) s += x[r * block + i];
    out[r] = s;
  }
}

void block_spread(const cplx* y, std::size_t block, cplx* out, std::size_t rows) {
  double* os = reinterpret_cast<double*>(out);
  for (std::size_t r = 0; r < rows; ++r) {
    const __m256d v = _mm256_broadcast_pd(reinterpret_cast<const __m128d*>(y + r));
    std::size_t i = 0;
    for (; i + 2 <= block; i += 2) _mm256_storeu_pd(os + 2 * (r * block + i), v);
    for (; i < block; ++i) out[r * block + i] = y[r];
  }
}

void smoothed_magnitude(const cplx* v, double eps, double* out, std::size_t n) {
  const double* vs = reinterpret_cast<const double*>(v);
  const __m256d e2 = _mm256_set1_pd(eps * eps);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_loadu_pd(vs + 2 * i);
    const __m256d b = _mm256_loadu_pd(vs + 2 * i + 4);
    // hadd gives [|v0|^2, |v2|^2, |v1|^2, |v3|^2]; reorder to natural order.
    const __m256d m2 = _mm256_permute4x64_pd(
        _mm256_hadd_pd(_mm256_mul_pd(a, a), _mm256_mul_pd(b, b)), 0xD8);
    _mm256_storeu_pd(out + i, _mm256_sqrt_pd(_mm256_add_pd(m2, e2)));
  }
  if (i < n) scalar_table().smoothed_magnitude(v + i, eps, out + i, n - i);
}

double weighted_energy(const cplx* v, const double* d, std::size_t n) {
  const double* vs = reinterpret_cast<const double*>(v);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_loadu_pd(vs + 2 * i);
    const __m256d b = _mm256_loadu_pd(vs + 2 * i + 4);
    const __m256d m2 = _mm256_permute4x64_pd(
        _mm256_hadd_pd(_mm256_mul_pd(a, a), _mm256_mul_pd(b, b)), 0xD8);
    acc = _mm256_add_pd(acc, _mm256_div_pd(m2, _mm256_loadu_pd(d + i)));
  }
  const __m128d s2 = _mm_add_pd(_mm256_castpd256_pd128(acc), _mm256_extractf128_pd(acc, 1));
  double s = _mm_cvtsd_f64(_mm_add_sd(s2, _mm_unpackhi_pd(s2, s2)));
  if (i < n) s += scalar_table().weighted_energy(v + i, d + i, n - i);
  return s;
}

cplx dotc(const cplx* a, const cplx* b, std::size_t n) {
  const double* as = reinterpret_cast<const double*>(a);
  const double* bs = reinterpret_cast<const double*>(b);
  // same: [ar*br, ai*bi, ...]   cross: [ar*bi, ai*br, ...]
  __m256d same = _mm256_setzero_pd();
  __m256d cross = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d va = _mm256_loadu_pd(as + 2 * i);
    const __m256d vb = _mm256_loadu_pd(bs + 2 * i);
    same = _mm256_fmadd_pd(va, vb, same);
    cross = _mm256_fmadd_pd(va, _mm256_permute_pd(vb, 0x5), cross);
  }
  alignas(32) double s[4], c[4];
  _mm256_store_pd(s, same);
  _mm256_store_pd(c, cross);
  cplx out((s[0] + s[2]) + (s[1] + s[3]), (c[0] + c[2]) - (c[1] + c[3]));
  if (i < n) out += scalar_table().dotc(a + i, b + i, n - i);
  return out;
}

}  // namespace

namespace detail {

const KernelTable* avx2_table_if_built() {
  static const KernelTable table{"avx2",        &real_scale,      &block_sum, &block_spread,
                                 &smoothed_magnitude, &weighted_energy, &dotc};
  return &table;
}

}  // namespace detail
}  // namespace rdemod::simd

#else

namespace rdemod::simd::detail {
const KernelTable* avx2_table_if_built() { return nullptr; }
}  // namespace rdemod::simd::detail

#endif
