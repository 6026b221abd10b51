#include "deconv/simd/kernels.hpp"

#include <immintrin.h>

namespace deconv::simd {
namespace {

// Complex<double> is laid out re,im; one __m256d holds two coefficients.

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// [w0, w1] -> [w0, w0, w1, w1]
inline __m256d broadcast_pair(const double* w) {
  const __m128d pair = _mm_loadu_pd(w);
  return _mm256_permute4x64_pd(_mm256_castpd128_pd256(pair), 0b01010000);
}

double sq_distance_avx2(const Complex* a, const Complex* b, std::size_t n) {
  const double* pa = reinterpret_cast<const double*>(a);
  const double* pb = reinterpret_cast<const double*>(b);
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(pa + 2 * k), _mm256_loadu_pd(pb + 2 * k));
    const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(pa + 2 * k + 4), _mm256_loadu_pd(pb + 2 * k + 4));
    acc0 = _mm256_fmadd_pd(d0, d0, acc0);
    acc1 = _mm256_fmadd_pd(d1, d1, acc1);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; k < n; ++k) {
    const double re = a[k].real() - b[k].real();
    const double im = a[k].imag() - b[k].imag();
    acc += re * re + im * im;
  }
  return acc;
}

double scaled_sq_distance_avx2(const double* w, const Complex* v, const Complex* t, std::size_t n) {
  const double* pv = reinterpret_cast<const double*>(v);
  const double* pt = reinterpret_cast<const double*>(t);
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d d0 = _mm256_fmsub_pd(broadcast_pair(w + k), _mm256_loadu_pd(pv + 2 * k),
                                       _mm256_loadu_pd(pt + 2 * k));
    const __m256d d1 = _mm256_fmsub_pd(broadcast_pair(w + k + 2), _mm256_loadu_pd(pv + 2 * k + 4),
                                       _mm256_loadu_pd(pt + 2 * k + 4));
    acc0 = _mm256_fmadd_pd(d0, d0, acc0);
    acc1 = _mm256_fmadd_pd(d1, d1, acc1);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; k < n; ++k) {
    const double re = w[k] * v[k].real() - t[k].real();
    const double im = w[k] * v[k].imag() - t[k].imag();
    acc += re * re + im * im;
  }
  return acc;
}

double weighted_energy_avx2(const double* w, const Complex* v, std::size_t n) {
  const double* pv = reinterpret_cast<const double*>(v);
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d x0 = _mm256_loadu_pd(pv + 2 * k);
    const __m256d x1 = _mm256_loadu_pd(pv + 2 * k + 4);
    acc0 = _mm256_fmadd_pd(broadcast_pair(w + k), _mm256_mul_pd(x0, x0), acc0);
    acc1 = _mm256_fmadd_pd(broadcast_pair(w + k + 2), _mm256_mul_pd(x1, x1), acc1);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; k < n; ++k) {
    acc += w[k] * (v[k].real() * v[k].real() + v[k].imag() * v[k].imag());
  }
  return acc;
}

void axpy_avx2(const double* a, double c, const double* b, double* out, std::size_t n) {
  const __m256d vc = _mm256_set1_pd(c);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    _mm256_storeu_pd(out + k, _mm256_add_pd(_mm256_loadu_pd(a + k), _mm256_mul_pd(vc, _mm256_loadu_pd(b + k))));
  }
  for (; k < n; ++k) out[k] = a[k] + c * b[k];
}

}  // namespace

const KernelTable* avx2_kernels_compiled() {
  static const KernelTable table{Isa::kAvx2, sq_distance_avx2, scaled_sq_distance_avx2,
                                 weighted_energy_avx2, axpy_avx2};
  return &table;
}

}  // namespace deconv::simd
