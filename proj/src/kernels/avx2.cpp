// AVX2/FMA kernel variants. This translation unit is compiled with
// -mavx2 -mfma; nothing here may run unless cpu_has_avx2() said so.
#include <immintrin.h>

#include "risfd/kernels.hpp"

namespace risfd::kernels {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// (even lanes sum, odd lanes sum)
inline void hsum_pairs(__m256d v, double& even, double& odd) {
  alignas(32) double t[4];
  _mm256_store_pd(t, v);
  even = t[0] + t[2];
  odd = t[1] + t[3];
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4),
                           acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i),
                                            _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void gemv_avx2(const double* A, std::size_t rows, std::size_t cols,
               const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot_avx2(A + r * cols, x, cols);
}

void syr_avx2(double alpha, const double* x, std::size_t n, double* A,
              std::size_t lda) {
  for (std::size_t r = 0; r < n; ++r) {
    const double ax = alpha * x[r];
    if (ax == 0.0) continue;
    axpy_avx2(ax, x, A + r * lda, n);
  }
}

cplx cdotc_avx2(const cplx* a, const cplx* b, std::size_t n) {
  const double* pa = reinterpret_cast<const double*>(a);
  const double* pb = reinterpret_cast<const double*>(b);
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d va = _mm256_loadu_pd(pa + 2 * i);
    const __m256d vb = _mm256_loadu_pd(pb + 2 * i);
    const __m256d vb_sw = _mm256_permute_pd(vb, 0b0101);
    acc_re = _mm256_fmadd_pd(va, vb, acc_re);     // ar*br, ai*bi
    acc_im = _mm256_fmadd_pd(va, vb_sw, acc_im);  // ar*bi, ai*br
  }
  double re_e, re_o, im_e, im_o;
  hsum_pairs(acc_re, re_e, re_o);
  hsum_pairs(acc_im, im_e, im_o);
  double re = re_e + re_o;
  double im = im_e - im_o;
  for (; i < n; ++i) {
    re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
    im += a[i].real() * b[i].imag() - a[i].imag() * b[i].real();
  }
  return {re, im};
}

cplx cdotu_avx2(const cplx* a, const cplx* b, std::size_t n) {
  const double* pa = reinterpret_cast<const double*>(a);
  const double* pb = reinterpret_cast<const double*>(b);
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d va = _mm256_loadu_pd(pa + 2 * i);
    const __m256d vb = _mm256_loadu_pd(pb + 2 * i);
    const __m256d vb_sw = _mm256_permute_pd(vb, 0b0101);
    acc_re = _mm256_fmadd_pd(va, vb, acc_re);
    acc_im = _mm256_fmadd_pd(va, vb_sw, acc_im);
  }
  double re_e, re_o, im_e, im_o;
  hsum_pairs(acc_re, re_e, re_o);
  hsum_pairs(acc_im, im_e, im_o);
  double re = re_e - re_o;
  double im = im_e + im_o;
  for (; i < n; ++i) {
    re += a[i].real() * b[i].real() - a[i].imag() * b[i].imag();
    im += a[i].real() * b[i].imag() + a[i].imag() * b[i].real();
  }
  return {re, im};
}

double cnorm2_avx2(const cplx* x, std::size_t n) {
  return dot_avx2(reinterpret_cast<const double*>(x),
                  reinterpret_cast<const double*>(x), 2 * n);
}

}  // namespace

const KernelTable* avx2_table() {
  static const KernelTable table{Isa::Avx2, dot_avx2,   axpy_avx2,
                                 gemv_avx2, syr_avx2,   cdotc_avx2,
                                 cdotu_avx2, cnorm2_avx2};
  return &table;
}

}  // namespace risfd::kernels
