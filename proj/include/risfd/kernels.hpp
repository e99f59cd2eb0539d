#pragma once
// Inner-loop arithmetic kernels.
//
// Every kernel has a portable scalar reference implementation and, on x86-64,
// an AVX2/FMA variant. The variant is picked once at runtime from CPUID; the
// scalar table is always available so tests can check the two against each
// other.

#include <complex>
#include <cstddef>
#include <string_view>

namespace risfd::kernels {

using cplx = std::complex<double>;

enum class Isa { Scalar, Avx2 };

struct KernelTable {
  Isa isa;
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // y = A x for a row-major rows x cols matrix
  void (*gemv)(const double* A, std::size_t rows, std::size_t cols,
               const double* x, double* y);
  // A += alpha * x x^T on the full n x n row-major matrix (stride lda)
  void (*syr)(double alpha, const double* x, std::size_t n, double* A,
              std::size_t lda);
  // sum_i conj(a[i]) * b[i]
  cplx (*cdotc)(const cplx* a, const cplx* b, std::size_t n);
  // sum_i a[i] * b[i] (no conjugation)
  cplx (*cdotu)(const cplx* a, const cplx* b, std::size_t n);
  // sum_i |x[i]|^2
  double (*cnorm2)(const cplx* x, std::size_t n);
};

const KernelTable& scalar_table();
// Null when the AVX2 variant was not compiled in.
const KernelTable* avx2_table();

bool cpu_has_avx2();

// Table chosen for this process. Honors RISFD_SIMD=scalar to force the
// reference path.
const KernelTable& active();

std::string_view isa_name(Isa isa);

}  // namespace risfd::kernels
