/// Scalar reference kernels. Correctness baseline for the SIMD variants;
/// written for clarity, not speed.

#include <cstddef>

#include "slocal/kernels.hpp"

namespace slocal::kern {
namespace {

void zaxpy_scalar(std::size_t n, cplx alpha, const cplx* x, cplx* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

cplx zdotc_scalar(std::size_t n, const cplx* x, const cplx* y) {
  cplx s{0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) s += std::conj(x[i]) * y[i];
  return s;
}

void zscal_scalar(std::size_t n, cplx alpha, cplx* x) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

double znrm2sq_scalar(std::size_t n, const cplx* x) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    s += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
  return s;
}

void zgemm_sub_nc_scalar(std::size_t m, std::size_t n, std::size_t k,
                         const cplx* A, std::size_t lda, const cplx* B,
                         std::size_t ldb, cplx* C, std::size_t ldc) {
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t l = 0; l < k; ++l) {
      const cplx blj = std::conj(B[j + l * ldb]);
      if (blj == cplx{0.0, 0.0}) continue;
      const cplx* acol = A + l * lda;
      cplx* ccol = C + j * ldc;
      for (std::size_t i = 0; i < m; ++i) ccol[i] -= acol[i] * blj;
    }
  }
}

}  // namespace

const Kernels& scalar_ref() {
  static const Kernels k{zaxpy_scalar, zdotc_scalar,     zscal_scalar,
                         znrm2sq_scalar, zgemm_sub_nc_scalar, "scalar"};
  return k;
}

}  // namespace slocal::kern
