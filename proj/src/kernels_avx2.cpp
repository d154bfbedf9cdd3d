/// AVX2+FMA kernels for interleaved complex<double> vectors and column-major
/// matrices. One 256-bit register holds two complex values [re0 im0 re1 im1].
///
/// Complex arithmetic identity used throughout: with va = [ar ai ...] and its
/// in-pair swap vs = [ai ar ...],
///     a * b        = va*[br br] + vs*[-bi +bi]
///     a * conj(b)  = va*[br br] + vs*[+bi -bi]
/// which is two FMAs per register once the broadcast of b is sign-adjusted
/// with an XOR mask.
///
/// This file is compiled with -mavx2 -mfma; callers must only reach it
/// through the dispatch table, which checks CPU support at runtime.

#include "slocal/kernels.hpp"

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

namespace slocal::kern {
namespace {

const Kernels& sref = scalar_ref();

// Sign masks: flip the sign of odd lanes / even lanes via XOR.
inline __m256d sign_odd() { return _mm256_setr_pd(0.0, -0.0, 0.0, -0.0); }
inline __m256d sign_even() { return _mm256_setr_pd(-0.0, 0.0, -0.0, 0.0); }

inline __m256d swap_pairs(__m256d v) { return _mm256_permute_pd(v, 0x5); }

void zaxpy_avx2(std::size_t n, cplx alpha, const cplx* x, cplx* y) {
  const double ar = alpha.real(), ai = alpha.imag();
  const __m256d var = _mm256_set1_pd(ar);
  // a*x: even lane gets -ai*xi, odd lane +ai*xr  ->  [-ai +ai -ai +ai]
  const __m256d vai = _mm256_xor_pd(_mm256_set1_pd(ai), sign_even());
  std::size_t i = 0;
  const double* xd = reinterpret_cast<const double*>(x);
  double* yd = reinterpret_cast<double*>(y);
  for (; i + 2 <= n; i += 2) {
    const __m256d vx = _mm256_loadu_pd(xd + 2 * i);
    const __m256d vy = _mm256_loadu_pd(yd + 2 * i);
    const __m256d t = _mm256_fmadd_pd(swap_pairs(vx), vai, vy);
    _mm256_storeu_pd(yd + 2 * i, _mm256_fmadd_pd(vx, var, t));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

cplx zdotc_avx2(std::size_t n, const cplx* x, const cplx* y) {
  // conj(x)*y: real = xr*yr + xi*yi (plain lane products),
  //            imag = xr*yi - xi*yr (swap x, sign on even lanes).
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();
  std::size_t i = 0;
  const double* xd = reinterpret_cast<const double*>(x);
  const double* yd = reinterpret_cast<const double*>(y);
  for (; i + 2 <= n; i += 2) {
    const __m256d vx = _mm256_loadu_pd(xd + 2 * i);
    const __m256d vy = _mm256_loadu_pd(yd + 2 * i);
    acc_re = _mm256_fmadd_pd(vx, vy, acc_re);
    // [xi*yr, xr*yi]: odd-lane minus even-lane sums to the imaginary part.
    acc_im = _mm256_fmadd_pd(swap_pairs(vx), vy, acc_im);
  }
  alignas(32) double re4[4], im4[4];
  _mm256_store_pd(re4, acc_re);
  _mm256_store_pd(im4, acc_im);
  double re = re4[0] + re4[1] + re4[2] + re4[3];
  double im = (im4[1] + im4[3]) - (im4[0] + im4[2]);
  for (; i < n; ++i) {
    const cplx t = std::conj(x[i]) * y[i];
    re += t.real();
    im += t.imag();
  }
  return {re, im};
}

void zscal_avx2(std::size_t n, cplx alpha, cplx* x) {
  const __m256d var = _mm256_set1_pd(alpha.real());
  const __m256d vai = _mm256_xor_pd(_mm256_set1_pd(alpha.imag()), sign_even());
  std::size_t i = 0;
  double* xd = reinterpret_cast<double*>(x);
  for (; i + 2 <= n; i += 2) {
    const __m256d vx = _mm256_loadu_pd(xd + 2 * i);
    const __m256d t = _mm256_mul_pd(swap_pairs(vx), vai);
    _mm256_storeu_pd(xd + 2 * i, _mm256_fmadd_pd(vx, var, t));
  }
  for (; i < n; ++i) x[i] *= alpha;
}

double znrm2sq_avx2(std::size_t n, const cplx* x) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  const double* xd = reinterpret_cast<const double*>(x);
  for (; i + 2 <= n; i += 2) {
    const __m256d vx = _mm256_loadu_pd(xd + 2 * i);
    acc = _mm256_fmadd_pd(vx, vx, acc);
  }
  alignas(32) double a4[4];
  _mm256_store_pd(a4, acc);
  double s = a4[0] + a4[1] + a4[2] + a4[3];
  for (; i < n; ++i)
    s += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
  return s;
}

/// 4x4 microkernel: C[i0..i0+4, j0..j0+4] -= A[i0..i0+4, :] * B[j0..j0+4, :]^H
/// over the k-range [l0, l1). Accumulates in registers, one store per C tile.
inline void micro_4x4(std::size_t i0, std::size_t j0, std::size_t l0,
                      std::size_t l1, const cplx* A, std::size_t lda,
                      const cplx* B, std::size_t ldb, cplx* C,
                      std::size_t ldc) {
  __m256d acc[4][2];
  for (int j = 0; j < 4; ++j)
    for (int h = 0; h < 2; ++h) acc[j][h] = _mm256_setzero_pd();
  const __m256d sodd = sign_odd();
  for (std::size_t l = l0; l < l1; ++l) {
    const double* acol = reinterpret_cast<const double*>(A + i0 + l * lda);
    const __m256d va0 = _mm256_loadu_pd(acol);
    const __m256d va1 = _mm256_loadu_pd(acol + 4);
    const __m256d vs0 = swap_pairs(va0);
    const __m256d vs1 = swap_pairs(va1);
    const double* brow = reinterpret_cast<const double*>(B + l * ldb);
    for (int j = 0; j < 4; ++j) {
      // a * conj(b): [+bi -bi] on the swapped lanes.
      const __m256d vbr = _mm256_broadcast_sd(brow + 2 * (j0 + j));
      const __m256d vbi =
          _mm256_xor_pd(_mm256_broadcast_sd(brow + 2 * (j0 + j) + 1), sodd);
      acc[j][0] = _mm256_fmadd_pd(va0, vbr, acc[j][0]);
      acc[j][0] = _mm256_fmadd_pd(vs0, vbi, acc[j][0]);
      acc[j][1] = _mm256_fmadd_pd(va1, vbr, acc[j][1]);
      acc[j][1] = _mm256_fmadd_pd(vs1, vbi, acc[j][1]);
    }
  }
  for (int j = 0; j < 4; ++j) {
    double* ccol = reinterpret_cast<double*>(C + i0 + (j0 + j) * ldc);
    _mm256_storeu_pd(ccol, _mm256_sub_pd(_mm256_loadu_pd(ccol), acc[j][0]));
    _mm256_storeu_pd(ccol + 4,
                     _mm256_sub_pd(_mm256_loadu_pd(ccol + 4), acc[j][1]));
  }
}

void zgemm_sub_nc_avx2(std::size_t m, std::size_t n, std::size_t k,
                       const cplx* A, std::size_t lda, const cplx* B,
                       std::size_t ldb, cplx* C, std::size_t ldc) {
  constexpr std::size_t KC = 128;  // keep the 4-row A slice resident in L1
  const std::size_t m4 = m - m % 4;
  const std::size_t n4 = n - n % 4;
  for (std::size_t l0 = 0; l0 < k; l0 += KC) {
    const std::size_t l1 = (l0 + KC < k) ? l0 + KC : k;
    for (std::size_t i = 0; i < m4; i += 4)
      for (std::size_t j = 0; j < n4; j += 4)
        micro_4x4(i, j, l0, l1, A, lda, B, ldb, C, ldc);
  }
  // Remainder rows/columns: defer to the scalar reference.
  if (m4 < m)
    sref.zgemm_sub_nc(m - m4, n, k, A + m4, lda, B, ldb, C + m4, ldc);
  if (n4 < n)
    sref.zgemm_sub_nc(m4, n - n4, k, A, lda, B + n4, ldb, C + n4 * ldc, ldc);
}

}  // namespace

const Kernels* avx2_set() {
  static const Kernels k{zaxpy_avx2, zdotc_avx2,          zscal_avx2,
                         znrm2sq_avx2, zgemm_sub_nc_avx2, "avx2"};
  return &k;
}

}  // namespace slocal::kern

#else  // no AVX2 at compile time (non-x86 build): slot stays open

namespace slocal::kern {
const Kernels* avx2_set() { return nullptr; }
}  // namespace slocal::kern

#endif
