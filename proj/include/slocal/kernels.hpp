/// Low-level complex vector/matrix kernels with runtime SIMD dispatch.
///
/// These are the hot loops of the toolkit: the blocked LDL^H factorization
/// spends nearly all of its time in zgemm_sub_nc (the trailing Schur-
/// complement update), and the power/inverse iterations live in the level-1
/// kernels. Each kernel has a scalar reference implementation and an
/// AVX2+FMA variant; dispatch happens once at startup based on CPU features
/// (overridable with SLOCAL_KERNELS=scalar|avx2 for testing). The two
/// implementations are equivalence-tested against each other on randomized
/// instances in test_kernels.cpp.
///
/// All matrices are column-major. Kernels are plain C-style functions so the
/// dispatch table stays trivially copyable and testable.
#pragma once

#include <cstddef>

#include "slocal/common.hpp"

namespace slocal::kern {

struct Kernels {
  /// y += alpha * x
  void (*zaxpy)(std::size_t n, cplx alpha, const cplx* x, cplx* y);
  /// sum_i conj(x_i) * y_i
  cplx (*zdotc)(std::size_t n, const cplx* x, const cplx* y);
  /// x *= alpha
  void (*zscal)(std::size_t n, cplx alpha, cplx* x);
  /// sum_i |x_i|^2
  double (*znrm2sq)(std::size_t n, const cplx* x);
  /// C (m x n, ldc) -= A (m x k, lda) * B^H, where B is n x k (ldb).
  /// I.e. C[i][j] -= sum_l A[i][l] * conj(B[j][l]).
  void (*zgemm_sub_nc)(std::size_t m, std::size_t n, std::size_t k,
                       const cplx* A, std::size_t lda, const cplx* B,
                       std::size_t ldb, cplx* C, std::size_t ldc);
  const char* name;
};

/// Kernel set selected for this machine (scalar unless AVX2+FMA available).
const Kernels& active();

/// Always-available scalar reference set (the oracle for equivalence tests).
const Kernels& scalar_ref();

/// AVX2 set, or nullptr if unsupported on this CPU / not compiled in.
const Kernels* avx2_set();

}  // namespace slocal::kern
