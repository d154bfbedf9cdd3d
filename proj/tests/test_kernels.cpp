#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "slocal/kernels.hpp"
#include "slocal/rng.hpp"

#include <cmath>
#include <complex>
#include <vector>

using namespace slocal;

namespace {

std::vector<cplx> random_vec(std::size_t n, std::uint64_t seed) {
  std::vector<cplx> v(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = cplx{rng::site_uniform(seed, 2 * i),
                rng::site_uniform(seed, 2 * i + 1)};
  return v;
}

// Plain-loop references, independent of the library's scalar set.
cplx naive_zdotc(std::size_t n, const cplx* x, const cplx* y) {
  cplx s{0, 0};
  for (std::size_t i = 0; i < n; ++i) s += std::conj(x[i]) * y[i];
  return s;
}

double naive_znrm2sq(std::size_t n, const cplx* x) {
  double s = 0;
  for (std::size_t i = 0; i < n; ++i) s += std::norm(x[i]);
  return s;
}

void naive_gemm_sub_nc(std::size_t m, std::size_t n, std::size_t k,
                       const cplx* A, std::size_t lda, const cplx* B,
                       std::size_t ldb, cplx* C, std::size_t ldc) {
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < m; ++i) {
      cplx s{0, 0};
      for (std::size_t l = 0; l < k; ++l)
        s += A[i + l * lda] * std::conj(B[j + l * ldb]);
      C[i + j * ldc] -= s;
    }
}

const std::size_t kSizes[] = {0, 1, 2, 3, 5, 7, 8, 9, 15, 16,
                              17, 31, 32, 33, 63, 64, 65, 100, 127};

void check_set(const kern::Kernels& k, const char* name) {
  INFO("kernel set: " << name);
  for (std::size_t n : kSizes) {
    const auto x = random_vec(n, 11 + n);
    auto y = random_vec(n, 23 + n);
    const cplx alpha{0.37, -1.21};
    const double tol = 1e-13 * double(n + 1);

    // zaxpy
    auto y1 = y;
    k.zaxpy(n, alpha, x.data(), y1.data());
    for (std::size_t i = 0; i < n; ++i)
      CHECK(std::abs(y1[i] - (y[i] + alpha * x[i])) < tol);

    // zdotc / znrm2sq
    if (n > 0) {
      CHECK(std::abs(k.zdotc(n, x.data(), y.data()) -
                     naive_zdotc(n, x.data(), y.data())) < tol);
      CHECK(std::abs(k.znrm2sq(n, x.data()) - naive_znrm2sq(n, x.data())) <
            tol);
    }

    // zscal
    auto y2 = y;
    k.zscal(n, alpha, y2.data());
    for (std::size_t i = 0; i < n; ++i)
      CHECK(std::abs(y2[i] - alpha * y[i]) < tol);
  }

  // zgemm_sub_nc over mixed shapes, including leading dims > logical dims
  const std::size_t shapes[][3] = {{1, 1, 1},  {2, 3, 4},   {5, 5, 5},
                                   {8, 8, 8},  {13, 7, 9},  {16, 16, 16},
                                   {17, 19, 23}, {33, 5, 64}, {40, 40, 3}};
  for (const auto& s : shapes) {
    const std::size_t m = s[0], n = s[1], kk = s[2];
    const std::size_t lda = m + 3, ldb = n + 1, ldc = m + 2;
    const auto A = random_vec(lda * kk, 7 * m + n);
    const auto B = random_vec(ldb * kk, 13 * n + kk);
    auto C = random_vec(ldc * n, 17 * m + kk);
    auto C_ref = C;
    k.zgemm_sub_nc(m, n, kk, A.data(), lda, B.data(), ldb, C.data(), ldc);
    naive_gemm_sub_nc(m, n, kk, A.data(), lda, B.data(), ldb, C_ref.data(),
                      ldc);
    const double tol = 1e-12 * double(kk + 1);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < m; ++i)
        CHECK(std::abs(C[i + j * ldc] - C_ref[i + j * ldc]) < tol);
    // rows beyond m within ldc must be untouched
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = m; i < ldc; ++i)
        CHECK(C[i + j * ldc] == C_ref[i + j * ldc]);
  }
}

}  // namespace

TEST_CASE("scalar reference set matches naive loops") {
  check_set(kern::scalar_ref(), "scalar");
}

TEST_CASE("active set matches naive loops") { check_set(kern::active(), "active"); }

TEST_CASE("avx2 set (when present) matches the scalar reference exactly "
          "enough for interchangeable use") {
  const kern::Kernels* v = kern::avx2_set();
  if (!v) {
    MESSAGE("AVX2 not available on this host; dispatch test skipped");
    return;
  }
  check_set(*v, "avx2");

  // direct scalar-vs-simd comparison on one awkward size
  const std::size_t n = 1037;
  const auto x = random_vec(n, 5);
  const auto y = random_vec(n, 6);
  const cplx ds = kern::scalar_ref().zdotc(n, x.data(), y.data());
  const cplx dv = v->zdotc(n, x.data(), y.data());
  CHECK(std::abs(ds - dv) <= 1e-12 * std::abs(ds));
}
