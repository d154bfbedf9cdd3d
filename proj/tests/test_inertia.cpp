#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "slocal/inertia.hpp"
#include "slocal/lattice.hpp"
#include "slocal/rng.hpp"

#define LAPACK_COMPLEX_CPP
#include <lapacke.h>

#include <cmath>
#include <vector>

using namespace slocal;

namespace {

DenseMatrix random_hermitian(std::size_t n, std::uint64_t seed) {
  DenseMatrix a(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      const cplx v{rng::site_uniform(seed, i + j * n),
                   rng::site_uniform(seed ^ 0x5bd1ull, i + j * n)};
      a(i, j) = v;
      a(j, i) = std::conj(v);
    }
    a(j, j) = cplx{2.0 * rng::site_uniform(seed ^ 0x9ull, j), 0.0};
  }
  return a;
}

SparseHermitian to_sparse(const DenseMatrix& a) {
  SparseHermitian s(a.rows());
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i <= j; ++i)
      if (a(i, j) != cplx{0.0, 0.0}) s.add(i, j, a(i, j));
  s.finalize();
  return s;
}

Inertia census_from_eigenvalues(const std::vector<double>& w, double tol) {
  Inertia c;
  for (double x : w) {
    if (x > tol)
      ++c.n_plus;
    else if (x < -tol)
      ++c.n_minus;
    else
      ++c.n_zero;
  }
  return c;
}

}  // namespace

TEST_CASE("census on a known diagonal, including exact-zero deflation") {
  DenseMatrix a(4, 4);
  a(0, 0) = cplx{3.0, 0.0};
  a(1, 1) = cplx{-1.0, 0.0};
  a(2, 2) = cplx{-2.5, 0.0};
  a(3, 3) = cplx{0.0, 0.0};  // deflated: zero row and column
  const auto f = LDLFactor::compute(a, 1e-12);
  CHECK(f.inertia().n_plus == 1);
  CHECK(f.inertia().n_minus == 2);
  CHECK(f.inertia().n_zero == 1);
  CHECK(f.inertia().signature() == -1);
}

TEST_CASE("2x2 pivots: zero diagonal forces the second Bunch-Kaufman branch") {
  DenseMatrix a(2, 2);
  a(0, 1) = cplx{1.0, 0.0};
  a(1, 0) = cplx{1.0, 0.0};
  const auto f = LDLFactor::compute(a, 1e-12);
  CHECK(f.inertia().n_plus == 1);
  CHECK(f.inertia().n_minus == 1);
  CHECK(f.inertia().n_zero == 0);

  // an anti-diagonal chain keeps forcing 2x2 blocks at every step
  const std::size_t n = 8;
  DenseMatrix b(n, n);
  for (std::size_t i = 0; i < n / 2; ++i) {
    b(i, n - 1 - i) = cplx{1.0, 0.5};
    b(n - 1 - i, i) = cplx{1.0, -0.5};
  }
  const auto fb = LDLFactor::compute(b, 1e-12);
  CHECK(fb.inertia().n_plus == n / 2);
  CHECK(fb.inertia().n_minus == n / 2);
  CHECK(fb.inertia().n_zero == 0);
}

TEST_CASE("census equality with the dense eigensolver on random matrices") {
  for (std::uint64_t trial = 0; trial < 40; ++trial) {
    const std::size_t n = 5 + rng::splitmix64(trial) % 56;
    auto a = random_hermitian(n, 1000 + trial);
    const auto s = to_sparse(a);
    const double tol = default_pivot_tol(s);
    const auto mine = inertia_ldl(s);
    const auto dense = census_from_eigenvalues(dense_eigenvalues(s), tol);
    INFO("trial " << trial << " dim " << n);
    CHECK(mine.n_plus == dense.n_plus);
    CHECK(mine.n_minus == dense.n_minus);
    CHECK(mine.n_zero == dense.n_zero);
  }
}

TEST_CASE("solve: residuals at working precision, blocked and unblocked") {
  for (std::size_t n : {3u, 17u, 64u, 65u, 130u}) {
    auto a = random_hermitian(n, 77 + n);
    const auto s = to_sparse(a);
    const auto f = LDLFactor::compute(s, default_pivot_tol(s));
    REQUIRE(f.inertia().n_zero == 0);
    std::vector<cplx> b(n), x(n);
    for (std::size_t i = 0; i < n; ++i)
      b[i] = cplx{rng::site_uniform(5, i), rng::site_uniform(6, i)};
    x = b;
    f.solve(x.data());
    // residual r = A x - b against the dense mirror
    double rn = 0.0, bn = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      cplx r{0, 0};
      for (std::size_t j = 0; j < n; ++j) r += a(i, j) * x[j];
      rn += std::norm(r - b[i]);
      bn += std::norm(b[i]);
    }
    INFO("dim " << n);
    CHECK(std::sqrt(rn / bn) < 1e-10);
  }
}

TEST_CASE("cross-validation against LAPACK zhetrf/zhetrs") {
  // Factor with this library, solve with LAPACK's zhetrs (after converting
  // the pivot record to LAPACK's 1-based convention), and vice versa is
  // covered by the residual test above. Together they pin the packed-factor
  // storage convention, not just the census.
  for (std::size_t n : {4u, 9u, 33u, 64u, 100u}) {
    auto a = random_hermitian(n, 31 + n);
    const auto s = to_sparse(a);
    const auto f = LDLFactor::compute(s, default_pivot_tol(s));
    REQUIRE(f.inertia().n_zero == 0);

    // my packed factor -> LAPACK ipiv convention
    std::vector<lapack_int> ipiv(n);
    const auto& piv = f.pivots();
    for (std::size_t k = 0; k < n; ++k) {
      if (piv[k] >= 0) {
        ipiv[k] = static_cast<lapack_int>(piv[k]) + 1;
      } else {
        ipiv[k] = -(static_cast<lapack_int>(~piv[k]) + 1);
        ipiv[k + 1] = ipiv[k];
        ++k;
      }
    }
    std::vector<cplx> fac(n * n);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) fac[i + j * n] = f.factor()(i, j);

    std::vector<cplx> b(n);
    for (std::size_t i = 0; i < n; ++i)
      b[i] = cplx{rng::site_uniform(51, i), rng::site_uniform(52, i)};
    auto x = b;
    const lapack_int info = LAPACKE_zhetrs(
        LAPACK_COL_MAJOR, 'L', static_cast<lapack_int>(n), 1,
        reinterpret_cast<const lapack_complex_double*>(fac.data()),
        static_cast<lapack_int>(n), ipiv.data(),
        reinterpret_cast<lapack_complex_double*>(x.data()),
        static_cast<lapack_int>(n));
    REQUIRE(info == 0);

    double rn = 0.0, bn = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      cplx r{0, 0};
      for (std::size_t j = 0; j < n; ++j) r += a(i, j) * x[j];
      rn += std::norm(r - b[i]);
      bn += std::norm(b[i]);
    }
    INFO("dim " << n);
    CHECK(std::sqrt(rn / bn) < 1e-10);
  }
}

TEST_CASE("solve refuses singular factorizations") {
  DenseMatrix a(2, 2);
  a(0, 0) = cplx{1.0, 0.0};  // second row/column exactly zero
  const auto f = LDLFactor::compute(a, 1e-12);
  REQUIRE(f.inertia().n_zero == 1);
  std::vector<cplx> b{cplx{1, 0}, cplx{1, 0}};
  CHECK_THROWS_AS(f.solve(b.data()), gap_closed_error);
}

TEST_CASE("Sylvester invariance: congruence preserves the census") {
  const std::size_t n = 24;
  auto a = random_hermitian(n, 222);
  const auto base = inertia_ldl(to_sparse(a));
  // congruence by a random nonsingular S: B = S^H A S
  DenseMatrix sm(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i)
      sm(i, j) = cplx{rng::site_uniform(7, i + j * n),
                      rng::site_uniform(8, i + j * n)};
    sm(j, j) += cplx{3.0, 0.0};  // keep it comfortably nonsingular
  }
  DenseMatrix tmp(n, n), bmat(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      cplx s{0, 0};
      for (std::size_t k = 0; k < n; ++k) s += a(i, k) * sm(k, j);
      tmp(i, j) = s;
    }
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      cplx s{0, 0};
      for (std::size_t k = 0; k < n; ++k) s += std::conj(sm(k, i)) * tmp(k, j);
      bmat(i, j) = s;
    }
  for (std::size_t j = 0; j < n; ++j) bmat(j, j) = cplx{bmat(j, j).real(), 0};
  const auto cong = inertia_ldl(to_sparse(bmat));
  CHECK(base.n_plus == cong.n_plus);
  CHECK(base.n_minus == cong.n_minus);
  CHECK(base.n_zero == cong.n_zero);
}

TEST_CASE("half_signature and the gap-closed guard") {
  SparseHermitian a(3);
  a.add(0, 0, 5.0);
  a.add(1, 1, 1.0);
  a.add(2, 2, -2.0);
  a.finalize();
  CHECK(half_signature(a) == 0.5);

  SparseHermitian z(2);
  z.add(0, 0, 1.0);
  z.finalize();  // dim 2 but rank 1
  CHECK_THROWS_AS(half_signature(z), gap_closed_error);
}

TEST_CASE("one_norm on a fixed example") {
  SparseHermitian a(2);
  a.add(0, 0, 1.0);
  a.add(0, 1, cplx{0.0, -2.0});
  a.finalize();
  // column 0: |1| + |2i| = 3; column 1: |2i| = 2
  CHECK(one_norm(a) == doctest::Approx(3.0));
}

TEST_CASE("gap methods agree: bisection vs dense within 1e-8") {
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    const std::size_t n = 6 + rng::splitmix64(500 + trial) % 30;
    const auto s = to_sparse(random_hermitian(n, 4000 + trial));
    const auto gb = spectral_gap(s, GapMethod::bisection, 1e-10);
    const auto gd = spectral_gap(s, GapMethod::dense, 1e-10);
    INFO("trial " << trial << " dim " << n);
    CHECK(std::abs(gb.gap - gd.gap) < 1e-8);
    CHECK(gd.certified);
  }
}

TEST_CASE("gap methods agree: inverse vs dense to its advertised accuracy") {
  for (std::uint64_t trial = 0; trial < 10; ++trial) {
    const std::size_t n = 10 + rng::splitmix64(800 + trial) % 40;
    const auto s = to_sparse(random_hermitian(n, 6000 + trial));
    const auto gi = spectral_gap(s, GapMethod::inverse, 1e-10);
    const auto gd = spectral_gap(s, GapMethod::dense, 1e-10);
    INFO("trial " << trial << " dim " << n);
    CHECK(std::abs(gi.gap - gd.gap) < 1e-7 * std::max(1.0, gd.gap));
    CHECK_FALSE(gi.certified);
  }
}

TEST_CASE("gap_from_factor reproduces the inverse method without refactoring") {
  const auto s = to_sparse(random_hermitian(40, 12345));
  const auto f = LDLFactor::compute(s, default_pivot_tol(s));
  const auto g1 = gap_from_factor(f, 1e-8);
  const auto g2 = spectral_gap(s, GapMethod::inverse, 1e-8);
  CHECK(g1.gap == g2.gap);  // identical arithmetic path
}

TEST_CASE("singular matrices are reported as gap zero, certified") {
  SparseHermitian z(3);
  z.add(0, 0, 2.0);
  z.add(1, 1, -1.0);
  z.finalize();
  const auto g = spectral_gap(z, GapMethod::inverse, 1e-8);
  CHECK(g.gap == 0.0);
  CHECK(g.certified);
  const auto gb = spectral_gap(z, GapMethod::bisection, 1e-8);
  CHECK(gb.gap <= 1e-9);
}

TEST_CASE("parameter validation") {
  SparseHermitian a(2);
  a.add(0, 0, 1.0);
  a.add(1, 1, 1.0);
  a.finalize();
  CHECK_THROWS_AS(spectral_gap(a, GapMethod::bisection, 0.0), config_error);
  CHECK_THROWS_AS(spectral_gap(a, GapMethod::bisection, -1.0), config_error);
}
