/// Inertia, signature, and spectral-gap kernels for Hermitian matrices.
///
/// The workhorse is a blocked LDLᴴ factorization with Bunch–Kaufman 1×1/2×2
/// pivoting (lower triangle, column-major). By Sylvester's law of inertia
/// the sign census of D equals the eigenvalue sign census of A, so the
/// signature comes out of one factorization instead of a full eigensolve.
/// The same factorization drives eigenvalue counting (bisection gap
/// estimation: n_minus(A − sI) counts eigenvalues below s) and inverse
/// iteration (fast uncertified gap estimates reusing one factorization).
/// A dense eigensolver backed by LAPACK serves as the independent oracle
/// route; it is used for cross-checks, spectra exports, and projections,
/// never as a substitute for the factorization path.

#pragma once

#include "slocal/common.hpp"
#include "slocal/dense.hpp"
#include "slocal/lattice.hpp"

#include <cstddef>
#include <vector>

namespace slocal {

struct Inertia {
  std::size_t n_plus = 0;
  std::size_t n_minus = 0;
  std::size_t n_zero = 0;
  long long signature() const {
    return static_cast<long long>(n_plus) - static_cast<long long>(n_minus);
  }
};

/// ‖A‖₁ (= ‖A‖∞ for Hermitian A), an upper bound on the spectral radius.
double one_norm(const SparseHermitian& a);

/// Default numerical-rank cutoff: 1e−10 · ‖A‖₁.
double default_pivot_tol(const SparseHermitian& a);

/// LDLᴴ factorization P A Pᵀ-style with Bunch–Kaufman pivoting, packed in
/// the lower triangle. Holds the inertia census of D and supports solves
/// for inverse iteration. Pivots with both the diagonal and its column
/// residual at or below pivot_tol are deflated to exact zeros and counted
/// in n_zero.
class LDLFactor {
 public:
  /// Factors in place, consuming the buffer (lower triangle is read; the
  /// strict upper triangle is ignored).
  static LDLFactor compute(DenseMatrix a, double pivot_tol);
  static LDLFactor compute(const SparseHermitian& a, double pivot_tol);

  std::size_t dim() const { return f_.rows(); }
  const Inertia& inertia() const { return inertia_; }

  /// Packed factor (L and the D blocks in the lower triangle) and the pivot
  /// record, exposed for diagnostics and equivalence tests.
  const DenseMatrix& factor() const { return f_; }
  const std::vector<long long>& pivots() const { return ipiv_; }

  /// Solves A x = b in place. Requires an invertible factorization
  /// (n_zero = 0); throws gap_closed_error otherwise.
  void solve(cplx* b) const;

 private:
  LDLFactor() = default;
  DenseMatrix f_;
  std::vector<long long> ipiv_;  // >= 0: 1x1 pivot row; < 0: 2x2, ~value
  Inertia inertia_;
};

/// Inertia via the pivoted LDLᴴ factorization.
Inertia inertia_ldl(const SparseHermitian& a, double pivot_tol);
Inertia inertia_ldl(const SparseHermitian& a);  // default_pivot_tol

/// (n₊ − n₋)/2. Throws gap_closed_error when n_zero > 0: the half-signature
/// is only defined for matrices invertible at the working tolerance.
double half_signature(const Inertia& inertia);
double half_signature(const SparseHermitian& a);

enum class GapMethod { bisection, dense, inverse };

struct GapResult {
  double gap = 0.0;  // min |eigenvalue|
  GapMethod method = GapMethod::bisection;
  bool certified = false;
};

/// Distance of the spectrum from zero.
///   bisection: certified bracketing via inertia counts of A − sI; the
///     bracket is bisected until its width drops below tol·max(1, ‖A‖₁),
///     and the midpoint is returned. A factorization reporting zero pivots
///     at a shift is retried at a perturbed shift up to 3 times, after
///     which the result is flagged uncertified.
///   dense: full eigensolve, certified.
///   inverse: one factorization of A plus inverse power iteration; fast and
///     accurate in practice but not certified. The norm-ratio estimate is
///     insensitive to the sign oscillation a ±θ eigenvalue pair induces.
GapResult spectral_gap(const SparseHermitian& a, GapMethod method,
                       double tol);

/// Inverse-iteration gap estimate reusing an existing factorization (the
/// expensive part), so callers that already factored for the inertia census
/// do not pay for a second factorization. Same semantics as
/// GapMethod::inverse: certified only in the singular (n_zero > 0) case.
GapResult gap_from_factor(const LDLFactor& f, double tol = 1e-8);

/// All eigenvalues, ascending, via the dense Hermitian eigensolver
/// (backward-stable up to O(dim·eps·‖A‖)). Throws config_error when the
/// dimension exceeds dense_limit.
std::vector<double> dense_eigenvalues(const SparseHermitian& a,
                                      std::size_t dense_limit = 8192);
std::vector<double> dense_eigenvalues(const DenseMatrix& a,
                                      std::size_t dense_limit = 8192);

/// Full eigendecomposition: returns eigenvalues ascending and overwrites
/// the buffer with the corresponding orthonormal eigenvectors (columns).
std::vector<double> dense_eigensystem(DenseMatrix& a);

}  // namespace slocal
