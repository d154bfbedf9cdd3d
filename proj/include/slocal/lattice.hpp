/// Lattice geometries on ℤ², deterministic site indexing, and the sparse
/// matrix containers the rest of the toolkit assembles into.
///
/// Conventions fixed here and relied on everywhere else:
///   - sites are enumerated lexicographically by (n1, n2);
///   - orbitals are innermost: global index = site_index * orbitals + orbital;
///   - a periodic square of radius r covers [-r, r-1]² (side 2r) so that
///     opposite edges identify cleanly; an open square covers [-r, r]².

#pragma once

#include "slocal/common.hpp"
#include "slocal/dense.hpp"

#include <cstddef>
#include <unordered_map>
#include <vector>

namespace slocal {

enum class Shape { square, disk };
enum class Boundary { open, periodic };

struct Site {
  int n1 = 0;
  int n2 = 0;
  bool operator==(const Site&) const = default;
};

struct LatticeGeometry {
  Shape shape = Shape::square;
  int radius = 1;
  Boundary boundary = Boundary::open;
  int orbitals = 1;
};

/// Throws config_error on invalid combinations (non-positive radius or
/// orbitals, periodic disk).
void validate(const LatticeGeometry& geom);

/// All lattice sites of the geometry, lexicographic by (n1, n2).
std::vector<Site> enumerate_sites(const LatticeGeometry& geom);

/// Site -> index lookup over an enumerate_sites ordering.
class SiteIndex {
 public:
  explicit SiteIndex(const std::vector<Site>& sites);
  /// Index of a site, or -1 if outside the geometry.
  long long find(Site s) const;

 private:
  std::unordered_map<long long, long long> map_;
};

/// Canonical representative of coordinate n on a periodic axis of side 2r,
/// i.e. the unique value in [-r, r-1] congruent to n (mod 2r).
int wrap_coordinate(int n, int radius);

struct Triplet {
  std::size_t row;
  std::size_t col;
  cplx value;
};

/// Hermitian sparse matrix storing the upper triangle once (row <= col);
/// the mirror image is implied. add() folds lower-triangle entries into
/// their conjugate upper image, so each logical entry is added exactly once
/// from whichever side is convenient.
class SparseHermitian {
 public:
  explicit SparseHermitian(std::size_t dim) : dim_(dim) {}

  void add(std::size_t row, std::size_t col, cplx value);

  /// Merges duplicate keys, drops exact zeros, checks the diagonal is real
  /// (tiny imaginary dust from cancellation is zeroed; anything larger is a
  /// numerical_failure). Required before any read accessor.
  void finalize();

  std::size_t dim() const { return dim_; }
  bool finalized() const { return finalized_; }
  const std::vector<Triplet>& upper() const;

  /// y = A x with the Hermitian mirror applied.
  void matvec(const cplx* x, cplx* y) const;

  DenseMatrix to_dense() const;

 private:
  std::size_t dim_;
  bool finalized_ = false;
  std::vector<Triplet> entries_;
};

/// General sparse complex matrix, full triplet storage.
class SparseComplex {
 public:
  explicit SparseComplex(std::size_t dim) : dim_(dim) {}

  void add(std::size_t row, std::size_t col, cplx value);
  void finalize();

  std::size_t dim() const { return dim_; }
  bool finalized() const { return finalized_; }
  const std::vector<Triplet>& entries() const;

  void matvec(const cplx* x, cplx* y) const;      // y = A x
  void matvec_adj(const cplx* x, cplx* y) const;  // y = A* x

  DenseMatrix to_dense() const;

  static SparseComplex from_hermitian(const SparseHermitian& a);

 private:
  std::size_t dim_;
  bool finalized_ = false;
  std::vector<Triplet> entries_;
};

/// Largest singular value via power iteration on A*A with a fixed
/// pseudorandom start vector. Relative accuracy tol; throws
/// numerical_failure if the iteration has not settled after max_iters.
double operator_norm(const SparseComplex& a, double tol = 1e-10,
                     std::size_t max_iters = 10000);
double operator_norm(const SparseHermitian& a, double tol = 1e-10,
                     std::size_t max_iters = 10000);

/// AB - BA with exact sparse arithmetic.
SparseComplex commutator(const SparseComplex& a, const SparseComplex& b);

}  // namespace slocal
