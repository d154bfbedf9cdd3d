#include "slocal/lattice.hpp"

#include "slocal/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace slocal {

void validate(const LatticeGeometry& geom) {
  if (geom.radius <= 0) throw config_error("lattice radius must be positive");
  if (geom.orbitals <= 0)
    throw config_error("orbital count must be positive");
  if (geom.shape == Shape::disk && geom.boundary == Boundary::periodic)
    throw config_error("periodic boundary requires a square lattice");
}

std::vector<Site> enumerate_sites(const LatticeGeometry& geom) {
  validate(geom);
  std::vector<Site> sites;
  const int r = geom.radius;
  if (geom.shape == Shape::square) {
    // Periodic squares span [-r, r-1] so the wrapped axis has period 2r;
    // open squares keep both edges, [-r, r].
    const int hi = (geom.boundary == Boundary::periodic) ? r - 1 : r;
    sites.reserve(static_cast<std::size_t>(hi + r + 1) * (hi + r + 1));
    for (int n1 = -r; n1 <= hi; ++n1)
      for (int n2 = -r; n2 <= hi; ++n2) sites.push_back({n1, n2});
  } else {
    const long long r2 = static_cast<long long>(r) * r;
    for (int n1 = -r; n1 <= r; ++n1)
      for (int n2 = -r; n2 <= r; ++n2)
        if (static_cast<long long>(n1) * n1 + static_cast<long long>(n2) * n2 <=
            r2)
          sites.push_back({n1, n2});
  }
  return sites;
}

namespace {
long long site_key(Site s) {
  // Coordinates are small; pack into one key for the hash map.
  return (static_cast<long long>(s.n1) << 32) ^
         static_cast<long long>(static_cast<unsigned int>(s.n2));
}
}  // namespace

SiteIndex::SiteIndex(const std::vector<Site>& sites) {
  map_.reserve(sites.size());
  for (std::size_t i = 0; i < sites.size(); ++i)
    map_.emplace(site_key(sites[i]), static_cast<long long>(i));
}

long long SiteIndex::find(Site s) const {
  auto it = map_.find(site_key(s));
  return it == map_.end() ? -1 : it->second;
}

int wrap_coordinate(int n, int radius) {
  const int side = 2 * radius;
  int m = (n + radius) % side;
  if (m < 0) m += side;
  return m - radius;
}

// ---------------------------------------------------------------------------
// Sparse containers

namespace {

void check_index(std::size_t row, std::size_t col, std::size_t dim) {
  if (row >= dim || col >= dim)
    throw config_error("sparse matrix index out of range");
}

void sort_and_merge(std::vector<Triplet>& entries) {
  std::sort(entries.begin(), entries.end(),
            [](const Triplet& a, const Triplet& b) {
              return a.col != b.col ? a.col < b.col : a.row < b.row;
            });
  std::size_t out = 0;
  for (std::size_t i = 0; i < entries.size();) {
    Triplet t = entries[i];
    std::size_t j = i + 1;
    while (j < entries.size() && entries[j].row == t.row &&
           entries[j].col == t.col) {
      t.value += entries[j].value;
      ++j;
    }
    if (t.value != cplx{0.0, 0.0}) entries[out++] = t;
    i = j;
  }
  entries.resize(out);
}

}  // namespace

void SparseHermitian::add(std::size_t row, std::size_t col, cplx value) {
  check_index(row, col, dim_);
  if (finalized_) throw config_error("add() after finalize()");
  if (row <= col)
    entries_.push_back({row, col, value});
  else
    entries_.push_back({col, row, std::conj(value)});
}

void SparseHermitian::finalize() {
  sort_and_merge(entries_);
  for (auto& t : entries_) {
    if (t.row != t.col) continue;
    const double im = t.value.imag();
    // Assemblies only ever put real data on the diagonal; allow cancellation
    // dust, reject anything that looks like a genuinely complex diagonal.
    if (std::abs(im) > 1e-13 * (1.0 + std::abs(t.value.real())))
      throw numerical_failure("Hermitian assembly: complex diagonal entry");
    t.value = cplx{t.value.real(), 0.0};
  }
  finalized_ = true;
}

const std::vector<Triplet>& SparseHermitian::upper() const {
  if (!finalized_) throw config_error("matrix not finalized");
  return entries_;
}

void SparseHermitian::matvec(const cplx* x, cplx* y) const {
  if (!finalized_) throw config_error("matrix not finalized");
  std::fill(y, y + dim_, cplx{0.0, 0.0});
  for (const auto& t : entries_) {
    y[t.row] += t.value * x[t.col];
    if (t.row != t.col) y[t.col] += std::conj(t.value) * x[t.row];
  }
}

DenseMatrix SparseHermitian::to_dense() const {
  if (!finalized_) throw config_error("matrix not finalized");
  DenseMatrix a(dim_, dim_);
  for (const auto& t : entries_) {
    a(t.row, t.col) += t.value;
    if (t.row != t.col) a(t.col, t.row) += std::conj(t.value);
  }
  return a;
}

void SparseComplex::add(std::size_t row, std::size_t col, cplx value) {
  check_index(row, col, dim_);
  if (finalized_) throw config_error("add() after finalize()");
  entries_.push_back({row, col, value});
}

void SparseComplex::finalize() {
  sort_and_merge(entries_);
  finalized_ = true;
}

const std::vector<Triplet>& SparseComplex::entries() const {
  if (!finalized_) throw config_error("matrix not finalized");
  return entries_;
}

void SparseComplex::matvec(const cplx* x, cplx* y) const {
  if (!finalized_) throw config_error("matrix not finalized");
  std::fill(y, y + dim_, cplx{0.0, 0.0});
  for (const auto& t : entries_) y[t.row] += t.value * x[t.col];
}

void SparseComplex::matvec_adj(const cplx* x, cplx* y) const {
  if (!finalized_) throw config_error("matrix not finalized");
  std::fill(y, y + dim_, cplx{0.0, 0.0});
  for (const auto& t : entries_) y[t.col] += std::conj(t.value) * x[t.row];
}

DenseMatrix SparseComplex::to_dense() const {
  if (!finalized_) throw config_error("matrix not finalized");
  DenseMatrix a(dim_, dim_);
  for (const auto& t : entries_) a(t.row, t.col) += t.value;
  return a;
}

SparseComplex SparseComplex::from_hermitian(const SparseHermitian& a) {
  SparseComplex out(a.dim());
  for (const auto& t : a.upper()) {
    out.add(t.row, t.col, t.value);
    if (t.row != t.col) out.add(t.col, t.row, std::conj(t.value));
  }
  out.finalize();
  return out;
}

// ---------------------------------------------------------------------------
// Operator norm and commutator

namespace {

constexpr std::uint64_t kNormSeed = 0x6f70657261746f72ull;  // fixed start

double power_iteration_norm(std::size_t dim, const SparseComplex& a,
                            double tol, std::size_t max_iters) {
  if (dim == 0) return 0.0;
  std::vector<cplx> v(dim), w(dim), u(dim);
  for (std::size_t i = 0; i < dim; ++i)
    v[i] = cplx{rng::site_uniform(kNormSeed, i),
                rng::site_uniform(kNormSeed ^ 0xffff, i)};
  double nv = 0.0;
  for (const auto& z : v) nv += std::norm(z);
  nv = std::sqrt(nv);
  for (auto& z : v) z /= nv;

  double sigma = 0.0;
  for (std::size_t it = 0; it < max_iters; ++it) {
    a.matvec(v.data(), w.data());
    double nw2 = 0.0;
    for (const auto& z : w) nw2 += std::norm(z);
    const double sigma_new = std::sqrt(nw2);  // ||Av|| with unit v
    if (sigma_new == 0.0) return 0.0;
    a.matvec_adj(w.data(), u.data());
    double nu = 0.0;
    for (const auto& z : u) nu += std::norm(z);
    nu = std::sqrt(nu);
    if (nu == 0.0) return sigma_new;
    for (std::size_t i = 0; i < dim; ++i) v[i] = u[i] / nu;
    if (it >= 2 && std::abs(sigma_new - sigma) <= tol * sigma_new)
      return sigma_new;
    sigma = sigma_new;
  }
  throw numerical_failure("operator_norm: power iteration did not converge");
}

}  // namespace

double operator_norm(const SparseComplex& a, double tol,
                     std::size_t max_iters) {
  if (tol <= 0.0) throw config_error("operator_norm: tol must be positive");
  return power_iteration_norm(a.dim(), a, tol, max_iters);
}

double operator_norm(const SparseHermitian& a, double tol,
                     std::size_t max_iters) {
  return operator_norm(SparseComplex::from_hermitian(a), tol, max_iters);
}

SparseComplex commutator(const SparseComplex& a, const SparseComplex& b) {
  if (a.dim() != b.dim())
    throw config_error("commutator: dimension mismatch");
  // Group the right factor's triplets by row so products line up by the
  // shared contraction index.
  auto by_row = [](const SparseComplex& m) {
    std::unordered_map<std::size_t, std::vector<const Triplet*>> rows;
    for (const auto& t : m.entries()) rows[t.row].push_back(&t);
    return rows;
  };
  const auto b_rows = by_row(b);
  const auto a_rows = by_row(a);

  std::unordered_map<std::uint64_t, cplx> acc;
  auto key = [dim = a.dim()](std::size_t i, std::size_t j) {
    return static_cast<std::uint64_t>(i) * dim + j;
  };
  for (const auto& ta : a.entries()) {  // (i,k) of A times row k of B
    auto it = b_rows.find(ta.col);
    if (it == b_rows.end()) continue;
    for (const Triplet* tb : it->second)
      acc[key(ta.row, tb->col)] += ta.value * tb->value;
  }
  for (const auto& tb : b.entries()) {  // minus (i,k) of B times row k of A
    auto it = a_rows.find(tb.col);
    if (it == a_rows.end()) continue;
    for (const Triplet* ta : it->second)
      acc[key(tb.row, ta->col)] -= tb.value * ta->value;
  }

  SparseComplex out(a.dim());
  for (const auto& [k, v] : acc)
    if (v != cplx{0.0, 0.0}) out.add(k / a.dim(), k % a.dim(), v);
  out.finalize();
  return out;
}

}  // namespace slocal
