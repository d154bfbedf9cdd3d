#include "slocal/specflow.hpp"

#include "slocal/inertia.hpp"
#include "slocal/localizer.hpp"

#include <algorithm>
#include <cblas.h>
#include <cmath>
#include <numbers>

namespace slocal {

namespace {

/// Signature of an invertible Hermitian matrix; throws gap_closed_error
/// (with the caller's context) when singular at the default tolerance.
long long signature_of(const SparseHermitian& a, const char* context) {
  const Inertia in = inertia_ldl(a);
  if (in.n_zero > 0) throw gap_closed_error(context);
  return in.signature();
}

bool singular_at_default_tol(const SparseHermitian& a) {
  return inertia_ldl(a).n_zero > 0;
}

}  // namespace

long long spectral_flow_line(const SparseHermitian& t0,
                             const SparseHermitian& t1) {
  if (t0.dim() != t1.dim())
    throw config_error("spectral flow: endpoint dimensions differ");
  const long long s0 = signature_of(t0, "spectral flow: T0 is singular");
  const long long s1 = signature_of(t1, "spectral flow: T1 is singular");
  return (s1 - s0) / 2;
}

long long spectral_flow_path(const MatrixPath& path) {
  if (!path.evaluator) throw config_error("spectral flow: empty evaluator");
  if (path.samples < 2)
    throw config_error("spectral flow: need at least two samples");

  const std::size_t m = path.samples;
  const double h = 1.0 / static_cast<double>(m - 1);

  std::vector<long long> sig(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double t = static_cast<double>(k) * h;
    if (k == 0 || k + 1 == m) {
      sig[k] = signature_of(path.evaluator(t),
                            "spectral flow: path endpoint is singular");
      continue;
    }
    // Interior sample: nudge around a singular point by halving offsets.
    double used_t = t;
    bool ok = !singular_at_default_tol(path.evaluator(t));
    for (int depth = 1; !ok && depth <= 12; ++depth) {
      const double dt = h / static_cast<double>(1 << depth);
      for (const double cand : {t + dt, t - dt}) {
        if (cand <= 0.0 || cand >= 1.0) continue;
        if (!singular_at_default_tol(path.evaluator(cand))) {
          used_t = cand;
          ok = true;
          break;
        }
      }
    }
    if (!ok)
      throw numerical_failure(
          "spectral flow: singular interior sample unresolved after 12 "
          "halvings (ambiguous flow)");
    sig[k] = signature_of(path.evaluator(used_t), "spectral flow: interior");
  }

  long long flow = 0;
  for (std::size_t k = 0; k + 1 < m; ++k) flow += (sig[k + 1] - sig[k]) / 2;
  return flow;
}

// ---------------------------------------------------------------------------

FermiProjection fermi_projection(const SparseHermitian& h, FermiMode mode,
                                 double tol) {
  if (tol < 0.0) throw config_error("fermi projection: tol must be >= 0");
  const std::size_t n = h.dim();
  DenseMatrix v = h.to_dense();
  const std::vector<double> w = dense_eigensystem(v);  // ascending

  if (mode == FermiMode::strict)
    for (double x : w)
      if (std::abs(x) < tol)
        throw gap_closed_error(
            "fermi projection: eigenvalue within tol of zero (no spectral "
            "gap at the Fermi level)");

  std::size_t k = 0;
  while (k < n && w[k] < 0.0) ++k;

  FermiProjection out{DenseMatrix(n, n)};
  if (k > 0) {
    const cplx one{1.0, 0.0}, zero{0.0, 0.0};
    cblas_zgemm(CblasColMajor, CblasNoTrans, CblasConjTrans,
                static_cast<int>(n), static_cast<int>(n), static_cast<int>(k),
                &one, v.data(), static_cast<int>(n), v.data(),
                static_cast<int>(n), &zero, out.p.data(),
                static_cast<int>(n));
  }
  return out;
}

ChernResult chern_real_space(const FermiProjection& p,
                             const LatticeGeometry& geom,
                             const std::vector<Site>& region, double margin) {
  validate(geom);
  const auto sites = enumerate_sites(geom);
  const auto orb = static_cast<std::size_t>(geom.orbitals);
  const std::size_t n = sites.size() * orb;
  if (p.p.rows() != n || p.p.cols() != n)
    throw config_error("chern: projection dimension does not match geometry");
  if (region.empty()) throw config_error("chern: empty averaging region");

  const SiteIndex index(sites);
  const bool periodic = geom.boundary == Boundary::periodic;
  const double r = static_cast<double>(geom.radius);
  std::vector<std::size_t> region_idx;
  region_idx.reserve(region.size());
  for (const Site& s : region) {
    const long long i = index.find(s);
    if (i < 0) throw config_error("chern: region site outside the geometry");
    if (!periodic) {
      double dist;
      if (geom.shape == Shape::disk)
        dist = r - std::hypot(s.n1, s.n2);
      else
        dist = r - std::max(std::abs(s.n1), std::abs(s.n2));
      if (dist < margin)
        throw config_error(
            "chern: averaging region touches the boundary margin");
    }
    region_idx.push_back(static_cast<std::size_t>(i));
  }

  // Commutators [X_a, P] as Hadamard products d_a(i,j) * P(i,j); on the
  // torus the coordinate differences are minimum-image.
  auto coord_diff = [&](int a, int b) {
    const int d = a - b;
    return static_cast<double>(periodic ? wrap_coordinate(d, geom.radius)
                                        : d);
  };
  DenseMatrix a1(n, n), a2(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    const Site sj = sites[j / orb];
    for (std::size_t i = 0; i < n; ++i) {
      const Site si = sites[i / orb];
      const cplx pij = p.p(i, j);
      a1(i, j) = coord_diff(si.n1, sj.n1) * pij;
      a2(i, j) = coord_diff(si.n2, sj.n2) * pij;
    }
  }

  // M = [X1,P][X2,P] - [X2,P][X1,P]
  DenseMatrix m(n, n);
  const cplx one{1.0, 0.0}, minus{-1.0, 0.0}, zero{0.0, 0.0};
  const auto ni = static_cast<int>(n);
  cblas_zgemm(CblasColMajor, CblasNoTrans, CblasNoTrans, ni, ni, ni, &one,
              a1.data(), ni, a2.data(), ni, &zero, m.data(), ni);
  cblas_zgemm(CblasColMajor, CblasNoTrans, CblasNoTrans, ni, ni, ni, &minus,
              a2.data(), ni, a1.data(), ni, &one, m.data(), ni);

  // Mean over region sites of the orbital trace of (P M)(i,i).
  cplx acc{0.0, 0.0};
  for (const std::size_t s : region_idx) {
    cplx site_trace{0.0, 0.0};
    for (std::size_t o = 0; o < orb; ++o) {
      const std::size_t i = s * orb + o;
      cplx d{0.0, 0.0};
      for (std::size_t kk = 0; kk < n; ++kk) d += p.p(i, kk) * m(kk, i);
      site_trace += d;
    }
    acc += site_trace;
  }
  acc /= static_cast<double>(region_idx.size());

  const cplx result = cplx{0.0, -2.0 * std::numbers::pi} * acc;
  const double residual = std::abs(result.imag());
  if (!(residual < 1e-8))
    throw numerical_failure(
        "chern: imaginary residual exceeds 1e-8 (projection or geometry "
        "inconsistent)");
  return {result.real(), residual};
}

// ---------------------------------------------------------------------------

namespace {

/// diag(-H, H) + s * [[0, D0*],[D0, 0]] with D0 diagonal (s may be 0).
SparseHermitian graded_pair(const SparseHermitian& h, const SparseComplex& d0,
                            double s) {
  const std::size_t n = h.dim();
  SparseHermitian l(2 * n);
  for (const auto& t : h.upper()) {
    l.add(t.row, t.col, -t.value);
    l.add(n + t.row, n + t.col, t.value);
  }
  if (s != 0.0)
    for (const auto& t : d0.entries()) {
      if (t.row != t.col)
        throw config_error("path gap: D0 must be diagonal");
      l.add(n + t.row, t.col, s * t.value);
    }
  l.finalize();
  return l;
}

}  // namespace

double localizer_path_gap(const SparseHermitian& h, const SparseComplex& d0,
                          double kappa, std::size_t samples,
                          GapMethod method) {
  if (h.dim() != d0.dim())
    throw config_error("path gap: H and D0 dimensions differ");
  if (samples < 2) throw config_error("path gap: need at least two samples");
  if (!(kappa >= 0.0)) throw config_error("path gap: kappa must be >= 0");

  double min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < samples; ++k) {
    const double t =
        static_cast<double>(k) / static_cast<double>(samples - 1);
    const SparseHermitian lt = graded_pair(h, d0, t * kappa);
    const GapResult g = spectral_gap(lt, method, 1e-8);
    min_gap = std::min(min_gap, g.gap);
    if (min_gap == 0.0) return 0.0;
  }
  return min_gap;
}

DecouplingGap decoupling_path_gap(const SparseHermitian& h,
                                  const SparseComplex& d0, double kappa,
                                  double rho_inner, double rho_outer,
                                  std::size_t samples, GapMethod method) {
  if (h.dim() != d0.dim())
    throw config_error("decoupling: H and D0 dimensions differ");
  if (!(rho_inner > 0.0) || !(rho_inner < rho_outer))
    throw config_error("decoupling: need 0 < rho_inner < rho_outer");
  if (!(kappa > 0.0)) throw config_error("decoupling: kappa must be > 0");
  if (samples < 2) throw config_error("decoupling: need >= 2 samples");

  // Moduli of the Dirac diagonal, for the truncation and the inner/annulus
  // classification (same kept-index order as the localizer assembly).
  std::vector<double> mod(d0.dim(), 0.0);
  for (const auto& t : d0.entries()) {
    if (t.row != t.col)
      throw config_error("decoupling: D0 must be diagonal");
    mod[t.row] = std::abs(t.value);
  }
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < mod.size(); ++i)
    if (mod[i] <= rho_outer) kept.push_back(i);
  const std::size_t nk = kept.size();
  if (nk == 0) throw config_error("decoupling: outer truncation is empty");

  // inner[i] for the localizer row i (both grading blocks share the flag).
  std::vector<char> inner(2 * nk, 0);
  for (std::size_t i = 0; i < nk; ++i)
    if (mod[kept[i]] <= rho_inner) inner[i] = inner[nk + i] = 1;
  if (std::count(inner.begin(), inner.end(), char(1)) == 0)
    throw config_error("decoupling: inner truncation is empty");

  const SparseHermitian l = assemble_even_localizer(
      h, d0, LocalizerParams{kappa, rho_outer, {0.0, 0.0}});

  auto scaled = [&](double t) {
    SparseHermitian lt(l.dim());
    for (const auto& tr : l.upper()) {
      const bool cross = inner[tr.row] != inner[tr.col];
      const cplx v = cross ? (1.0 - t) * tr.value : tr.value;
      if (v != cplx{0.0, 0.0}) lt.add(tr.row, tr.col, v);
    }
    lt.finalize();
    return lt;
  };

  DecouplingGap out{std::numeric_limits<double>::infinity(), 0.0};
  for (std::size_t k = 0; k < samples; ++k) {
    const double t =
        static_cast<double>(k) / static_cast<double>(samples - 1);
    const GapResult g = spectral_gap(scaled(t), method, 1e-8);
    out.min_path_gap = std::min(out.min_path_gap, g.gap);
    if (out.min_path_gap == 0.0) break;
  }

  // Decoupled annulus block of the t=1 endpoint.
  std::vector<long long> to_sub(2 * nk, -1);
  std::size_t ns = 0;
  for (std::size_t i = 0; i < 2 * nk; ++i)
    if (!inner[i]) to_sub[i] = static_cast<long long>(ns++);
  if (ns > 0) {
    SparseHermitian annulus(ns);
    for (const auto& tr : l.upper()) {
      const long long r = to_sub[tr.row];
      const long long c = to_sub[tr.col];
      if (r < 0 || c < 0) continue;
      annulus.add(static_cast<std::size_t>(r), static_cast<std::size_t>(c),
                  tr.value);
    }
    annulus.finalize();
    out.outer_block_gap = spectral_gap(annulus, method, 1e-8).gap;
  }
  return out;
}

SparseHermitian perturb_to_invertible(const SparseHermitian& a,
                                      double epsilon) {
  if (!(epsilon > 0.0))
    throw config_error("perturb_to_invertible: epsilon must be positive");
  const std::size_t n = a.dim();
  DenseMatrix v = a.to_dense();
  const std::vector<double> w = dense_eigensystem(v);

  const double cutoff = epsilon * 1e-3;
  bool any = false;
  for (double x : w)
    if (std::abs(x) < cutoff) any = true;
  if (!any) return a;

  DenseMatrix d = a.to_dense();
  for (std::size_t k = 0; k < n; ++k) {
    if (std::abs(w[k]) >= cutoff) continue;
    // d += (epsilon/2) * v_k v_k^H
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i)
        d(i, j) += 0.5 * epsilon * v(i, k) * std::conj(v(j, k));
  }
  SparseHermitian out(n);
  for (std::size_t j = 0; j < n; ++j) {
    out.add(j, j, cplx{d(j, j).real(), 0.0});
    for (std::size_t i = j + 1; i < n; ++i)
      if (d(i, j) != cplx{0.0, 0.0}) out.add(i, j, d(i, j));
  }
  out.finalize();
  return out;
}

}  // namespace slocal
