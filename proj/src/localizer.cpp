#include "slocal/localizer.hpp"

#include "slocal/inertia.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace slocal {

namespace {

constexpr double kOriginEps = 1e-12;

/// Diagonal of a SparseComplex that is expected to be diagonal (Dirac
/// operators). Throws config_error on any off-diagonal entry.
std::vector<cplx> diagonal_of(const SparseComplex& d, const char* what) {
  std::vector<cplx> diag(d.dim(), cplx{0.0, 0.0});
  for (const auto& t : d.entries()) {
    if (t.row != t.col)
      throw config_error(std::string(what) + ": operator must be diagonal");
    diag[t.row] += t.value;
  }
  return diag;
}

std::vector<cplx> diagonal_of(const SparseHermitian& d, const char* what) {
  std::vector<cplx> diag(d.dim(), cplx{0.0, 0.0});
  for (const auto& t : d.upper()) {
    if (t.row != t.col)
      throw config_error(std::string(what) + ": operator must be diagonal");
    diag[t.row] += t.value;
  }
  return diag;
}

/// Indices kept by the truncation |d| <= rho, plus old->new index map
/// (-1 when dropped).
struct Truncation {
  std::vector<std::size_t> kept;
  std::vector<long long> to_new;
};

Truncation truncate_by_modulus(const std::vector<cplx>& diag, double rho) {
  Truncation t;
  t.to_new.assign(diag.size(), -1);
  for (std::size_t i = 0; i < diag.size(); ++i)
    if (std::abs(diag[i]) <= rho) {
      t.to_new[i] = static_cast<long long>(t.kept.size());
      t.kept.push_back(i);
    }
  return t;
}

}  // namespace

void validate(const LocalizerParams& params) {
  if (!(params.kappa > 0.0))
    throw config_error("localizer: kappa must be positive");
  if (!(params.rho >= 1.0)) throw config_error("localizer: rho must be >= 1");
}

SparseComplex build_dirac(const LatticeGeometry& geom,
                          std::array<double, 2> center) {
  validate(geom);
  const auto sites = enumerate_sites(geom);
  const auto orb = static_cast<std::size_t>(geom.orbitals);
  SparseComplex d(sites.size() * orb);
  for (std::size_t s = 0; s < sites.size(); ++s) {
    cplx v{static_cast<double>(sites[s].n1) - center[0],
           static_cast<double>(sites[s].n2) - center[1]};
    if (std::abs(v) < kOriginEps) v = cplx{1.0, 0.0};
    for (std::size_t o = 0; o < orb; ++o) d.add(s * orb + o, s * orb + o, v);
  }
  d.finalize();
  return d;
}

SparseHermitian build_chain_dirac(std::size_t length, double center) {
  if (length == 0) throw config_error("chain dirac: empty chain");
  SparseHermitian d(length);
  for (std::size_t n = 0; n < length; ++n) {
    double x = static_cast<double>(n) - center;
    if (std::abs(x) < kOriginEps) x = 1.0;
    d.add(n, n, cplx{x, 0.0});
  }
  d.finalize();
  return d;
}

SparseComplex dirac_phase(const SparseComplex& d0) {
  const auto diag = diagonal_of(d0, "dirac_phase");
  SparseComplex f(d0.dim());
  for (std::size_t i = 0; i < diag.size(); ++i) {
    const double m = std::abs(diag[i]);
    if (m == 0.0)
      throw numerical_failure("dirac_phase: zero diagonal entry");
    f.add(i, i, diag[i] / m);
  }
  f.finalize();
  return f;
}

SparseHermitian assemble_even_localizer(const SparseHermitian& h,
                                        const SparseComplex& d0,
                                        const LocalizerParams& params) {
  validate(params);
  if (h.dim() != d0.dim())
    throw config_error("even localizer: H and D0 dimensions differ");
  const auto diag = diagonal_of(d0, "even localizer");

  double max_mod = 0.0;
  for (const auto& v : diag) max_mod = std::max(max_mod, std::abs(v));
  if (params.rho > max_mod)
    throw config_error(
        "even localizer: rho exceeds the available geometry (truncation "
        "disk reaches past every basis state)");

  const auto tr = truncate_by_modulus(diag, params.rho);
  const std::size_t nk = tr.kept.size();
  if (nk == 0)
    throw config_error("even localizer: truncation kept no basis states");

  SparseHermitian l(2 * nk);
  for (const auto& t : h.upper()) {
    const long long r = tr.to_new[t.row];
    const long long c = tr.to_new[t.col];
    if (r < 0 || c < 0) continue;  // Dirichlet cut
    const auto rn = static_cast<std::size_t>(r);
    const auto cn = static_cast<std::size_t>(c);
    l.add(rn, cn, -t.value);
    l.add(nk + rn, nk + cn, t.value);
  }
  for (std::size_t i = 0; i < nk; ++i)
    l.add(nk + i, i, params.kappa * diag[tr.kept[i]]);
  l.finalize();
  return l;
}

SparseHermitian assemble_odd_localizer(const SparseComplex& a,
                                       const SparseHermitian& d, double kappa,
                                       double rho) {
  if (!(kappa > 0.0))
    throw config_error("odd localizer: kappa must be positive");
  if (!(rho > 0.0)) throw config_error("odd localizer: rho must be positive");
  if (a.dim() != d.dim())
    throw config_error("odd localizer: A and D dimensions differ");
  const auto diag = diagonal_of(d, "odd localizer");

  const auto tr = truncate_by_modulus(diag, rho);
  const std::size_t nk = tr.kept.size();
  if (nk == 0)
    throw config_error("odd localizer: truncation kept no basis states");

  SparseHermitian l(2 * nk);
  for (std::size_t i = 0; i < nk; ++i) {
    const double x = diag[tr.kept[i]].real();
    l.add(i, i, kappa * x);
    l.add(nk + i, nk + i, -kappa * x);
  }
  for (const auto& t : a.entries()) {
    const long long r = tr.to_new[t.row];
    const long long c = tr.to_new[t.col];
    if (r < 0 || c < 0) continue;
    l.add(nk + static_cast<std::size_t>(r), static_cast<std::size_t>(c),
          t.value);
  }
  l.finalize();
  return l;
}

BoundsReport check_bounds(const SparseHermitian& h, const SparseComplex& d0,
                          const LocalizerParams& params, double gap_tol) {
  validate(params);
  const GapResult gap = spectral_gap(h, GapMethod::bisection, gap_tol);
  const double resolution = gap_tol * std::max(1.0, one_norm(h));
  if (!(gap.gap > resolution))
    throw gap_closed_error(
        "check_bounds: H is not invertible at the measurement resolution");

  BoundsReport rep;
  rep.g = gap.gap;
  rep.norm_H = operator_norm(h);
  rep.norm_comm =
      operator_norm(commutator(d0, SparseComplex::from_hermitian(h)));
  const double denom = 12.0 * rep.norm_H * rep.norm_comm;
  rep.kappa_max = denom > 0.0 ? rep.g * rep.g * rep.g / denom
                              : std::numeric_limits<double>::infinity();
  rep.rho_min = 2.0 * rep.g / params.kappa;
  rep.kappa_ok = params.kappa <= rep.kappa_max;
  rep.rho_ok = params.rho > rep.rho_min;
  return rep;
}

double default_kappa(double g, double norm_comm) {
  if (!(g > 0.0)) throw config_error("default_kappa: g must be positive");
  if (!(norm_comm > 0.0))
    throw config_error("default_kappa: commutator norm must be positive");
  return g / (2.0 * norm_comm);
}

std::vector<MarkerPoint> local_marker_map(
    const SparseHermitian& h, const LatticeGeometry& geom, double kappa,
    double rho, const std::vector<std::array<double, 2>>& centers) {
  validate(geom);
  const double r = static_cast<double>(geom.radius);
  for (const auto& c : centers) {
    bool fits = false;
    if (geom.shape == Shape::disk) {
      fits = std::hypot(c[0], c[1]) + rho <= r;
    } else {
      const double hi = geom.boundary == Boundary::periodic ? r - 1.0 : r;
      fits = c[0] - rho >= -r && c[0] + rho <= hi && c[1] - rho >= -r &&
             c[1] + rho <= hi;
    }
    if (!fits)
      throw config_error(
          "local marker: center too close to the boundary (truncation disk "
          "does not fit in the geometry)");
  }

  std::vector<MarkerPoint> out;
  out.reserve(centers.size());
  for (const auto& c : centers) {
    const SparseComplex d0 = build_dirac(geom, c);
    const SparseHermitian l =
        assemble_even_localizer(h, d0, LocalizerParams{kappa, rho, c});
    out.push_back({c, half_signature(l)});
  }
  return out;
}

}  // namespace slocal
