#include "slocal/models.hpp"

#include "slocal/rng.hpp"

#include <cmath>
#include <numbers>

namespace slocal {

namespace {

/// Forward nearest-neighbor bonds from each site; wraps on periodic squares,
/// drops bonds leaving an open region. Calls f(source_site_idx,
/// target_site_idx, direction) with direction 0 for e1=(1,0), 1 for e2=(0,1).
template <typename F>
void for_each_bond(const LatticeGeometry& geom, const std::vector<Site>& sites,
                   const SiteIndex& index, F&& f) {
  const bool periodic = geom.boundary == Boundary::periodic;
  for (std::size_t s = 0; s < sites.size(); ++s) {
    for (int dir = 0; dir < 2; ++dir) {
      Site t = sites[s];
      (dir == 0 ? t.n1 : t.n2) += 1;
      if (periodic) {
        t.n1 = wrap_coordinate(t.n1, geom.radius);
        t.n2 = wrap_coordinate(t.n2, geom.radius);
      }
      const long long ti = index.find(t);
      if (ti >= 0) f(s, static_cast<std::size_t>(ti), dir);
    }
  }
}

SparseHermitian assemble_bdg(const ModelParams& params,
                             const LatticeGeometry& geom,
                             const double* disorder) {
  validate(geom);
  if (geom.orbitals != 2)
    throw config_error("BdG model requires orbitals = 2");
  if (params.lambda < 0.0)
    throw config_error("disorder coupling lambda must be >= 0");
  const auto sites = enumerate_sites(geom);
  const SiteIndex index(sites);
  SparseHermitian h(2 * sites.size());

  for (std::size_t s = 0; s < sites.size(); ++s) {
    double onsite = -params.mu;
    if (disorder) onsite += params.lambda * disorder[s];
    h.add(2 * s, 2 * s, onsite);
    h.add(2 * s + 1, 2 * s + 1, -onsite);  // hole block is -(h - mu)^T
  }
  const double d = params.delta;
  for_each_bond(geom, sites, index, [&](std::size_t s, std::size_t t, int dir) {
    // Hopping S + S^T: unit amplitude on the particle block, negated
    // (real) transpose on the hole block.
    h.add(2 * t, 2 * s, cplx{1.0, 0.0});
    h.add(2 * t + 1, 2 * s + 1, cplx{-1.0, 0.0});
    // Pairing B = delta[(S1 - S1^T) - i(S2 - S2^T)], antisymmetric.
    const cplx amp = (dir == 0) ? cplx{d, 0.0} : cplx{0.0, -d};
    h.add(2 * t, 2 * s + 1, amp);   // B[t][s]
    h.add(2 * s, 2 * t + 1, -amp);  // B[s][t] = -B[t][s]
  });
  h.finalize();
  return h;
}

}  // namespace

SparseHermitian build_clean_pip(const ModelParams& params,
                                const LatticeGeometry& geom) {
  return assemble_bdg(params, geom, nullptr);
}

DisorderRealization sample_disorder(const LatticeGeometry& geom,
                                    std::uint64_t seed) {
  validate(geom);
  const auto sites = enumerate_sites(geom);
  DisorderRealization r;
  r.seed = seed;
  r.values.resize(sites.size());
  for (std::size_t i = 0; i < sites.size(); ++i)
    r.values[i] = rng::site_uniform(seed, i);
  return r;
}

SparseHermitian build_dirty(const ModelParams& params,
                            const LatticeGeometry& geom,
                            const DisorderRealization& realization) {
  if (realization.values.size() != enumerate_sites(geom).size())
    throw config_error("disorder realization does not match geometry");
  return assemble_bdg(params, geom, realization.values.data());
}

SparseComplex build_chiral_chain(double t1, double t2, int length) {
  if (length < 2) throw config_error("chain length must be at least 2");
  SparseComplex a(static_cast<std::size_t>(length));
  for (int n = 0; n < length; ++n) {
    a.add(n, n, cplx{t1, 0.0});
    if (n + 1 < length) a.add(n + 1, n, cplx{t2, 0.0});
  }
  a.finalize();
  return a;
}

int chain_winding_number(double t1, double t2, int grid_points) {
  if (grid_points < 8) throw config_error("winding grid too coarse");
  if (std::abs(t1) == std::abs(t2))
    throw config_error("winding undefined for |t1| == |t2| (the symbol "
                       "touches the origin)");
  // Accumulate the phase increment of a(k) = t1 + t2 e^{ik} around the
  // Brillouin zone; each increment is small, so summing arg of successive
  // ratios counts the net number of counterclockwise loops.
  double total = 0.0;
  cplx prev{t1 + t2, 0.0};  // k = 0
  for (int j = 1; j <= grid_points; ++j) {
    const double k =
        2.0 * std::numbers::pi * static_cast<double>(j) / grid_points;
    const cplx cur = cplx{t1, 0.0} + t2 * cplx{std::cos(k), std::sin(k)};
    if (std::abs(cur) == 0.0 || std::abs(prev) == 0.0)
      throw numerical_failure("winding: symbol vanishes on the grid");
    total += std::arg(cur / prev);
    prev = cur;
  }
  return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

}  // namespace slocal
