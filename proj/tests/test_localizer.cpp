#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "slocal/inertia.hpp"
#include "slocal/lattice.hpp"
#include "slocal/localizer.hpp"
#include "slocal/models.hpp"

#include <cmath>
#include <vector>

using namespace slocal;

namespace {
// The auto-scaled coupling used throughout the desk-scale experiments:
// bulk gap 0.25 over twice the clean open-model commutator norm.
const double kKappa = 0.25 / (2.0 * 3.8171);
}  // namespace

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(validate(LocalizerParams{0.0, 10.0, {0, 0}}), config_error);
  CHECK_THROWS_AS(validate(LocalizerParams{-0.1, 10.0, {0, 0}}), config_error);
  CHECK_THROWS_AS(validate(LocalizerParams{0.1, 0.5, {0, 0}}), config_error);
  CHECK_NOTHROW(validate(LocalizerParams{0.1, 1.0, {0, 0}}));
}

TEST_CASE("build_dirac: positions as complex numbers, origin made invertible") {
  const LatticeGeometry g{Shape::square, 1, Boundary::open, 2};
  const auto d0 = build_dirac(g, {0.0, 0.0});
  // sites (-1,-1) .. (1,1); orbitals doubled; origin entry lifted to 1
  const auto sites = enumerate_sites(g);
  const SiteIndex idx(sites);
  std::vector<cplx> diag(d0.dim());
  for (const auto& t : d0.entries()) {
    REQUIRE(t.row == t.col);
    diag[t.row] = t.value;
  }
  const auto origin = static_cast<std::size_t>(idx.find(Site{0, 0}));
  CHECK(diag[2 * origin] == cplx{1.0, 0.0});
  CHECK(diag[2 * origin + 1] == cplx{1.0, 0.0});
  const auto corner = static_cast<std::size_t>(idx.find(Site{-1, 1}));
  CHECK(diag[2 * corner] == cplx{-1.0, 1.0});
  // recentring moves the lifted entry to the new center
  const auto dc = build_dirac(g, {1.0, 1.0});
  std::vector<cplx> diag_c(dc.dim());
  for (const auto& t : dc.entries()) diag_c[t.row] = t.value;
  const auto c11 = static_cast<std::size_t>(idx.find(Site{1, 1}));
  CHECK(diag_c[2 * c11] == cplx{1.0, 0.0});
  CHECK(diag_c[2 * origin] == cplx{-1.0, -1.0});
}

TEST_CASE("dirac_phase normalizes and rejects zeros") {
  SparseComplex d(2);
  d.add(0, 0, cplx{3.0, 4.0});
  d.add(1, 1, cplx{0.0, -2.0});
  d.finalize();
  const auto f = dirac_phase(d);
  for (const auto& t : f.entries())
    CHECK(std::abs(std::abs(t.value) - 1.0) < 1e-15);

  SparseComplex z(2);
  z.add(0, 0, cplx{1.0, 0.0});  // second diagonal entry missing -> zero
  z.finalize();
  CHECK_THROWS_AS(dirac_phase(z), numerical_failure);
}

TEST_CASE("even localizer on one site: entries, spectrum, signature") {
  SparseHermitian h(1);
  h.add(0, 0, 2.0);
  h.finalize();
  SparseComplex d0(1);
  d0.add(0, 0, 1.0);
  d0.finalize();
  const auto l = assemble_even_localizer(h, d0, {1.0, 1.0, {0, 0}});
  const auto dm = l.to_dense();
  CHECK(dm(0, 0) == cplx{-2.0, 0.0});
  CHECK(dm(1, 1) == cplx{2.0, 0.0});
  CHECK(dm(1, 0) == cplx{1.0, 0.0});
  CHECK(dm(0, 1) == cplx{1.0, 0.0});
  const auto ev = dense_eigenvalues(l);
  CHECK(ev[0] == doctest::Approx(-std::sqrt(5.0)).epsilon(1e-12));
  CHECK(ev[1] == doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));
  CHECK(inertia_ldl(l).signature() == 0);
}

TEST_CASE("H = 0: localizer spectrum is the symmetric set kappa * |d|") {
  const LatticeGeometry g{Shape::disk, 4, Boundary::open, 2};
  SparseHermitian h(enumerate_sites(g).size() * 2);
  h.finalize();
  const auto d0 = build_dirac(g, {0.0, 0.0});
  const auto l = assemble_even_localizer(h, d0, {0.7, 4.0, {0, 0}});
  CHECK(inertia_ldl(l).signature() == 0);
  const auto gp = spectral_gap(l, GapMethod::dense, 1e-10);
  CHECK(gp.gap == doctest::Approx(0.7).epsilon(1e-12));  // min |d| = 1
}

TEST_CASE("truncation keeps exactly the sites with |d| <= rho") {
  const LatticeGeometry g{Shape::square, 3, Boundary::open, 2};
  const auto sites = enumerate_sites(g);
  SparseHermitian h(2 * sites.size());
  h.finalize();
  const auto d0 = build_dirac(g, {0.0, 0.0});
  std::size_t inside = 0;
  for (const auto& s : sites) {
    double m = std::hypot(double(s.n1), double(s.n2));
    if (m == 0.0) m = 1.0;  // origin lift
    if (m <= 2.0) ++inside;
  }
  const auto l = assemble_even_localizer(h, d0, {0.5, 2.0, {0, 0}});
  CHECK(l.dim() == 2 * (2 * inside));

  CHECK_THROWS_AS(
      assemble_even_localizer(h, d0, {0.5, 100.0, {0, 0}}), config_error);
}

TEST_CASE("clean quadrants: half-signature equals sign(mu) in all four") {
  const LatticeGeometry g{Shape::disk, 12, Boundary::open, 2};
  const auto d0 = build_dirac(g, {0.0, 0.0});
  for (double mu : {0.25, -0.25})
    for (double dl : {-0.35, 0.35}) {
      const auto h = build_clean_pip({mu, dl, 0.0}, g);
      const auto l = assemble_even_localizer(h, d0, {kKappa, 9.0, {0, 0}});
      INFO("mu " << mu << " delta " << dl);
      CHECK(half_signature(l) == (mu > 0 ? 1.0 : -1.0));
    }
}

TEST_CASE("odd localizer: scalar example and chain vs winding oracle") {
  SparseComplex a(1);
  a.add(0, 0, 1.0);
  a.finalize();
  SparseHermitian d(1);
  d.add(0, 0, 1.0);
  d.finalize();
  const auto l = assemble_odd_localizer(a, d, 1.0, 1.0);
  const auto dm = l.to_dense();
  CHECK(dm(0, 0) == cplx{1.0, 0.0});
  CHECK(dm(1, 1) == cplx{-1.0, 0.0});
  CHECK(dm(1, 0) == cplx{1.0, 0.0});
  CHECK(inertia_ldl(l).signature() == 0);

  for (auto [t1, t2] : {std::pair{0.2, 1.0}, std::pair{1.0, 0.2}}) {
    const auto chain = build_chiral_chain(t1, t2, 40);
    const auto dc = build_chain_dirac(40, 19.5);
    const auto lc = assemble_odd_localizer(chain, dc, 0.15, 12.0);
    INFO("t1 " << t1 << " t2 " << t2);
    CHECK(half_signature(lc) == double(chain_winding_number(t1, t2)));
  }
}

TEST_CASE("chain dirac: centered positions with the origin lift") {
  const auto d = build_chain_dirac(4, 1.0);
  std::vector<double> diag(4, 0.0);
  for (const auto& t : d.upper()) {
    REQUIRE(t.row == t.col);
    diag[t.row] = t.value.real();
  }
  CHECK(diag[0] == -1.0);
  CHECK(diag[1] == 1.0);  // would be 0: lifted
  CHECK(diag[2] == 1.0);
  CHECK(diag[3] == 2.0);
}

TEST_CASE("check_bounds on a synthetic two-level example") {
  // H = sigma_x: g = ||H|| = 1. D0 = diag(1, 2): ||[D0, H]|| = 1.
  // kappa_max = 1/12, rho_min = 24 at kappa = 1/12.
  SparseHermitian h(2);
  h.add(1, 0, 1.0);
  h.finalize();
  SparseComplex d0(2);
  d0.add(0, 0, 1.0);
  d0.add(1, 1, 2.0);
  d0.finalize();
  const auto rep = check_bounds(h, d0, {1.0 / 12.0, 1.0, {0, 0}});
  CHECK(rep.g == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(rep.norm_H == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(rep.norm_comm == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(rep.kappa_max == doctest::Approx(1.0 / 12.0).epsilon(1e-8));
  CHECK(rep.rho_min == doctest::Approx(24.0).epsilon(1e-6));
  CHECK_FALSE(rep.rho_ok);  // rho = 1 < 24

  // kappa_ok flips across the bound (evaluated away from the knife edge)
  const auto below = check_bounds(h, d0, {(1.0 - 1e-6) / 12.0, 1.0, {0, 0}});
  CHECK(below.kappa_ok);
  const auto above = check_bounds(h, d0, {(1.0 + 1e-6) / 12.0, 1.0, {0, 0}});
  CHECK_FALSE(above.kappa_ok);

  // rho_ok flips across rho_min
  const auto wide = check_bounds(h, d0, {1.0 / 24.0, 49.0, {0, 0}});
  CHECK(wide.rho_min == doctest::Approx(48.0).epsilon(1e-6));
  CHECK(wide.rho_ok);
}

TEST_CASE("check_bounds refuses a singular H") {
  SparseHermitian h(2);
  h.add(0, 0, 1.0);
  h.finalize();  // one exact zero eigenvalue
  SparseComplex d0(2);
  d0.add(0, 0, 1.0);
  d0.add(1, 1, 2.0);
  d0.finalize();
  CHECK_THROWS_AS(check_bounds(h, d0, {0.1, 1.0, {0, 0}}), gap_closed_error);
}

TEST_CASE("atomic-limit insulator: certified regime, gap >= g/2") {
  const LatticeGeometry g{Shape::disk, 8, Boundary::open, 2};
  const auto sites = enumerate_sites(g);
  SparseHermitian h(sites.size() * 2);
  for (std::size_t s = 0; s < sites.size(); ++s) {
    h.add(2 * s, 2 * s, 1.0);
    h.add(2 * s + 1, 2 * s + 1, -1.0);
  }
  h.finalize();
  const auto d0 = build_dirac(g, {0.0, 0.0});
  const auto rep = check_bounds(h, d0, {0.3, 8.0, {0, 0}});
  CHECK(rep.g == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(std::isinf(rep.kappa_max));  // [D0, H] = 0 identically
  CHECK(rep.kappa_ok);
  CHECK(rep.rho_min == doctest::Approx(2.0 / 0.3).epsilon(1e-8));
  CHECK(rep.rho_ok);
  const auto l = assemble_even_localizer(h, d0, {0.3, 8.0, {0, 0}});
  const auto gp = spectral_gap(l, GapMethod::inverse, 1e-8);
  CHECK(gp.gap >= 0.5 - 1e-8);
  CHECK(gp.gap == doctest::Approx(1.044).epsilon(0.01));
  CHECK(half_signature(l) == 0.0);
}

TEST_CASE("default_kappa formula") {
  CHECK(default_kappa(0.25, 3.8171) ==
        doctest::Approx(0.25 / (2.0 * 3.8171)).epsilon(1e-15));
  CHECK_THROWS_AS(default_kappa(0.0, 1.0), config_error);
  CHECK_THROWS_AS(default_kappa(1.0, 0.0), config_error);
}

TEST_CASE("local marker map: constant in the bulk, containment enforced") {
  const LatticeGeometry g{Shape::disk, 12, Boundary::open, 2};
  for (double mu : {0.25, -0.25}) {
    const auto h = build_clean_pip({mu, -0.35, 0.0}, g);
    const auto mk = local_marker_map(h, g, kKappa, 6.0,
                                     {{0.0, 0.0}, {2.0, -1.0}, {-3.0, 2.0}});
    REQUIRE(mk.size() == 3);
    for (const auto& m : mk) {
      INFO("center " << m.center[0] << "," << m.center[1]);
      CHECK(m.half_sig == (mu > 0 ? 1.0 : -1.0));
    }
  }
  const auto h = build_clean_pip({0.25, -0.35, 0.0}, g);
  CHECK_THROWS_AS(local_marker_map(h, g, kKappa, 6.0, {{9.0, 0.0}}),
                  config_error);
}

TEST_CASE("recentring the torus localizer does not change the invariant") {
  const LatticeGeometry g{Shape::square, 8, Boundary::periodic, 2};
  const auto h = build_clean_pip({0.25, -0.35, 0.0}, g);
  const auto l0 = assemble_even_localizer(h, build_dirac(g, {0.0, 0.0}),
                                          {kKappa, 6.0, {0, 0}});
  const auto l1 = assemble_even_localizer(h, build_dirac(g, {1.0, 0.0}),
                                          {kKappa, 6.0, {1, 0}});
  CHECK(half_signature(l0) == half_signature(l1));
  CHECK(half_signature(l0) == 1.0);
}

TEST_CASE("kappa/rho stability: a 3x3 admissible grid gives one value") {
  const LatticeGeometry g{Shape::disk, 12, Boundary::open, 2};
  const auto h = build_clean_pip({0.25, -0.35, 0.0}, g);
  const auto d0 = build_dirac(g, {0.0, 0.0});
  for (double kappa : {0.8 * kKappa, kKappa, 1.25 * kKappa})
    for (double rho : {8.0, 9.5, 11.0}) {
      const auto l = assemble_even_localizer(h, d0, {kappa, rho, {0, 0}});
      INFO("kappa " << kappa << " rho " << rho);
      CHECK(half_signature(l) == 1.0);
    }
}
