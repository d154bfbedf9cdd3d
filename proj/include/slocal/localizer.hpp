/// Dirac position operators, even/odd spectral localizer assembly, the
/// admissibility bounds that certify a localizer signature, and local
/// topological marker maps.
///
/// The even localizer pairs a Hamiltonian H with the diagonal Dirac operator
/// D0 = (X1 - c1) + i (X2 - c2):
///
///     L = [ -H_rho   kappa D0_rho^* ]
///         [ kappa D0_rho      H_rho ]
///
/// where _rho restricts to basis states whose D0 entry has modulus <= rho
/// (hard Dirichlet cut). Half of L's signature is the topological invariant;
/// it is certified by the bounds in BoundsReport: whenever
/// kappa <= g^3 / (12 |H| |[D, H + H]|) and rho > 2g/kappa, L is invertible
/// with min |eig| >= g/2 and the signature is independent of (kappa, rho).

#pragma once

#include "slocal/lattice.hpp"

#include <array>
#include <cstddef>
#include <vector>

namespace slocal {

struct LocalizerParams {
  double kappa = 0.05;               // tuning parameter, > 0
  double rho = 15.0;                 // truncation radius, >= 1
  std::array<double, 2> center{0.0, 0.0};
};

/// Throws config_error unless kappa > 0 and rho >= 1.
void validate(const LocalizerParams& params);

/// Diagonal operator with entry (n1 - c1) + i (n2 - c2) per site, replicated
/// over orbitals. Entries with modulus below 1e-12 are replaced by 1 so the
/// operator is always invertible (the origin fix).
SparseComplex build_dirac(const LatticeGeometry& geom,
                          std::array<double, 2> center);

/// 1D analogue for chains: diag(n - center) over n = 0..length-1, with the
/// same origin fix.
SparseHermitian build_chain_dirac(std::size_t length, double center);

/// Diagonal unitary d/|d|. Throws numerical_failure on a zero diagonal
/// entry (cannot happen for build_dirac output).
SparseComplex dirac_phase(const SparseComplex& d0);

/// Even (Chern) localizer; see the block formula above. H and D0 must share
/// one geometry. Throws config_error when rho exceeds the available
/// geometry (no basis state may lie beyond the truncation disk's reach).
SparseHermitian assemble_even_localizer(const SparseHermitian& h,
                                        const SparseComplex& d0,
                                        const LocalizerParams& params);

/// Odd (winding) localizer for a chiral block A and 1D position operator D:
///
///     L = [ kappa D_rho      A_rho^* ]
///         [ A_rho      -kappa D_rho  ]
///
/// D must be diagonal; indices with |D entry| <= rho are kept. Throws
/// config_error on dimension mismatch or a non-diagonal D.
SparseHermitian assemble_odd_localizer(const SparseComplex& a,
                                       const SparseHermitian& d, double kappa,
                                       double rho);

struct BoundsReport {
  double g = 0.0;          // invertibility gap of H (min |eig|, certified)
  double norm_H = 0.0;     // operator norm of H
  double norm_comm = 0.0;  // |[D0, H]| = |[D, H + H]|
  double kappa_max = 0.0;  // g^3 / (12 norm_H norm_comm)
  double rho_min = 0.0;    // 2 g / kappa
  bool kappa_ok = false;   // kappa <= kappa_max
  bool rho_ok = false;     // rho > rho_min (strict)
};

/// Measures g, |H| and |[D0,H]| and evaluates the admissibility bounds for
/// params. Advisory: callers may proceed with inadmissible parameters and
/// report the flags. Throws gap_closed_error when H is not invertible at
/// the measurement resolution (g cannot be certified positive).
BoundsReport check_bounds(const SparseHermitian& h, const SparseComplex& d0,
                          const LocalizerParams& params, double gap_tol = 1e-10);

/// Practical default tuning kappa = g / (2 |[D0,H]|). The rigorous
/// kappa_max forces impractically large rho; this larger value is justified
/// a posteriori whenever the localizer gap is observed open (signature
/// stability then pins the invariant). Throws config_error unless both
/// arguments are positive.
double default_kappa(double g, double norm_comm);

struct MarkerPoint {
  std::array<double, 2> center;
  double half_sig;
};

/// Half-signature of the localizer recentered at each requested point (the
/// local topological marker). Every truncation disk must fit inside the
/// geometry; a center too close to the boundary is a config_error. Gap-closed
/// markers (singular localizer) propagate gap_closed_error.
std::vector<MarkerPoint> local_marker_map(
    const SparseHermitian& h, const LatticeGeometry& geom, double kappa,
    double rho, const std::vector<std::array<double, 2>>& centers);

}  // namespace slocal
