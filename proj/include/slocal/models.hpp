/// Physical Hamiltonians: the clean p+ip Bogoliubov–de Gennes model, on-site
/// disorder, the dirty Hamiltonian H(λ) = H(0) + λV, and a two-band chiral
/// chain used as the odd-pairing testbed.
///
/// BdG layout: orbitals (particle, hole) innermost, so site s occupies global
/// rows 2s and 2s+1. With h the spinless hopping matrix and B the pairing
/// block, the assembled operator is
///     H = [[ h − μ,  B ], [ B*, −(h − μ)ᵀ ]]      (in block language)
///     B = δ [ (S₁ − S₁ᵀ) − i (S₂ − S₂ᵀ) ]
/// which satisfies particle-hole symmetry σ₁ conj(H) σ₁ = −H exactly on the
/// stored entries. Disorder enters as λ v_n diag(1, −1) per site with v_n
/// i.i.d. uniform on [−1/2, 1/2].

#pragma once

#include "slocal/common.hpp"
#include "slocal/lattice.hpp"

#include <cstdint>
#include <vector>

namespace slocal {

struct ModelParams {
  double mu = 0.0;      // chemical potential
  double delta = 0.0;   // pairing strength
  double lambda = 0.0;  // disorder coupling, >= 0
};

struct DisorderRealization {
  std::uint64_t seed = 0;
  std::vector<double> values;  // one per site, in [-1/2, 1/2]
};

/// Clean BdG Hamiltonian on the given geometry (orbitals must equal 2).
/// Open boundaries drop hops leaving the region; periodic boundaries wrap
/// (square shape only).
SparseHermitian build_clean_pip(const ModelParams& params,
                                const LatticeGeometry& geom);

/// Per-site uniform disorder from the pinned 64-bit generator; the same
/// (seed, geometry) pair reproduces values bit-for-bit.
DisorderRealization sample_disorder(const LatticeGeometry& geom,
                                    std::uint64_t seed);

/// H(λ) = H(0) + λ Σ_n v_n diag(1, −1) ⊗ |n⟩⟨n|.
SparseHermitian build_dirty(const ModelParams& params,
                            const LatticeGeometry& geom,
                            const DisorderRealization& realization);

/// Off-diagonal block A = t1·1 + t2·S of a chiral two-band chain with open
/// ends, where S|n⟩ = |n+1⟩. A is lower bidiagonal: A[n][n] = t1,
/// A[n+1][n] = t2.
SparseComplex build_chiral_chain(double t1, double t2, int length);

/// Winding number of the chain symbol a(k) = t1 + t2·e^{ik} around zero,
/// counted counterclockwise on a uniform k-grid. Independent reference for
/// the odd-localizer route. Requires |t1| ≠ |t2| (otherwise the symbol
/// touches the origin and the winding is undefined).
int chain_winding_number(double t1, double t2, int grid_points = 4096);

}  // namespace slocal
