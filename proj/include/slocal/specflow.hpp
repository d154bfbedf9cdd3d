/// Spectral flow for paths of finite Hermitian matrices, the real-space
/// Chern-number oracle built from the Fermi projection, and the two
/// path-gap certificates (straight-line localizer path, decoupling path)
/// that justify signature-based invariants numerically.
///
/// In finite dimensions the spectral flow of a path with invertible
/// endpoints is half the signature difference of the endpoints; the sampled
/// version evaluates every intermediate sample so singular interior points
/// are detected (and stepped around by adaptive refinement) rather than
/// silently crossed.

#pragma once

#include "slocal/dense.hpp"
#include "slocal/inertia.hpp"
#include "slocal/lattice.hpp"

#include <cstddef>
#include <functional>
#include <vector>

namespace slocal {

// ---------------------------------------------------------------------------
// Spectral flow

struct MatrixPath {
  /// t in [0,1] -> Hermitian matrix of fixed dimension.
  std::function<SparseHermitian(double)> evaluator;
  /// Number of evaluation points including both endpoints; >= 2.
  std::size_t samples = 2;
};

/// Flow of the straight line from T0 to T1: (Sig(T1) - Sig(T0)) / 2.
/// Throws gap_closed_error when an endpoint is singular at its pivot
/// tolerance (the flow is then ill-defined).
long long spectral_flow_line(const SparseHermitian& t0,
                             const SparseHermitian& t1);

/// Sampled flow: sum over consecutive samples of half the signature
/// difference. Interior samples that land on a singular matrix are nudged
/// by up to 12 successive halvings of the sample spacing (both directions);
/// if every nudge stays singular the flow is ambiguous and a
/// numerical_failure is thrown. Endpoints must be invertible.
long long spectral_flow_path(const MatrixPath& path);

// ---------------------------------------------------------------------------
// Fermi projection and the real-space Chern number

enum class FermiMode {
  strict,   // any eigenvalue within tol of 0 is an error
  mobility  // strictly negative eigenvalues are counted, however small
};

/// Spectral projector P onto the negative eigenspace of H. Idempotent and
/// Hermitian by construction (exact dense eigendecomposition): the built P
/// satisfies |P^2 - P| <= 1e-10 and P = P^H.
struct FermiProjection {
  DenseMatrix p;
};

FermiProjection fermi_projection(const SparseHermitian& h,
                                 FermiMode mode = FermiMode::strict,
                                 double tol = 1e-10);

struct ChernResult {
  double value;          // -2*pi*i * mean site trace, real part
  double imag_residual;  // |imaginary part| of the same mean (must be tiny)
};

/// Real-space Chern number: -2*pi*i times the region average over sites n of
/// Tr <n| P [[X1,P],[X2,P]] |n> (trace over orbitals). On periodic geometry
/// the position differences entering [X,P] are minimum-image. The imaginary
/// residual must come out below 1e-8 (numerical_failure otherwise). For open
/// boundaries every region site must keep at least `margin` distance from
/// the boundary (config_error otherwise; periodic geometry has no boundary).
ChernResult chern_real_space(const FermiProjection& p,
                             const LatticeGeometry& geom,
                             const std::vector<Site>& region,
                             double margin = 1.0);

// ---------------------------------------------------------------------------
// Path-gap certificates

/// Minimal spectral gap along the straight line t -> diag(-H, H) + t*kappa*D,
/// D = [[0, D0*],[D0, 0]], t in [0,1] over `samples` points (no truncation
/// beyond the geometry H and D0 are built on). A strictly positive return
/// certifies zero flow along the switch-on path; 0.0 means the gap closed.
double localizer_path_gap(const SparseHermitian& h, const SparseComplex& d0,
                          double kappa, std::size_t samples,
                          GapMethod method = GapMethod::inverse);

struct DecouplingGap {
  double min_path_gap;    // min gap along the coupling switch-off
  double outer_block_gap; // gap of the decoupled annulus block at t=1
};

/// Gap along the path that scales the coupling between the rho_inner
/// truncation block and its complement (within the rho_outer truncation) by
/// (1-t). The endpoint t=1 is the direct sum of the inner localizer and the
/// annulus block; its annulus gap is reported separately (the mechanism
/// bound is outer_block_gap >= kappa*rho_inner/sqrt(2) up to numerical
/// error). Returns 0 fields when the corresponding gap closes.
DecouplingGap decoupling_path_gap(const SparseHermitian& h,
                                  const SparseComplex& d0, double kappa,
                                  double rho_inner, double rho_outer,
                                  std::size_t samples = 9,
                                  GapMethod method = GapMethod::inverse);

/// Returns A unchanged when min |eig(A)| >= epsilon*1e-3; otherwise adds
/// (epsilon/2) times the projector onto the near-kernel eigenspace, making
/// the result invertible with |A - result| <= epsilon and perturbation rank
/// equal to the near-kernel dimension.
SparseHermitian perturb_to_invertible(const SparseHermitian& a,
                                      double epsilon);

}  // namespace slocal
