/// Disorder-ensemble sweeps, spectra exports, and phase-diagram statistics.
///
/// One sweep point works on a pair of geometries built from the same square
/// radius: the localizer (and its gap) is evaluated on the open-boundary
/// sample — position truncation needs a genuine edge — while the gap of
/// H(λ) is read off the periodic companion, whose spectrum shows the bulk
/// gap instead of in-gap edge modes. Each (λ-index, sample-index) pair gets
/// its own derived seed, so the ensemble is reproducible and extending the
/// grid or the sample count never changes earlier realizations.
#pragma once

#include "slocal/common.hpp"
#include "slocal/lattice.hpp"
#include "slocal/models.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace slocal {

enum class KappaPolicy {
  automatic,  // bulk gap of the clean periodic model over twice the
              // commutator norm of the clean open model
  fixed,      // kappa_value as given
  theorem1,   // certified bound g^3 / (12 ||H|| ||[D0,H]||), clean open model
};

struct SweepConfig {
  double mu = 0.25;
  double delta = -0.35;
  std::vector<double> lambda_grid;  // nonempty, strictly increasing
  std::size_t samples = 20;
  std::uint64_t base_seed = 1;
  double rho = 15.0;
  KappaPolicy kappa_policy = KappaPolicy::automatic;
  double kappa_value = 0.0;  // read only when kappa_policy == fixed
  int radius = 15;           // square geometry radius (open + periodic pair)
  std::size_t dense_limit = 4000;
  std::size_t n_threads = 0;  // 0 = hardware concurrency
};

/// Throws config_error on an invalid configuration (empty or non-increasing
/// grid, zero samples, rho outside the open geometry, bad kappa).
void validate(const SweepConfig& config);

/// The default desk-scale grid: 0 to 8 in steps of 0.25 (33 points).
std::vector<double> default_lambda_grid();

/// Ensemble statistics for one disorder strength.
struct SweepRow {
  double lambda = 0.0;
  /// Mean half-signature over usable samples (localizer invertible, no
  /// numerical failure); NaN if no sample was usable.
  double mean_half_sig = 0.0;
  /// (half-signature value, count) over usable samples, sorted by value.
  std::vector<std::pair<double, std::size_t>> half_sig_histogram;
  double min_gap_L = 0.0;
  double mean_gap_L = 0.0;
  double min_gap_H = 0.0;
  double mean_gap_H = 0.0;
  std::size_t n_gap_closed_L = 0;  // localizer singular at tolerance
  std::size_t n_gap_closed_H = 0;  // periodic H singular at tolerance
  std::size_t n_failed = 0;        // numerical failures, excluded everywhere
  std::size_t samples = 0;         // as configured
};

/// The kappa actually used for a config (resolves the policy; for automatic
/// and theorem1 this measures the clean model at the configured radius).
double resolve_kappa(const SweepConfig& config);

/// Full sweep over config.lambda_grid. Deterministic given the config;
/// realizations and lambda points run on a worker pool with an ordered
/// reduction. Per-sample numerical failures are counted in the row, not
/// fatal. Gap-closed localizer samples contribute gap 0 to the gap columns
/// but are excluded from mean_half_sig and the histogram.
std::vector<SweepRow> run_sweep(const SweepConfig& config);

/// CSV rendering of a sweep (LF endings, 12 significant digits):
/// lambda,mean_half_sig,min_gap_L,mean_gap_L,min_gap_H,mean_gap_H,
/// n_closed_L,n_closed_H,samples
std::string render_sweep_csv(const std::vector<SweepRow>& rows);

/// Eigenvalues of op closest to zero (all of them when k_lowest is 0 or
/// exceeds the dimension), sorted ascending by value. Dense
/// diagonalization; dims above dense_limit are a config_error.
std::vector<double> export_spectrum(const SparseHermitian& op,
                                    std::size_t k_lowest,
                                    std::size_t dense_limit);

/// Five-number summaries of the two gap distributions at one disorder
/// strength, plus the modal half-signature — the mobility-gap diagnostic:
/// H's gap collapsing while the localizer stays gapped with a stable
/// invariant.
struct MobilityReport {
  std::array<double, 5> gap_H_quantiles{};         // min, q1, median, q3, max
  std::array<double, 5> localizer_gap_quantiles{};  // same order
  double half_sig_mode = 0.0;  // most frequent; smallest value wins ties
  std::size_t n_gap_closed_L = 0;
  std::size_t n_gap_closed_H = 0;
  std::size_t n_failed = 0;
  std::size_t samples = 0;
};

MobilityReport mobility_probe(const SweepConfig& config, double lambda);

}  // namespace slocal
