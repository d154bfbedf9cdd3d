/// Shared basic types and error taxonomy.
///
/// Every failure the toolkit can signal is one of three exception families:
///   - config_error:       invalid user input / violated preconditions on
///                         requests (CLI maps these to exit code 2)
///   - numerical_failure:  a computation could not be completed reliably
///                         (non-convergence, non-finite data, breakdown;
///                         CLI maps these to exit code 3)
///   - gap_closed_error:   a half-signature was requested for a matrix that
///                         is singular at tolerance (n_zero > 0); a subclass
///                         of numerical_failure because it signals the regime
///                         where the invariant is not defined.
#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace slocal {

using cplx = std::complex<double>;

struct config_error : std::runtime_error {
  explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct numerical_failure : std::runtime_error {
  explicit numerical_failure(const std::string& msg) : std::runtime_error(msg) {}
};

struct gap_closed_error : numerical_failure {
  explicit gap_closed_error(const std::string& msg) : numerical_failure(msg) {}
};

/// Pin the BLAS/LAPACK backend to one thread. The toolkit owns all
/// parallelism (worker pool with deterministic reduction); letting the
/// backend spawn its own threads on top would oversubscribe and break the
/// reproducibility story. Call once at program start, before any BLAS call.
void pin_blas_single_threaded();

}  // namespace slocal
