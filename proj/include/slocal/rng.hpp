/// Deterministic random number generation.
///
/// All randomness in the toolkit flows through splitmix64, a fixed, named,
/// public-domain 64-bit generator (Steele, Lea & Flood 2014; the reference
/// implementation is the one in Java's SplittableRandom). Pinning the
/// algorithm — rather than std::mt19937 whose distribution adapters are
/// implementation-defined — makes disorder realizations and golden files
/// bit-reproducible across platforms and standard libraries.
///
/// Substream scheme:
///   - per-site disorder value:  v(seed, i) depends only on (seed, i), so a
///     realization can be regenerated value-by-value in any order;
///   - per-sample seeds:         mix(base, lambda_idx, sample_idx) is a
///     pairwise-distinct function of its arguments, and adding more samples
///     or lambda points never changes earlier streams.
#pragma once

#include <cstdint>

namespace slocal::rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

/// One splitmix64 output step for the given state value.
inline std::uint64_t splitmix64(std::uint64_t x) {
  std::uint64_t z = x + kGolden;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Map the top 53 bits of a word to a double in [0, 1).
inline double u64_to_unit(std::uint64_t k) {
  return static_cast<double>(k >> 11) * (1.0 / 9007199254740992.0);  // 2^-53
}

/// Uniform value in [-1/2, 1/2] for site index i under the given seed.
/// Independent of how many other sites are sampled.
inline double site_uniform(std::uint64_t seed, std::uint64_t i) {
  const std::uint64_t k = splitmix64(seed ^ splitmix64(kGolden * (i + 1)));
  return u64_to_unit(k) - 0.5;
}

/// Seed for (lambda index, sample index) derived from a base seed.
inline std::uint64_t sample_seed(std::uint64_t base, std::uint64_t lambda_idx,
                                 std::uint64_t sample_idx) {
  return splitmix64(base ^ splitmix64((lambda_idx << 32) | sample_idx));
}

}  // namespace slocal::rng
