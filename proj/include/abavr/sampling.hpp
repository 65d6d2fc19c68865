#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace abavr {

using IndexList = std::vector<std::size_t>;

/// Deterministic random stream. Sub-streams are derived by hashing the root
/// seed with caller-chosen ids, so a (seed, run, epoch) triple always maps to
/// the same stream regardless of how much of the parent has been consumed.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed);

  std::uint64_t seed() const noexcept { return seed_; }

  SeededRng substream(std::uint64_t id_a, std::uint64_t id_b = 0) const;

  /// Uniform on {0, ..., n-1}; n must be positive.
  std::size_t uniform_index(std::size_t n);
  /// Uniform on [0, 1).
  double uniform();
  double normal();

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

/// splitmix64 finalizer; used for seed derivation.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

/// k distinct indices from [0, n), uniformly over k-subsets, in draw order.
/// Partial Fisher-Yates: a dense permutation when k is a sizeable fraction
/// of n, otherwise a sparse swap table so memory stays O(k).
IndexList sample_without_replacement(std::size_t n, std::size_t k, SeededRng& rng);

/// k i.i.d. uniform indices from [0, n).
IndexList sample_with_replacement(std::size_t n, std::size_t k, SeededRng& rng);

}  // namespace abavr
