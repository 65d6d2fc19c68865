#include "abavr/sampling.hpp"

#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace abavr {

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9E3779B97F4A7C15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

SeededRng::SeededRng(std::uint64_t seed) : seed_(seed), engine_(mix_seed(seed, 0)) {}

SeededRng SeededRng::substream(std::uint64_t id_a, std::uint64_t id_b) const {
  return SeededRng(mix_seed(mix_seed(seed_, id_a + 1), id_b + 1));
}

std::size_t SeededRng::uniform_index(std::size_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index: empty population");
  std::uniform_int_distribution<std::size_t> dist(0, n - 1);
  return dist(engine_);
}

double SeededRng::uniform() {
  // 53 random mantissa bits.
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double SeededRng::normal() {
  std::normal_distribution<double> dist(0.0, 1.0);
  return dist(engine_);
}

IndexList sample_without_replacement(std::size_t n, std::size_t k, SeededRng& rng) {
  if (k == 0 || k > n) {
    throw std::invalid_argument("sample_without_replacement: need 1 <= k <= n, got k=" +
                                std::to_string(k) + ", n=" + std::to_string(n));
  }
  IndexList out(k);
  if (4 * k >= n) {
    IndexList perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + rng.uniform_index(n - i);
      std::swap(perm[i], perm[j]);
      out[i] = perm[i];
    }
    return out;
  }
  // Sparse Fisher-Yates: only displaced slots are stored.
  std::unordered_map<std::size_t, std::size_t> displaced;
  displaced.reserve(2 * k);
  auto slot = [&](std::size_t i) {
    auto it = displaced.find(i);
    return it == displaced.end() ? i : it->second;
  };
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + rng.uniform_index(n - i);
    const std::size_t vi = slot(i);
    const std::size_t vj = slot(j);
    displaced[j] = vi;
    out[i] = vj;
  }
  return out;
}

IndexList sample_with_replacement(std::size_t n, std::size_t k, SeededRng& rng) {
  if (k == 0) throw std::invalid_argument("sample_with_replacement: k must be >= 1");
  if (n == 0) throw std::invalid_argument("sample_with_replacement: n must be >= 1");
  IndexList out(k);
  for (auto& idx : out) idx = rng.uniform_index(n);
  return out;
}

}  // namespace abavr
