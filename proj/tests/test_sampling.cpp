#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>

#include "abavr/sampling.hpp"

using namespace abavr;

TEST(Sampling, WithoutReplacementFullPopulation) {
  SeededRng rng(1);
  auto idx = sample_without_replacement(5, 5, rng);
  std::sort(idx.begin(), idx.end());
  EXPECT_EQ(idx, (IndexList{0, 1, 2, 3, 4}));
}

TEST(Sampling, WithoutReplacementSingletonFrequencies) {
  SeededRng rng(2);
  std::array<int, 5> counts{};
  const int draws = 100000;
  for (int r = 0; r < draws; ++r) ++counts[sample_without_replacement(5, 1, rng)[0]];
  for (int c : counts) EXPECT_NEAR(c / double(draws), 0.2, 0.01);
}

TEST(Sampling, WithoutReplacementPairsEquiprobable) {
  SeededRng rng(3);
  std::map<std::pair<std::size_t, std::size_t>, int> counts;
  const int draws = 100000;
  for (int r = 0; r < draws; ++r) {
    auto idx = sample_without_replacement(3, 2, rng);
    ASSERT_NE(idx[0], idx[1]);
    counts[{std::min(idx[0], idx[1]), std::max(idx[0], idx[1])}]++;
  }
  ASSERT_EQ(counts.size(), 3u);
  const double p = 1.0 / 3.0;
  const double sd = std::sqrt(draws * p * (1 - p));
  for (const auto& [pair, c] : counts) EXPECT_LE(std::abs(c - draws * p), 3 * sd);
}

TEST(Sampling, WithoutReplacementHasNoDuplicates) {
  SeededRng rng(4);
  for (std::size_t n : {10u, 1000u, 100000u}) {
    for (std::size_t k : {1u, 7u, 10u}) {
      auto idx = sample_without_replacement(n, k, rng);
      ASSERT_EQ(idx.size(), k);
      std::set<std::size_t> uniq(idx.begin(), idx.end());
      EXPECT_EQ(uniq.size(), k);
      for (auto i : idx) EXPECT_LT(i, n);
    }
  }
  // Sparse path: k much smaller than n.
  auto idx = sample_without_replacement(1'000'000, 500, rng);
  EXPECT_EQ(std::set<std::size_t>(idx.begin(), idx.end()).size(), 500u);
}

TEST(Sampling, WithoutReplacementRejectsOversizedSample) {
  SeededRng rng(5);
  EXPECT_THROW(sample_without_replacement(3, 4, rng), std::invalid_argument);
}

TEST(Sampling, WithReplacementSinglePopulation) {
  SeededRng rng(6);
  EXPECT_EQ(sample_with_replacement(1, 4, rng), (IndexList{0, 0, 0, 0}));
}

TEST(Sampling, WithReplacementFrequencies) {
  SeededRng rng(7);
  const auto idx = sample_with_replacement(2, 100000, rng);
  const double ones = static_cast<double>(std::count(idx.begin(), idx.end(), 1u));
  EXPECT_NEAR(ones / idx.size(), 0.5, 0.01);
}

TEST(Sampling, WithReplacementRange) {
  SeededRng rng(8);
  for (int r = 0; r < 1000; ++r) {
    for (auto i : sample_with_replacement(10, 3, rng)) EXPECT_LT(i, 10u);
  }
}

TEST(Sampling, WithReplacementRejectsEmptySample) {
  SeededRng rng(9);
  EXPECT_THROW(sample_with_replacement(10, 0, rng), std::invalid_argument);
}

TEST(Sampling, EqualSeedsGiveEqualStreams) {
  SeededRng a(42), b(42);
  for (int r = 0; r < 100; ++r) {
    EXPECT_EQ(sample_without_replacement(1000, 13, a), sample_without_replacement(1000, 13, b));
    EXPECT_EQ(sample_with_replacement(1000, 13, a), sample_with_replacement(1000, 13, b));
  }
}

TEST(Sampling, SubstreamsIgnoreParentConsumption) {
  SeededRng parent(11);
  const auto before = parent.substream(3, 4);
  for (int r = 0; r < 50; ++r) parent.uniform();
  auto s1 = before;
  auto s2 = parent.substream(3, 4);
  EXPECT_EQ(s1.engine()(), s2.engine()());
  auto other = parent.substream(3, 5);
  auto s3 = parent.substream(3, 4);
  EXPECT_NE(other.engine()(), s3.engine()());
}

TEST(Sampling, UniformInUnitInterval) {
  SeededRng rng(12);
  for (int r = 0; r < 10000; ++r) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}
