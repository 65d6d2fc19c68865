#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "abavr/batch_rules.hpp"
#include "abavr/rl_algorithms.hpp"
#include "abavr/run_trace.hpp"
#include "abavr/sampling.hpp"

using namespace abavr;

namespace {

AbaConfig rule_cfg(double c_beta = 16, double c_eps = 16, double eps = 0.1) {
  AbaConfig cfg;
  cfg.sigma_sq = 1.0;
  cfg.c_beta = c_beta;
  cfg.c_eps = c_eps;
  cfg.eps = eps;
  return cfg;
}

}  // namespace

TEST(AdaptiveBatch, DirectMin) { EXPECT_EQ(adaptive_batch_size(4.0, rule_cfg(), 1000), 4u); }

TEST(AdaptiveBatch, ZeroBetaDisablesFirstTerm) {
  EXPECT_EQ(adaptive_batch_size(0.0, rule_cfg(), 100), 100u);
  EXPECT_EQ(adaptive_batch_size(0.0, rule_cfg(), 1000), 160u);
}

TEST(AdaptiveBatch, ClampsToOne) { EXPECT_EQ(adaptive_batch_size(1e9, rule_cfg(), 1000), 1u); }

TEST(AdaptiveBatch, CeilingOfFractionalValues) {
  EXPECT_EQ(adaptive_batch_size(3.0, rule_cfg(), 1000), 6u);  // 16 / 3 = 5.33
  EXPECT_EQ(fixed_anchor_batch(rule_cfg(16, 16, 0.3), 1000), 54u);  // 53.33
  EXPECT_EQ(fixed_anchor_batch(rule_cfg(), 100), 100u);
}

TEST(AdaptiveBatch, MonotoneInBetaAndCBeta) {
  SeededRng rng(1);
  for (int r = 0; r < 2000; ++r) {
    const double b1 = std::exp(rng.normal() * 5);
    const double b2 = b1 * (1.0 + rng.uniform() * 10);
    const auto cfg = rule_cfg(0.5 + 30 * rng.uniform(), 0.5 + 30 * rng.uniform(),
                              std::exp(rng.normal() * 3));
    const std::size_t n = 1 + rng.uniform_index(5000);
    EXPECT_GE(adaptive_batch_size(b1, cfg, n), adaptive_batch_size(b2, cfg, n));
    auto bigger = cfg;
    bigger.c_beta *= 1.0 + rng.uniform();
    EXPECT_LE(adaptive_batch_size(b1, cfg, n), adaptive_batch_size(b1, bigger, n));
    const std::size_t N = adaptive_batch_size(b1, cfg, n);
    EXPECT_GE(N, 1u);
    EXPECT_LE(N, fixed_anchor_batch(cfg, n));
  }
}

TEST(AbaSgdBatch, WindowMeanRule) {
  const std::vector<double> window{0.25, 0.75};  // mean 0.5
  EXPECT_EQ(abasgd_batch_size(window, 1.0, 0.01, AbaSgdOptions{}, 1000), 4u);
  EXPECT_EQ(abasgd_batch_size(window, 1.0, 0.01, AbaSgdOptions{}, 4), 4u);
}

TEST(AbaSgdBatch, ZeroWindowFallsBackToAccuracyTerm) {
  const std::vector<double> zeros(5, 0.0);
  EXPECT_EQ(abasgd_batch_size(zeros, 1.0, 0.01, AbaSgdOptions{}, 100000), 2400u);
  EXPECT_EQ(abasgd_batch_size(zeros, 1.0, 0.01, AbaSgdOptions{}, 1000), 1000u);
}

TEST(Schedules, ExponentialAndLinear) {
  const auto cfg = rule_cfg();
  EXPECT_EQ(anchor_batch_size(schedule::Exponential{2.0}, 5, 0.0, cfg, 1000), 32u);
  EXPECT_EQ(anchor_batch_size(schedule::Exponential{2.0}, 20, 0.0, cfg, 1000), 1000u);
  EXPECT_EQ(anchor_batch_size(schedule::Linear{200.0}, 3, 0.0, cfg, 1000), 800u);
  EXPECT_EQ(anchor_batch_size(schedule::Linear{200.0}, 3, 0.0, cfg, 500), 500u);
  EXPECT_EQ(anchor_batch_size(schedule::Fixed{1000}, 7, 0.0, cfg, 1000), 1000u);
  EXPECT_EQ(anchor_batch_size(schedule::Adaptive{}, 1, 4.0, cfg, 1000), 4u);
}

TEST(RlBatch, FirstEpochHistoryZero) {
  RlAbaConfig cfg;
  cfg.alpha_sigma_sq = 1.0;
  cfg.eps = 0.01;
  cfg.N_max = 100;
  const std::vector<double> history(cfg.m, 0.0);
  EXPECT_EQ(rl_adaptive_batch_size(history, cfg), 100u);
}

TEST(RlBatch, DirectFormula) {
  RlAbaConfig cfg;
  cfg.alpha_sigma_sq = 48;
  cfg.beta = 6;
  cfg.m = 2;
  cfg.eps = 0.01;
  cfg.N_max = 1000;
  EXPECT_EQ(rl_adaptive_batch_size(std::vector<double>{1, 1}, cfg), 8u);
}

TEST(RlBatch, ZeroBetaIsVanillaBatch) {
  RlAbaConfig cfg;
  cfg.beta = 0;
  cfg.alpha_sigma_sq = 1;
  cfg.eps = 0.03;
  cfg.N_max = 1000;
  const std::vector<double> history(cfg.m, 123.0);
  EXPECT_EQ(rl_adaptive_batch_size(history, cfg), 34u);
  cfg.N_max = 20;
  EXPECT_EQ(rl_adaptive_batch_size(history, cfg), 20u);
}

TEST(RlBatch, ClampsToOneAndChecksHistoryLength) {
  RlAbaConfig cfg;
  const std::vector<double> huge(cfg.m, 1e12);
  EXPECT_EQ(rl_adaptive_batch_size(huge, cfg), 1u);
  EXPECT_THROW(rl_adaptive_batch_size(std::vector<double>(cfg.m + 1, 0.0), cfg),
               std::invalid_argument);
}

TEST(Sfo, OneEpochBothModes) {
  for (auto [mode, expected] : {std::pair{SfoMode::samples, 140u},
                                std::pair{SfoMode::gradient_evals, 180u}}) {
    SfoCounter c(mode);
    c.add(SfoEvent::outer(100));
    for (int t = 0; t < 10; ++t) c.add(SfoEvent::inner(4));
    EXPECT_EQ(c.total(), expected);
  }
  EXPECT_EQ(sfo_increment(SfoEvent::plain(7), SfoMode::gradient_evals), 7u);
}

TEST(Sfo, ThresholdLookup) {
  RunTrace t;
  TraceRecord a{.iter = 0, .boundary = true, .sfo = 0, .grad_norm_sq = 1.0};
  TraceRecord b{.iter = 1, .sfo = 50};
  TraceRecord c{.iter = 2, .sfo = 90, .grad_norm_sq = 0.01};
  t.records = {a, b, c};
  EXPECT_EQ(t.sfo_at_threshold(0.5), 90u);
  EXPECT_EQ(t.sfo_at_threshold(2.0), 0u);
  EXPECT_FALSE(t.sfo_at_threshold(0.001).has_value());
  EXPECT_EQ(t.boundary_count(), 1u);
}
