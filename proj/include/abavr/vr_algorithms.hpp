#pragma once

#include <span>
#include <string>

#include "abavr/batch_rules.hpp"
#include "abavr/objective.hpp"
#include "abavr/run_trace.hpp"
#include "abavr/sampling.hpp"
#include "abavr/vr_config.hpp"

namespace abavr {

/// Per-epoch state of an SVRG/SPIDER-type run.
struct EpochState {
  Vector snapshot;
  /// g^s for SVRG, v_0^s for SPIDER.
  Vector anchor;
  /// Running sum of ||v||^2 / m over the epoch; becomes beta_{s+1}.
  double beta_next_accum = 0.0;
  std::size_t epoch = 0;
};

/// v = grad f_B(x) - grad f_B(snapshot) + anchor.
Vector svrg_inner_direction(const FiniteSumObjective& obj, const Vector& x,
                            const EpochState& state, std::span<const std::size_t> batch);

/// v_t = grad f_B(x_t) - grad f_B(x_prev) + v_prev.
Vector spider_inner_direction(const FiniteSumObjective& obj, const Vector& x_t,
                              const Vector& x_prev, const Vector& v_prev,
                              std::span<const std::size_t> batch);

enum class Estimator { svrg, spider };

/// Epoch loop shared by every SVRG/SPIDER-type method: draw the anchor batch
/// without replacement with a size from `sched`, then m steps with inner
/// batches of size cfg.B drawn with replacement, resampled every step.
RunTrace run_variance_reduced(const FiniteSumObjective& obj, Estimator estimator,
                              const BatchSchedule& sched, const AbaConfig& cfg,
                              const Vector& x0, SeededRng& rng, std::string name);

RunTrace run_abasvrg(const FiniteSumObjective& obj, const AbaConfig& cfg, const Vector& x0,
                     SeededRng& rng);
RunTrace run_abaspider(const FiniteSumObjective& obj, const AbaConfig& cfg, const Vector& x0,
                       SeededRng& rng);

/// SGD whose batch follows the mean squared norm of the last cfg.m
/// directions (pre-history set to alpha0). Iterations are grouped in blocks
/// of m for metric records, giving the same trace layout as the epoch methods.
RunTrace run_abasgd(const FiniteSumObjective& obj, const AbaConfig& cfg,
                    const AbaSgdOptions& opts, const Vector& x0, SeededRng& rng);

enum class BaselineKind { sgd, hsgd, svrg_fixed, spiderboost_fixed, spider_exp, spider_lin };

std::string_view to_string(BaselineKind kind);

struct BaselineParams {
  /// Exponential schedule base.
  double mu = 2.0;
  /// Linear schedule slope.
  double nu = 200.0;
  /// HSGD batch at iteration t is c_b (t + 1).
  double c_b = 10.0;
};

RunTrace run_baseline(const FiniteSumObjective& obj, BaselineKind kind, const AbaConfig& cfg,
                      const BaselineParams& params, const Vector& x0, SeededRng& rng);

}  // namespace abavr
