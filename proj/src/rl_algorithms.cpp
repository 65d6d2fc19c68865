#include "abavr/rl_algorithms.hpp"

#include <cmath>
#include <numeric>

#include "abavr/batch_rules.hpp"

namespace abavr {

void RlAbaConfig::validate() const {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("RlAbaConfig: " + what);
  };
  if (!std::isfinite(alpha_sigma_sq) || alpha_sigma_sq <= 0.0) fail("alpha_sigma_sq must be > 0");
  if (!std::isfinite(beta) || beta < 0.0) fail("beta must be >= 0");
  if (!std::isfinite(eps) || eps <= 0.0) fail("eps must be > 0");
  if (m < 1) fail("m must be >= 1");
  if (B < 1) fail("B must be >= 1");
  if (!std::isfinite(eta) || eta <= 0.0) fail("eta must be > 0");
  if (N_max < 1) fail("N_max must be >= 1");
  if (max_epochs < 1) fail("max_epochs must be >= 1");
  if (stop_grad_norm_sq && !(*stop_grad_norm_sq >= 0.0)) fail("stop_grad_norm_sq must be >= 0");
}

std::size_t rl_adaptive_batch_size(std::span<const double> history, const RlAbaConfig& cfg) {
  if (history.size() != cfg.m) {
    throw std::invalid_argument("rl_adaptive_batch_size: history has " +
                                std::to_string(history.size()) + " entries, expected m = " +
                                std::to_string(cfg.m));
  }
  const double total = std::accumulate(history.begin(), history.end(), 0.0);
  const double denom = cfg.beta / static_cast<double>(cfg.m) * total + cfg.eps;
  return ceil_clamp(cfg.alpha_sigma_sq / denom, cfg.N_max);
}

namespace detail {

namespace {
constexpr std::uint64_t kOutputStream = 0x6f7574;
}

RlRunMonitor::RlRunMonitor(const RlAbaConfig& cfg, const PolicyMetric& metric, std::size_t dim,
                           const Vector& theta0, SeededRng& rng, std::string name)
    : cfg_(cfg), metric_(metric), picker_(rng.substream(kOutputStream)),
      start_(std::chrono::steady_clock::now()) {
  cfg.validate();
  if (static_cast<std::size_t>(theta0.size()) != dim) {
    throw std::invalid_argument("theta0 dimension " + std::to_string(theta0.size()) +
                                " does not match policy dimension " + std::to_string(dim));
  }
  if (!theta0.allFinite()) throw std::invalid_argument("theta0 is not finite");
  trace_.algorithm = std::move(name);
  trace_.seed = rng.seed();
  if (metric_) trace_.initial_loss = metric_(theta0).J;
  chosen_ = theta0;
}

bool RlRunMonitor::record(TraceRecord rec, const Vector& theta, bool measure, double estimate) {
  rec.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  bool keep_going = true;
  if (measure && metric_) {
    const auto value = metric_(theta);
    rec.loss = value.J;
    rec.grad_norm_sq = value.grad_norm_sq;
    if (cfg_.stop_grad_norm_sq && rec.grad_norm_sq <= *cfg_.stop_grad_norm_sq) {
      trace_.status = RunStatus::reached_target;
      keep_going = false;
    }
  } else if (measure) {
    rec.loss = estimate;
  }
  trace_.records.push_back(rec);
  return keep_going;
}

void RlRunMonitor::offer(const Vector& theta) {
  if (cfg_.output_mode != OutputMode::uniform_random_iterate) return;
  ++offered_;
  if (picker_.uniform_index(offered_) == 0) chosen_ = theta;
}

bool RlRunMonitor::step_ok(const Vector& theta, std::size_t iter) {
  if (theta.allFinite()) return true;
  trace_.status = RunStatus::diverged;
  trace_.diagnostic = "non-finite policy parameters at iteration " + std::to_string(iter);
  return false;
}

RunTrace RlRunMonitor::finish(const Vector& theta, std::uint64_t total) {
  trace_.total_sfo = total;
  trace_.final_iterate = theta;
  trace_.output_iterate = cfg_.output_mode == OutputMode::last ? theta : chosen_;
  if (metric_ && theta.allFinite()) {
    const auto value = metric_(theta);
    trace_.final_loss = value.J;
    trace_.final_grad_norm_sq = value.grad_norm_sq;
  }
  if (metric_ && trace_.output_iterate.allFinite()) {
    const auto value = metric_(trace_.output_iterate);
    trace_.output_loss = value.J;
    trace_.output_grad_norm_sq = value.grad_norm_sq;
  }
  return std::move(trace_);
}

}  // namespace detail

}  // namespace abavr
