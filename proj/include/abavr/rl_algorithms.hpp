#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "abavr/objective.hpp"
#include "abavr/run_trace.hpp"
#include "abavr/sampling.hpp"
#include "abavr/trajectory.hpp"
#include "abavr/vr_algorithms.hpp"
#include "abavr/vr_config.hpp"

namespace abavr {

struct RlAbaConfig {
  /// alpha * sigma^2, tuned as one product.
  double alpha_sigma_sq = 1.0;
  double beta = 1000.0;
  double eps = 0.01;
  std::size_t m = 10;
  std::size_t B = 20;
  double eta = 0.1;
  std::size_t N_max = 100;
  GradKind grad_kind = GradKind::gpomdp;
  std::size_t max_epochs = 50;
  OutputMode output_mode = OutputMode::last;
  /// `samples` counts simulated trajectories; `gradient_evals` counts
  /// trajectory gradients (two per inner trajectory).
  SfoMode sto_mode = SfoMode::samples;
  MetricCadence cadence = MetricCadence::epoch;
  std::optional<double> stop_grad_norm_sq;
  /// Smoothness and variance constants (G, M, L_g, Q, ...) used by
  /// theory presets only.
  std::map<std::string, double> theory_constants;

  void validate() const;
};

/// N = clamp(ceil(alpha sigma^2 / ((beta / m) sum(history) + eps)), 1, N_max).
/// `history` holds the m squared direction norms of the preceding epoch.
std::size_t rl_adaptive_batch_size(std::span<const double> history, const RlAbaConfig& cfg);

/// Exact (or trusted) J(theta) and ||grad J(theta)||^2 for metric records.
struct PolicyMetricValue {
  double J;
  double grad_norm_sq;
};
using PolicyMetric = std::function<PolicyMetricValue(const Vector&)>;

namespace detail {

/// Records, stopping rule and output iterate selection for the policy
/// gradient loop.
class RlRunMonitor {
 public:
  RlRunMonitor(const RlAbaConfig& cfg, const PolicyMetric& metric, std::size_t dim,
               const Vector& theta0, SeededRng& rng, std::string name);

  /// `estimate` stands in for J when no metric is available.
  bool record(TraceRecord rec, const Vector& theta, bool measure, double estimate);
  void offer(const Vector& theta);
  bool step_ok(const Vector& theta, std::size_t iter);
  RunTrace finish(const Vector& theta, std::uint64_t total);
  bool measure_inner() const { return cfg_.cadence == MetricCadence::iteration; }

 private:
  const RlAbaConfig& cfg_;
  const PolicyMetric& metric_;
  SeededRng picker_;
  std::chrono::steady_clock::time_point start_;
  RunTrace trace_;
  Vector chosen_;
  std::size_t offered_ = 0;
};

}  // namespace detail

/// Shared loop of Algorithms 3 and 4. Every m-th iteration draws an anchor
/// batch of N trajectories (N from the previous epoch's direction norms);
/// the other iterations draw B trajectories at the current parameters and
/// correct them with importance weights towards the snapshot (svrg) or the
/// previous iterate (spider). Updates ascend: theta += eta v.
template <Environment E, PolicyFor<E> P>
RunTrace run_policy_gradient(const E& env, const P& policy, Estimator estimator,
                             const RlAbaConfig& cfg, const Vector& theta0, SeededRng& rng,
                             std::string name, const PolicyMetric& metric = {},
                             const Baseline<typename E::State, typename E::Action>& baseline = {}) {
  detail::RlRunMonitor monitor(cfg, metric, policy.dim(), theta0, rng, std::move(name));
  SfoCounter sto(cfg.sto_mode);
  const auto d = static_cast<Eigen::Index>(policy.dim());

  std::vector<double> history(cfg.m, 0.0);
  std::vector<double> current;
  current.reserve(cfg.m);
  Vector theta = theta0;
  Vector theta_prev = theta0;
  Vector v = Vector::Zero(d);
  Vector snapshot, snapshot_v;
  Vector sum(d);
  std::size_t k = 0;

  auto step = [&](std::size_t epoch, std::size_t batch) {
    monitor.offer(theta);
    theta_prev = theta;
    theta += cfg.eta * v;
    ++k;
    if (!monitor.step_ok(theta, k)) return false;
    TraceRecord rec;
    rec.iter = k;
    rec.epoch = epoch;
    rec.sfo = sto.total();
    rec.batch_size = batch;
    return monitor.record(rec, theta, monitor.measure_inner(), kNotMeasured);
  };

  for (std::size_t s = 1; s <= cfg.max_epochs; ++s) {
    const std::size_t N = rl_adaptive_batch_size(history, cfg);
    TraceRecord boundary;
    boundary.iter = k;
    boundary.epoch = s;
    boundary.boundary = true;
    boundary.sfo = sto.total();
    boundary.batch_size = N;

    sum.setZero();
    double returns = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      auto traj = sample_trajectory(env, policy, theta, rng);
      returns += traj.discounted_return();
      sum += trajectory_grad(cfg.grad_kind, policy, traj, theta, baseline);
    }
    if (!monitor.record(boundary, theta, true, returns / static_cast<double>(N))) break;
    sto.add(SfoEvent::outer(N));
    v = sum / static_cast<double>(N);
    snapshot = theta;
    snapshot_v = v;
    current.clear();
    current.push_back(v.squaredNorm());
    if (!step(s, N)) break;

    bool stop = false;
    for (std::size_t t = 1; t < cfg.m && !stop; ++t) {
      const Vector& ref = estimator == Estimator::svrg ? snapshot : theta_prev;
      sum.setZero();
      for (std::size_t i = 0; i < cfg.B; ++i) {
        auto traj = sample_trajectory(env, policy, theta, rng);
        const double w = importance_weight(policy, traj, ref);
        sum += trajectory_grad(cfg.grad_kind, policy, traj, theta, baseline);
        sum -= w * trajectory_grad(cfg.grad_kind, policy, traj, ref, baseline);
      }
      sto.add(SfoEvent::inner(cfg.B));
      const Vector& base = estimator == Estimator::svrg ? snapshot_v : v;
      v = sum / static_cast<double>(cfg.B) + base;
      current.push_back(v.squaredNorm());
      stop = !step(s, cfg.B);
    }
    if (stop) break;
    history = current;
  }
  return monitor.finish(theta, sto.total());
}

template <Environment E, PolicyFor<E> P>
RunTrace run_abasvrpg(const E& env, const P& policy, const RlAbaConfig& cfg,
                      const Vector& theta0, SeededRng& rng, const PolicyMetric& metric = {},
                      const Baseline<typename E::State, typename E::Action>& baseline = {}) {
  return run_policy_gradient(env, policy, Estimator::svrg, cfg, theta0, rng,
                             cfg.beta == 0.0 ? "svrpg" : "abasvrpg", metric, baseline);
}

template <Environment E, PolicyFor<E> P>
RunTrace run_abaspiderpg(const E& env, const P& policy, const RlAbaConfig& cfg,
                         const Vector& theta0, SeededRng& rng, const PolicyMetric& metric = {},
                         const Baseline<typename E::State, typename E::Action>& baseline = {}) {
  return run_policy_gradient(env, policy, Estimator::spider, cfg, theta0, rng,
                             cfg.beta == 0.0 ? "spiderpg" : "abaspiderpg", metric, baseline);
}

}  // namespace abavr
