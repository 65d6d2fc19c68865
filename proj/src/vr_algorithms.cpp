#include "abavr/vr_algorithms.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace abavr {

Vector svrg_inner_direction(const FiniteSumObjective& obj, const Vector& x,
                            const EpochState& state, std::span<const std::size_t> batch) {
  Vector v = obj.batch_grad_difference(x, state.snapshot, batch);
  v += state.anchor;
  return v;
}

Vector spider_inner_direction(const FiniteSumObjective& obj, const Vector& x_t,
                              const Vector& x_prev, const Vector& v_prev,
                              std::span<const std::size_t> batch) {
  Vector v = obj.batch_grad_difference(x_t, x_prev, batch);
  v += v_prev;
  return v;
}

namespace {

constexpr std::uint64_t kOutputStream = 0x6f7574;  // independent of the sampling stream
constexpr double kDivergenceFactor = 1e3;

/// Bookkeeping shared by all optimizers: metrics, divergence guard, early
/// stop and the uniformly random output iterate.
class RunMonitor {
 public:
  RunMonitor(const FiniteSumObjective& obj, const AbaConfig& cfg, const Vector& x0,
             SeededRng& rng, std::string name)
      : obj_(obj), cfg_(cfg), picker_(rng.substream(kOutputStream)),
        start_(std::chrono::steady_clock::now()) {
    cfg.validate();
    if (static_cast<std::size_t>(x0.size()) != obj.dim()) {
      throw std::invalid_argument("x0 dimension " + std::to_string(x0.size()) +
                                  " does not match objective dimension " +
                                  std::to_string(obj.dim()));
    }
    trace_.algorithm = std::move(name);
    trace_.seed = rng.seed();
    trace_.initial_loss = obj.value(x0);
    if (!std::isfinite(trace_.initial_loss)) {
      throw std::invalid_argument("objective is not finite at x0");
    }
    chosen_ = x0;
  }

  /// Appends a record; measures at x when asked. Returns false when the run
  /// must stop (divergence or target reached).
  bool record(TraceRecord rec, const Vector& x, bool measure) {
    rec.wall_seconds = elapsed();
    bool keep_going = true;
    if (!x.allFinite()) {
      diverge("non-finite iterate at iteration " + std::to_string(rec.iter));
      keep_going = false;
    } else if (measure) {
      rec.loss = obj_.value(x);
      rec.grad_norm_sq = obj_.full_grad(x).squaredNorm();
      if (diverged(rec.loss)) {
        diverge("objective " + std::to_string(rec.loss) + " at iteration " +
                std::to_string(rec.iter) + " exceeds the divergence guard");
        keep_going = false;
      } else if (cfg_.stop_grad_norm_sq && rec.grad_norm_sq <= *cfg_.stop_grad_norm_sq) {
        trace_.status = RunStatus::reached_target;
        keep_going = false;
      }
    }
    trace_.records.push_back(rec);
    return keep_going;
  }

  /// Candidate for the uniformly random output iterate (reservoir of one).
  void offer(const Vector& x) {
    if (cfg_.output_mode != OutputMode::uniform_random_iterate) return;
    ++offered_;
    if (picker_.uniform_index(offered_) == 0) chosen_ = x;
  }

  bool step_ok(const Vector& x, std::size_t iter) {
    if (x.allFinite()) return true;
    diverge("non-finite iterate at iteration " + std::to_string(iter));
    return false;
  }

  RunTrace finish(const Vector& x, std::uint64_t total_sfo) {
    trace_.total_sfo = total_sfo;
    trace_.final_iterate = x;
    trace_.output_iterate = cfg_.output_mode == OutputMode::last ? x : chosen_;
    if (x.allFinite()) {
      trace_.final_loss = obj_.value(x);
      trace_.final_grad_norm_sq = obj_.full_grad(x).squaredNorm();
      if (trace_.status != RunStatus::diverged && diverged(trace_.final_loss)) {
        diverge("final objective exceeds the divergence guard");
      }
    }
    if (trace_.output_iterate.allFinite()) {
      trace_.output_loss = obj_.value(trace_.output_iterate);
      trace_.output_grad_norm_sq = obj_.full_grad(trace_.output_iterate).squaredNorm();
    }
    return std::move(trace_);
  }

  bool measure_inner() const { return cfg_.cadence == MetricCadence::iteration; }

 private:
  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }
  bool diverged(double value) const {
    return !std::isfinite(value) ||
           value > kDivergenceFactor * std::max(std::abs(trace_.initial_loss), 1e-300);
  }
  void diverge(std::string why) {
    trace_.status = RunStatus::diverged;
    trace_.diagnostic = std::move(why);
  }

  const FiniteSumObjective& obj_;
  const AbaConfig& cfg_;
  SeededRng picker_;
  std::chrono::steady_clock::time_point start_;
  RunTrace trace_;
  Vector chosen_;
  std::size_t offered_ = 0;
};

}  // namespace

RunTrace run_variance_reduced(const FiniteSumObjective& obj, Estimator estimator,
                              const BatchSchedule& sched, const AbaConfig& cfg,
                              const Vector& x0, SeededRng& rng, std::string name) {
  RunMonitor monitor(obj, cfg, x0, rng, std::move(name));
  const std::size_t n = obj.size();
  const double inv_m = 1.0 / static_cast<double>(cfg.m);
  SfoCounter sfo(cfg.sfo_mode);
  Vector snapshot = x0;
  double beta = cfg.initial_beta();
  std::size_t k = 0;

  for (std::size_t s = 1; s <= cfg.max_epochs; ++s) {
    const std::size_t anchor_size = anchor_batch_size(sched, s, beta, cfg, n);
    TraceRecord boundary{.iter = k, .epoch = s, .boundary = true, .sfo = sfo.total(),
                         .batch_size = anchor_size};
    if (!monitor.record(boundary, snapshot, true)) break;

    const IndexList anchor_idx = sample_without_replacement(n, anchor_size, rng);
    EpochState state{snapshot, obj.batch_grad(snapshot, anchor_idx), 0.0, s};
    sfo.add(SfoEvent::outer(anchor_size));

    Vector x = snapshot;
    bool alive = true;
    auto finish_step = [&](const Vector& v, std::size_t batch_used) {
      state.beta_next_accum += v.squaredNorm() * inv_m;
      TraceRecord rec{.iter = ++k, .epoch = s, .sfo = sfo.total(), .batch_size = batch_used};
      return monitor.record(rec, x, monitor.measure_inner());
    };

    if (estimator == Estimator::svrg) {
      for (std::size_t t = 1; t <= cfg.m && alive; ++t) {
        monitor.offer(x);
        const IndexList batch = sample_with_replacement(n, cfg.B, rng);
        const Vector v = svrg_inner_direction(obj, x, state, batch);
        x -= cfg.eta * v;
        sfo.add(SfoEvent::inner(cfg.B));
        alive = finish_step(v, cfg.B);
      }
    } else {
      // The anchor itself drives the first step of the epoch.
      monitor.offer(x);
      Vector v = state.anchor;
      Vector x_prev = x;
      x -= cfg.eta * v;
      alive = finish_step(v, 0);
      for (std::size_t t = 1; t < cfg.m && alive; ++t) {
        monitor.offer(x);
        const IndexList batch = sample_with_replacement(n, cfg.B, rng);
        v = spider_inner_direction(obj, x, x_prev, v, batch);
        x_prev = x;
        x -= cfg.eta * v;
        sfo.add(SfoEvent::inner(cfg.B));
        alive = finish_step(v, cfg.B);
      }
    }
    snapshot = x;
    beta = state.beta_next_accum;
    if (!alive) break;
  }
  return monitor.finish(snapshot, sfo.total());
}

RunTrace run_abasvrg(const FiniteSumObjective& obj, const AbaConfig& cfg, const Vector& x0,
                     SeededRng& rng) {
  return run_variance_reduced(obj, Estimator::svrg, schedule::Adaptive{}, cfg, x0, rng,
                              "abasvrg");
}

RunTrace run_abaspider(const FiniteSumObjective& obj, const AbaConfig& cfg, const Vector& x0,
                       SeededRng& rng) {
  return run_variance_reduced(obj, Estimator::spider, schedule::Adaptive{}, cfg, x0, rng,
                              "abaspider");
}

namespace {

/// Plain minibatch descent, grouped into blocks of cfg.m iterations.
/// `batch_for` receives the global iteration index.
RunTrace run_sgd_family(const FiniteSumObjective& obj, const AbaConfig& cfg, const Vector& x0,
                        SeededRng& rng, std::string name,
                        const std::function<std::size_t(std::size_t)>& batch_for,
                        const std::function<void(const Vector&)>& observe) {
  RunMonitor monitor(obj, cfg, x0, rng, std::move(name));
  const std::size_t n = obj.size();
  SfoCounter sfo(cfg.sfo_mode);
  Vector x = x0;
  std::size_t k = 0;
  bool alive = true;
  for (std::size_t s = 1; s <= cfg.max_epochs && alive; ++s) {
    TraceRecord boundary{.iter = k, .epoch = s, .boundary = true, .sfo = sfo.total(),
                         .batch_size = batch_for(k)};
    if (!monitor.record(boundary, x, true)) break;
    for (std::size_t t = 0; t < cfg.m && alive; ++t) {
      monitor.offer(x);
      const std::size_t size = batch_for(k);
      Vector v;
      if (size >= n) {
        v = obj.full_grad(x);
      } else {
        v = obj.batch_grad(x, sample_with_replacement(n, size, rng));
      }
      sfo.add(SfoEvent::plain(size));
      x -= cfg.eta * v;
      observe(v);
      TraceRecord rec{.iter = ++k, .epoch = s, .sfo = sfo.total(), .batch_size = size};
      alive = monitor.record(rec, x, monitor.measure_inner());
    }
  }
  return monitor.finish(x, sfo.total());
}

}  // namespace

RunTrace run_abasgd(const FiniteSumObjective& obj, const AbaConfig& cfg,
                    const AbaSgdOptions& opts, const Vector& x0, SeededRng& rng) {
  if (!(opts.alpha0 >= 0.0) || !std::isfinite(opts.alpha0)) {
    throw std::invalid_argument("AbaSGD: alpha0 must be finite and >= 0");
  }
  std::vector<double> window(cfg.m, opts.alpha0 * opts.alpha0);
  std::size_t slot = 0;
  const std::size_t n = obj.size();
  auto batch_for = [&](std::size_t) {
    return abasgd_batch_size(window, cfg.sigma_sq, cfg.eps, opts, n);
  };
  auto observe = [&](const Vector& v) {
    window[slot] = v.squaredNorm();
    slot = (slot + 1) % window.size();
  };
  return run_sgd_family(obj, cfg, x0, rng, "abasgd", batch_for, observe);
}

std::string_view to_string(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::sgd: return "sgd";
    case BaselineKind::hsgd: return "hsgd";
    case BaselineKind::svrg_fixed: return "svrg_fixed";
    case BaselineKind::spiderboost_fixed: return "spiderboost_fixed";
    case BaselineKind::spider_exp: return "spider_exp";
    case BaselineKind::spider_lin: return "spider_lin";
  }
  return "unknown";
}

RunTrace run_baseline(const FiniteSumObjective& obj, BaselineKind kind, const AbaConfig& cfg,
                      const BaselineParams& params, const Vector& x0, SeededRng& rng) {
  const std::size_t n = obj.size();
  const std::string name(to_string(kind));
  switch (kind) {
    case BaselineKind::sgd:
      return run_sgd_family(
          obj, cfg, x0, rng, name, [&](std::size_t) { return std::min(cfg.B, n); },
          [](const Vector&) {});
    case BaselineKind::hsgd:
      if (!(params.c_b > 0)) throw std::invalid_argument("HSGD: c_b must be > 0");
      return run_sgd_family(
          obj, cfg, x0, rng, name,
          [&](std::size_t t) { return ceil_clamp(params.c_b * static_cast<double>(t + 1), n); },
          [](const Vector&) {});
    case BaselineKind::svrg_fixed:
      return run_variance_reduced(obj, Estimator::svrg,
                                  schedule::Fixed{fixed_anchor_batch(cfg, n)}, cfg, x0, rng, name);
    case BaselineKind::spiderboost_fixed:
      return run_variance_reduced(obj, Estimator::spider,
                                  schedule::Fixed{fixed_anchor_batch(cfg, n)}, cfg, x0, rng, name);
    case BaselineKind::spider_exp:
      if (!(params.mu > 1)) throw std::invalid_argument("exponential schedule: mu must be > 1");
      return run_variance_reduced(obj, Estimator::spider, schedule::Exponential{params.mu}, cfg,
                                  x0, rng, name);
    case BaselineKind::spider_lin:
      if (!(params.nu > 0)) throw std::invalid_argument("linear schedule: nu must be > 0");
      return run_variance_reduced(obj, Estimator::spider, schedule::Linear{params.nu}, cfg, x0,
                                  rng, name);
  }
  throw std::invalid_argument("unknown baseline");
}

}  // namespace abavr
