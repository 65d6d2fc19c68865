#include "abavr/checks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "abavr/constants.hpp"
#include "abavr/exact_gradient.hpp"

namespace abavr {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

/// Running mean and total variance of a stream of vectors.
class VectorMoments {
 public:
  explicit VectorMoments(Eigen::Index d) : mean_(Vector::Zero(d)) {}

  void add(const Vector& g) {
    ++count_;
    delta_ = g - mean_;
    mean_ += delta_ / static_cast<double>(count_);
    m2_ += delta_.dot(g - mean_);
  }

  const Vector& mean() const { return mean_; }
  /// Unbiased estimate of E||g - E g||^2.
  double variance() const { return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0; }
  std::size_t count() const { return count_; }

 private:
  Vector mean_;
  Vector delta_;
  double m2_ = 0.0;
  std::size_t count_ = 0;
};

/// E||batch mean - grad f(x)||^2 over `reps` redraws.
double batch_mean_spread(const FiniteSumObjective& obj, const Vector& x, const Vector& full,
                         std::size_t N, std::size_t reps, SeededRng& rng, bool with_replacement) {
  double total = 0.0;
  for (std::size_t r = 0; r < reps; ++r) {
    const IndexList idx = with_replacement ? sample_with_replacement(obj.size(), N, rng)
                                           : sample_without_replacement(obj.size(), N, rng);
    total += (obj.batch_grad(x, idx) - full).squaredNorm();
  }
  return total / static_cast<double>(reps);
}

}  // namespace

double default_fd_step(const Vector& x) { return 1e-6 * (1.0 + x.norm()); }

double finite_diff_max_rel_error(const ValueFn& value, const GradFn& grad, const Vector& x,
                                 double step, double floor) {
  if (!(step > 0.0)) throw std::invalid_argument("finite difference step must be > 0");
  const Vector g = grad(x);
  if (g.size() != x.size()) throw std::invalid_argument("gradient dimension mismatch");
  Vector probe = x;
  double worst = 0.0;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    probe[j] = x[j] + step;
    const double up = value(probe);
    probe[j] = x[j] - step;
    const double down = value(probe);
    probe[j] = x[j];
    const double central = (up - down) / (2.0 * step);
    const double scale = std::max({std::abs(g[j]), std::abs(central), floor});
    worst = std::max(worst, std::abs(g[j] - central) / scale);
  }
  return worst;
}

CheckReport finite_diff_check(std::string name, const ValueFn& value, const GradFn& grad,
                              const Vector& x, double step, double tolerance, double floor) {
  CheckReport rep;
  rep.name = std::move(name);
  rep.measured = finite_diff_max_rel_error(value, grad, x, step, floor);
  rep.tolerance = tolerance;
  rep.sample_size = static_cast<std::size_t>(x.size());
  rep.passed = rep.measured < tolerance;
  rep.detail = "step " + fmt(step);
  return rep;
}

CheckReport sample_mean_variance_check(const FiniteSumObjective& obj, const Vector& x,
                                       std::size_t N, std::size_t reps, std::uint64_t seed,
                                       bool with_replacement) {
  if (reps == 0) throw std::invalid_argument("sample_mean_variance_check: reps must be >= 1");
  SeededRng rng(seed);
  const Vector full = obj.full_grad(x);
  const double sigma_sq = component_gradient_variance(obj, x);
  const double spread = batch_mean_spread(obj, x, full, N, reps, rng, with_replacement);
  const double predicted = sigma_sq / static_cast<double>(N);

  CheckReport rep;
  rep.name = std::string("sample_mean_variance/N=") + std::to_string(N) +
             (with_replacement ? "" : "/without_replacement");
  rep.measured = predicted > 0.0 ? spread / predicted : 0.0;
  rep.tolerance = 0.2;
  rep.sample_size = reps;
  rep.seed = seed;
  rep.passed = predicted > 0.0 && std::abs(rep.measured - 1.0) <= rep.tolerance;
  rep.extras["empirical_spread"] = spread;
  rep.extras["sigma_hat_sq"] = sigma_sq;
  rep.detail = "ratio of empirical spread to sigma_hat^2 / N; band [0.8, 1.2]";
  return rep;
}

CheckReport variance_slope_check(const FiniteSumObjective& obj, const Vector& x,
                                 std::span<const std::size_t> sizes, std::size_t reps,
                                 std::uint64_t seed) {
  if (sizes.size() < 2) throw std::invalid_argument("variance_slope_check: need >= 2 sizes");
  const Vector full = obj.full_grad(x);
  std::vector<double> lx, ly;
  CheckReport rep;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    SeededRng rng = SeededRng(seed).substream(k, 0);
    const double spread = batch_mean_spread(obj, x, full, sizes[k], reps, rng, true);
    lx.push_back(std::log(static_cast<double>(sizes[k])));
    ly.push_back(std::log(spread));
    rep.extras["spread_N=" + std::to_string(sizes[k])] = spread;
  }
  const double n = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sxy += (lx[k] - mx) * (ly[k] - my);
    sxx += (lx[k] - mx) * (lx[k] - mx);
  }
  rep.name = "variance_log_log_slope";
  rep.measured = sxy / sxx;
  rep.tolerance = 0.1;
  rep.sample_size = reps;
  rep.seed = seed;
  rep.passed = std::isfinite(rep.measured) && std::abs(rep.measured + 1.0) <= rep.tolerance;
  rep.detail = "slope of log spread vs log N; expected -1";
  return rep;
}

CheckReport pl_rate_check(const RunTrace& trace, const SyntheticPL& obj,
                          const PlRateOptions& opts) {
  if (!(opts.gamma_hat > 0.0 && opts.gamma_hat < 1.0)) {
    throw std::invalid_argument("pl_rate_check: gamma_hat must be in (0, 1)");
  }
  std::vector<double> gaps;
  std::size_t inner = 0;
  for (const auto& r : trace.records) {
    if (!r.boundary) {
      ++inner;
      continue;
    }
    if (std::isnan(r.loss)) {
      throw std::invalid_argument("pl_rate_check: epoch-boundary record without a loss");
    }
    gaps.push_back(r.loss - obj.min_value());
  }
  if (gaps.empty()) throw std::invalid_argument("pl_rate_check: trace has no epoch boundaries");
  const double final_gap = trace.final_loss - obj.min_value();
  gaps.push_back(final_gap);

  CheckReport rep;
  rep.name = "pl_rate/" + trace.algorithm;
  rep.seed = trace.seed;
  rep.sample_size = gaps.size() - 1;
  rep.tolerance = 1.0 - opts.slack;

  const double gap0 = trace.initial_loss - obj.min_value();
  const double bound =
      std::pow(opts.gamma_hat, static_cast<double>(inner)) * gap0 + opts.eps;
  const bool final_ok = std::isfinite(final_gap) && final_gap <= bound;
  rep.extras["final_gap"] = final_gap;
  rep.extras["final_bound"] = bound;
  rep.extras["iterations"] = static_cast<double>(inner);

  const double required = static_cast<double>(opts.m) * std::log(1.0 / opts.gamma_hat);
  double worst = std::numeric_limits<double>::infinity();
  std::size_t worst_epoch = 0;
  bool envelope_ok = true;
  for (std::size_t s = 0; s + 1 < gaps.size(); ++s) {
    if (!(gaps[s] > opts.eps)) break;
    if (!std::isfinite(gaps[s + 1])) {
      envelope_ok = false;
      worst = -std::numeric_limits<double>::infinity();
      worst_epoch = s + 1;
      break;
    }
    if (gaps[s + 1] <= opts.eps) break;
    const double ratio = std::log(gaps[s] / gaps[s + 1]) / required;
    if (ratio < worst) {
      worst = ratio;
      worst_epoch = s + 1;
    }
  }
  if (std::isinf(worst) && worst > 0) {
    rep.measured = 1.0;
    rep.detail = "no epoch started above eps; ";
  } else {
    rep.measured = std::isfinite(worst) ? worst : -1e300;
    rep.detail = "worst epoch " + std::to_string(worst_epoch) + "; ";
  }
  envelope_ok = envelope_ok && rep.measured >= rep.tolerance;
  rep.passed = final_ok && envelope_ok;
  rep.detail += "per-epoch log decrease / (m log(1/gamma_hat)) = " + fmt(rep.measured) +
                ", final gap " + fmt(final_gap) + (final_ok ? " <= " : " > ") + "bound " +
                fmt(bound);
  if (trace.status == RunStatus::diverged) rep.detail += "; run diverged: " + trace.diagnostic;
  return rep;
}

CheckReport sfo_ordering_check(std::string name, std::span<const RunTrace> candidate,
                               std::span<const RunTrace> reference, double threshold,
                               double max_ratio) {
  CheckReport rep;
  rep.name = std::move(name);
  rep.tolerance = max_ratio;
  rep.sample_size = std::min(candidate.size(), reference.size());
  if (candidate.empty() || reference.empty()) {
    throw std::invalid_argument("sfo_ordering_check: need at least one run per side");
  }
  if (!candidate.empty()) rep.seed = candidate.front().seed;
  auto mean_cost = [&](std::span<const RunTrace> runs, const char* side, double& out) {
    double total = 0.0;
    for (const auto& t : runs) {
      const auto cost = t.sfo_at_threshold(threshold);
      if (!cost) {
        rep.detail += std::string("non-comparable: ") + side + " run " + t.algorithm +
                      " (seed " + std::to_string(t.seed) + ") never reached " + fmt(threshold) +
                      "; ";
        return false;
      }
      total += static_cast<double>(*cost);
    }
    out = total / static_cast<double>(runs.size());
    return true;
  };
  double cand = 0.0, ref = 0.0;
  const bool ok_c = mean_cost(candidate, "candidate", cand);
  const bool ok_r = mean_cost(reference, "reference", ref);
  rep.extras["candidate_mean_cost"] = ok_c ? cand : kNotMeasured;
  rep.extras["reference_mean_cost"] = ok_r ? ref : kNotMeasured;
  if (!ok_c || !ok_r) {
    rep.measured = kNotMeasured;
    rep.passed = false;
    return rep;
  }
  rep.measured = cand / ref;
  rep.passed = rep.measured <= max_ratio;
  rep.detail = candidate.front().algorithm + " " + fmt(cand) + " vs " +
               reference.front().algorithm + " " + fmt(ref);
  return rep;
}

CheckReport policy_gradient_mean_check(std::string name, const TabularMdp& mdp,
                                       const SoftmaxPolicy& policy, const Vector& sample_theta,
                                       const Vector& eval_theta, GradKind kind, std::size_t N,
                                       std::uint64_t seed, bool importance_weighted) {
  if (N < 2) throw std::invalid_argument("policy_gradient_mean_check: N must be >= 2");
  const Vector exact = policy_gradient_dp(mdp, policy, eval_theta).grad;
  SeededRng rng(seed);
  VectorMoments moments(exact.size());
  for (std::size_t i = 0; i < N; ++i) {
    const auto traj = sample_trajectory(mdp, policy, sample_theta, rng);
    Vector g = trajectory_grad(kind, policy, traj, eval_theta);
    if (importance_weighted) g *= importance_weight(policy, traj, sample_theta, eval_theta);
    moments.add(g);
  }
  const double err = (moments.mean() - exact).norm();
  const double band = 3.0 * std::sqrt(moments.variance() / static_cast<double>(N));
  const double exact_norm = exact.norm();

  CheckReport rep;
  rep.name = std::move(name);
  rep.sample_size = N;
  rep.seed = seed;
  rep.extras["variance"] = moments.variance();
  rep.extras["exact_norm"] = exact_norm;
  rep.extras["abs_error"] = err;
  rep.extras["three_sigma_band"] = band;
  if (exact_norm < 1e-10) {
    rep.measured = err;
    rep.tolerance = band;
    rep.passed = err <= band;
    rep.detail = "exact gradient vanishes; absolute error vs 3 sigma / sqrt(N)";
    return rep;
  }
  rep.measured = err / exact_norm;
  rep.tolerance = band / exact_norm;
  if (N >= 100000) rep.tolerance = std::min(rep.tolerance, 0.01);
  rep.passed = rep.measured <= rep.tolerance;
  rep.detail = "relative error of the Monte-Carlo mean";
  return rep;
}

CheckReport rl_unbiasedness_check(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                                  const Vector& theta, GradKind kind, std::size_t N,
                                  std::uint64_t seed) {
  return policy_gradient_mean_check("rl_unbiased/" + std::string(to_string(kind)) + "/N=" +
                                        std::to_string(N),
                                    mdp, policy, theta, theta, kind, N, seed);
}

CheckReport importance_weight_mean_check(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                                         const Vector& theta1, const Vector& theta2,
                                         std::size_t N, std::uint64_t seed, bool reciprocal) {
  if (N < 2) throw std::invalid_argument("importance_weight_mean_check: N must be >= 2");
  SeededRng rng(seed);
  double mean = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const auto traj = sample_trajectory(mdp, policy, theta1, rng);
    double w = importance_weight(policy, traj, theta1, theta2);
    if (reciprocal) w = 1.0 / w;
    const double delta = w - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (w - mean);
  }
  const double sd = std::sqrt(m2 / static_cast<double>(N - 1));
  CheckReport rep;
  rep.name = std::string("importance_weight_mean") + (reciprocal ? "/reciprocal" : "");
  rep.measured = std::abs(mean - 1.0);
  rep.tolerance = 3.0 * sd / std::sqrt(static_cast<double>(N));
  rep.sample_size = N;
  rep.seed = seed;
  rep.passed = rep.measured <= rep.tolerance;
  rep.extras["mean"] = mean;
  rep.extras["std_dev"] = sd;
  rep.detail = "|E[w] - 1| against 3 sigma / sqrt(N)";
  return rep;
}

CheckReport importance_weight_variance_check(const TabularMdp& mdp,
                                             const SoftmaxPolicy& policy, const Vector& theta,
                                             const Vector& direction,
                                             std::span<const double> radii, std::size_t N,
                                             std::uint64_t seed) {
  if (radii.size() < 2) throw std::invalid_argument("importance_weight_variance_check: need >= 2 radii");
  if (N < 2) throw std::invalid_argument("importance_weight_variance_check: N must be >= 2");
  const double dnorm = direction.norm();
  if (!(dnorm > 0.0)) throw std::invalid_argument("importance_weight_variance_check: zero direction");
  const Vector unit = direction / dnorm;

  CheckReport rep;
  rep.name = "importance_weight_variance";
  rep.sample_size = N;
  rep.seed = seed;
  rep.tolerance = 0.0;
  std::vector<double> vars;
  bool zero_ok = true;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    SeededRng rng = SeededRng(seed).substream(k, 0);
    const Vector target = theta + radii[k] * unit;
    double mean = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const auto traj = sample_trajectory(mdp, policy, theta, rng);
      const double w = importance_weight(policy, traj, theta, target);
      const double delta = w - mean;
      mean += delta / static_cast<double>(i + 1);
      m2 += delta * (w - mean);
    }
    const double var = m2 / static_cast<double>(N - 1);
    vars.push_back(var);
    rep.extras["var_r=" + fmt(radii[k])] = var;
    if (radii[k] == 0.0 && var != 0.0) zero_ok = false;
  }
  // Smallest consecutive increase; positive means strictly increasing.
  double min_step = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < vars.size(); ++k) min_step = std::min(min_step, vars[k + 1] - vars[k]);
  rep.measured = min_step;
  rep.passed = zero_ok && min_step > 0.0;
  rep.detail = std::string("smallest consecutive variance increase") +
               (zero_ok ? "" : "; variance at radius 0 is not zero");
  return rep;
}

}  // namespace abavr
