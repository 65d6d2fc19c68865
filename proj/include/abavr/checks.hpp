#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>

#include "abavr/check_report.hpp"
#include "abavr/mdp.hpp"
#include "abavr/objective.hpp"
#include "abavr/policies.hpp"
#include "abavr/run_trace.hpp"
#include "abavr/sampling.hpp"
#include "abavr/synthetic_pl.hpp"
#include "abavr/trajectory.hpp"

namespace abavr {

using ValueFn = std::function<double(const Vector&)>;
using GradFn = std::function<Vector(const Vector&)>;

/// Max over coordinates of |g_j - c_j| / max(|g_j|, |c_j|, floor), where c is
/// the central difference (f(x + h e_j) - f(x - h e_j)) / 2h.
double finite_diff_max_rel_error(const ValueFn& value, const GradFn& grad, const Vector& x,
                                 double step, double floor = 1e-4);

CheckReport finite_diff_check(std::string name, const ValueFn& value, const GradFn& grad,
                              const Vector& x, double step, double tolerance = 1e-5,
                              double floor = 1e-4);

/// Central-difference step 1e-6 (1 + ||x||).
double default_fd_step(const Vector& x);

/// Draws `reps` batch means of size N and compares their spread
/// E||mean - grad f(x)||^2 with sigma_hat^2(x) / N, where sigma_hat^2 is the
/// exhaustive component variance. Passes when the ratio is within [0.8, 1.2].
/// `with_replacement = false` is the negative control (zero spread at N = n).
CheckReport sample_mean_variance_check(const FiniteSumObjective& obj, const Vector& x,
                                       std::size_t N, std::size_t reps, std::uint64_t seed,
                                       bool with_replacement = true);

/// Least-squares slope of log(spread) against log(N); passes at -1 +- 0.1.
CheckReport variance_slope_check(const FiniteSumObjective& obj, const Vector& x,
                                 std::span<const std::size_t> sizes, std::size_t reps,
                                 std::uint64_t seed);

struct PlRateOptions {
  double gamma_hat;
  std::size_t m;
  double eps;
  /// Allowed shortfall of the per-epoch log decrease.
  double slack = 0.1;
};

/// Linear-rate envelope on a run over a PL objective, evaluated on the
/// epoch-boundary losses plus the final loss:
///   final gap <= gamma_hat^K gap_0 + eps, and
///   log(gap_s / gap_{s+1}) >= (1 - slack) m log(1 / gamma_hat) while gap_s > eps.
/// Throws std::invalid_argument when the trace has no boundary metrics.
CheckReport pl_rate_check(const RunTrace& trace, const SyntheticPL& obj,
                          const PlRateOptions& opts);

/// Ratio of mean cost-at-threshold of `candidate` to `reference` runs.
/// Passes at ratio <= max_ratio; fails as non-comparable when any run never
/// reaches the threshold.
CheckReport sfo_ordering_check(std::string name, std::span<const RunTrace> candidate,
                               std::span<const RunTrace> reference, double threshold,
                               double max_ratio = 0.9);

/// Monte-Carlo mean of trajectory gradients against the exact gradient.
/// Trajectories are drawn at `sample_theta`, gradients evaluated at
/// `eval_theta` and, when `importance_weighted`, multiplied by
/// omega(tau | sample_theta, eval_theta). The exact reference is grad J(eval_theta).
/// Passes when ||mean - exact|| <= 3 sigma / sqrt(N) (sigma^2 the total
/// per-trajectory variance) and, for N >= 1e5, the relative error is <= 1%.
CheckReport policy_gradient_mean_check(std::string name, const TabularMdp& mdp,
                                       const SoftmaxPolicy& policy, const Vector& sample_theta,
                                       const Vector& eval_theta, GradKind kind, std::size_t N,
                                       std::uint64_t seed, bool importance_weighted = false);

/// Unbiasedness of REINFORCE / G(PO)MDP at theta.
CheckReport rl_unbiasedness_check(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                                  const Vector& theta, GradKind kind, std::size_t N,
                                  std::uint64_t seed);

/// E_{tau ~ theta_1}[w] = 1 within 3 sigma / sqrt(N), where
/// w = p(tau | theta_2) / p(tau | theta_1), or the reciprocal when `reciprocal`.
CheckReport importance_weight_mean_check(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                                         const Vector& theta1, const Vector& theta2,
                                         std::size_t N, std::uint64_t seed,
                                         bool reciprocal = false);

/// Empirical Var(omega(tau | theta, theta + r u)) at each radius r, in the
/// given order. Passes when the sequence is strictly increasing and the
/// variance at r = 0 (if present) is exactly zero.
CheckReport importance_weight_variance_check(const TabularMdp& mdp,
                                             const SoftmaxPolicy& policy, const Vector& theta,
                                             const Vector& direction,
                                             std::span<const double> radii, std::size_t N,
                                             std::uint64_t seed);

}  // namespace abavr
