#pragma once

#include <cstddef>
#include <vector>

#include "abavr/objective.hpp"
#include "abavr/sampling.hpp"

namespace abavr {

/// pi(a | s) proportional to exp(<theta, phi(s, a)>) over a finite action set.
class SoftmaxPolicy {
 public:
  /// features[s * actions + a] = phi(s, a); all of one dimension.
  SoftmaxPolicy(std::size_t states, std::size_t actions, std::vector<Vector> features);

  /// phi(s, a) = e_{(s, a)}: one logit per state-action pair.
  static SoftmaxPolicy tabular(std::size_t states, std::size_t actions);
  /// phi(s, a) = e_a (x) [1, s / (S - 1)]: per-action affine logits in the
  /// normalized state index. Dimension 2A.
  static SoftmaxPolicy action_affine(std::size_t states, std::size_t actions);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t num_states() const noexcept { return states_; }
  std::size_t num_actions() const noexcept { return actions_; }
  const Vector& feature(std::size_t s, std::size_t a) const { return features_[s * actions_ + a]; }

  Vector probabilities(const Vector& theta, std::size_t s) const;
  double log_prob(const Vector& theta, std::size_t s, std::size_t a) const;
  /// phi(s, a) - sum_b pi(b | s) phi(s, b).
  Vector grad_log_prob(const Vector& theta, std::size_t s, std::size_t a) const;
  std::size_t sample(const Vector& theta, std::size_t s, SeededRng& rng) const;

 private:
  Vector logits(const Vector& theta, std::size_t s) const;
  void check(const Vector& theta, std::size_t s) const;

  std::size_t states_;
  std::size_t actions_;
  std::size_t dim_;
  std::vector<Vector> features_;
};

/// Scalar-action Gaussian policy for scalar states:
///   a ~ N(w0 * s + w1, sd^2),  sd = max(exp(log_sd), 1e-3),
/// with parameters theta = (w0, w1, log_sd). The deviation is learned.
class GaussianPolicy {
 public:
  static constexpr double kMinStdDev = 1e-3;

  std::size_t dim() const noexcept { return 3; }

  double mean(const Vector& theta, double s) const;
  double std_dev(const Vector& theta) const;
  double log_prob(const Vector& theta, double s, double a) const;
  /// Zero in the log_sd coordinate while the deviation sits on its floor.
  Vector grad_log_prob(const Vector& theta, double s, double a) const;
  double sample(const Vector& theta, double s, SeededRng& rng) const;

 private:
  void check(const Vector& theta) const;
};

}  // namespace abavr
