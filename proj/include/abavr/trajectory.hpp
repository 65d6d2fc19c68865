#pragma once

#include <cmath>
#include <concepts>
#include <cstddef>
#include <functional>
#include <string_view>
#include <vector>

#include "abavr/objective.hpp"
#include "abavr/sampling.hpp"

namespace abavr {

template <class E>
concept Environment = requires(const E& env, const typename E::State& s,
                               const typename E::Action& a, SeededRng& rng) {
  { env.initial_state(rng) } -> std::convertible_to<typename E::State>;
  { env.next_state(s, a, rng) } -> std::convertible_to<typename E::State>;
  { env.reward(s, a) } -> std::convertible_to<double>;
  { env.horizon() } -> std::convertible_to<std::size_t>;
  { env.discount() } -> std::convertible_to<double>;
};

template <class P, class E>
concept PolicyFor = Environment<E> && requires(const P& p, const Vector& theta,
                                               const typename E::State& s,
                                               const typename E::Action& a, SeededRng& rng) {
  { p.dim() } -> std::convertible_to<std::size_t>;
  { p.log_prob(theta, s, a) } -> std::convertible_to<double>;
  { p.grad_log_prob(theta, s, a) } -> std::convertible_to<Vector>;
  { p.sample(theta, s, rng) } -> std::convertible_to<typename E::Action>;
};

template <class S, class A>
struct TrajectoryStep {
  S state;
  A action;
  double reward;
  /// log pi(action | state) under the sampling parameters.
  double log_prob;
};

template <class S, class A>
struct Trajectory {
  std::vector<TrajectoryStep<S, A>> steps;
  double discount = 1.0;

  /// sum_t gamma^t r_t.
  double discounted_return() const {
    double total = 0.0, weight = 1.0;
    for (const auto& st : steps) {
      total += weight * st.reward;
      weight *= discount;
    }
    return total;
  }
};

template <Environment E>
using TrajectoryOf = Trajectory<typename E::State, typename E::Action>;

/// b(s, a); an empty function means no baseline.
template <class S, class A>
using Baseline = std::function<double(const S&, const A&)>;

enum class GradKind { reinforce, gpomdp };

inline std::string_view to_string(GradKind kind) {
  return kind == GradKind::reinforce ? "reinforce" : "gpomdp";
}

/// s_0 ~ rho, a_t ~ pi_theta(. | s_t), s_{t+1} ~ P(. | s_t, a_t); exactly H steps.
template <Environment E, PolicyFor<E> P>
TrajectoryOf<E> sample_trajectory(const E& env, const P& policy, const Vector& theta,
                                  SeededRng& rng) {
  TrajectoryOf<E> traj;
  traj.discount = env.discount();
  traj.steps.reserve(env.horizon());
  auto s = env.initial_state(rng);
  for (std::size_t t = 0; t < env.horizon(); ++t) {
    auto a = policy.sample(theta, s, rng);
    traj.steps.push_back({s, a, env.reward(s, a), policy.log_prob(theta, s, a)});
    if (t + 1 < env.horizon()) s = env.next_state(s, a, rng);
  }
  return traj;
}

namespace detail {
template <class S, class A>
double baseline_at(const Baseline<S, A>& b, const S& s, const A& a) {
  return b ? b(s, a) : 0.0;
}
}  // namespace detail

/// (sum_t [gamma^t r_t - b(s_t, a_t)]) * sum_t grad log pi_theta(a_t | s_t).
template <class P, class S, class A>
Vector reinforce_grad(const P& policy, const Trajectory<S, A>& traj, const Vector& theta,
                      const Baseline<S, A>& baseline = {}) {
  Vector score = Vector::Zero(static_cast<Eigen::Index>(policy.dim()));
  double adjusted = 0.0, weight = 1.0;
  for (const auto& st : traj.steps) {
    adjusted += weight * st.reward - detail::baseline_at(baseline, st.state, st.action);
    score += policy.grad_log_prob(theta, st.state, st.action);
    weight *= traj.discount;
  }
  return adjusted * score;
}

/// sum_t (gamma^t r_t - b(s_t, a_t)) * sum_{i <= t} grad log pi_theta(a_i | s_i).
template <class P, class S, class A>
Vector gpomdp_grad(const P& policy, const Trajectory<S, A>& traj, const Vector& theta,
                   const Baseline<S, A>& baseline = {}) {
  const auto d = static_cast<Eigen::Index>(policy.dim());
  Vector partial_score = Vector::Zero(d);
  Vector g = Vector::Zero(d);
  double weight = 1.0;
  for (const auto& st : traj.steps) {
    partial_score += policy.grad_log_prob(theta, st.state, st.action);
    g += (weight * st.reward - detail::baseline_at(baseline, st.state, st.action)) * partial_score;
    weight *= traj.discount;
  }
  return g;
}

template <class P, class S, class A>
Vector trajectory_grad(GradKind kind, const P& policy, const Trajectory<S, A>& traj,
                       const Vector& theta, const Baseline<S, A>& baseline = {}) {
  return kind == GradKind::reinforce ? reinforce_grad(policy, traj, theta, baseline)
                                     : gpomdp_grad(policy, traj, theta, baseline);
}

/// p(tau | target) / p(tau | sample) for tau drawn under `sample`. Initial
/// state and transition factors cancel, leaving the policy terms.
template <class P, class S, class A>
double importance_weight(const P& policy, const Trajectory<S, A>& traj, const Vector& sample,
                         const Vector& target) {
  double log_ratio = 0.0;
  for (const auto& st : traj.steps) {
    log_ratio += policy.log_prob(target, st.state, st.action) -
                 policy.log_prob(sample, st.state, st.action);
  }
  return std::exp(log_ratio);
}

/// Same ratio using the log-probabilities recorded at sampling time.
template <class P, class S, class A>
double importance_weight(const P& policy, const Trajectory<S, A>& traj, const Vector& target) {
  double log_ratio = 0.0;
  for (const auto& st : traj.steps) {
    log_ratio += policy.log_prob(target, st.state, st.action) - st.log_prob;
  }
  return std::exp(log_ratio);
}

}  // namespace abavr
