#include "abavr/exact_gradient.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace abavr {

namespace {

void check_compatible(const TabularMdp& mdp, const SoftmaxPolicy& policy, const Vector& theta) {
  if (policy.num_states() != mdp.num_states() || policy.num_actions() != mdp.num_actions()) {
    throw std::invalid_argument("policy and MDP disagree on state/action counts");
  }
  if (static_cast<std::size_t>(theta.size()) != policy.dim()) {
    throw std::invalid_argument("theta has dimension " + std::to_string(theta.size()) +
                                ", expected " + std::to_string(policy.dim()));
  }
}

struct Enumerator {
  const TabularMdp& mdp;
  const std::vector<Vector>& probs;          // pi(. | s) per state
  const std::vector<std::vector<Vector>>& scores;  // grad log pi(a | s)
  ExactPolicyValue& out;

  void visit(std::size_t t, std::size_t s, double prob, double ret, double weight,
             const Vector& score) {
    const std::size_t A = mdp.num_actions();
    for (std::size_t a = 0; a < A; ++a) {
      const double pa = probs[s][static_cast<Eigen::Index>(a)];
      if (pa == 0.0) continue;
      const double p = prob * pa;
      const double r = ret + weight * mdp.reward(s, a);
      Vector sc = score + scores[s][a];
      if (t + 1 == mdp.horizon()) {
        out.J += p * r;
        out.grad += (p * r) * sc;
        ++out.trajectories;
        continue;
      }
      for (std::size_t next = 0; next < mdp.num_states(); ++next) {
        const double pt = mdp.transition(s, a, next);
        if (pt == 0.0) continue;
        visit(t + 1, next, p * pt, r, weight * mdp.discount(), sc);
      }
    }
  }
};

void tabulate(const TabularMdp& mdp, const SoftmaxPolicy& policy, const Vector& theta,
              std::vector<Vector>& probs, std::vector<std::vector<Vector>>& scores) {
  probs.clear();
  scores.assign(mdp.num_states(), {});
  for (std::size_t s = 0; s < mdp.num_states(); ++s) {
    probs.push_back(policy.probabilities(theta, s));
    for (std::size_t a = 0; a < mdp.num_actions(); ++a) {
      scores[s].push_back(policy.grad_log_prob(theta, s, a));
    }
  }
}

}  // namespace

ExactPolicyValue exact_policy_gradient(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                                       const Vector& theta, std::size_t limit) {
  check_compatible(mdp, policy, theta);
  const double branches = static_cast<double>(mdp.num_states() * mdp.num_actions());
  const double count = std::pow(branches, static_cast<double>(mdp.horizon()));
  if (count > static_cast<double>(limit)) {
    throw std::invalid_argument(
        "trajectory enumeration needs (S*A)^H = (" + std::to_string(mdp.num_states()) + "*" +
        std::to_string(mdp.num_actions()) + ")^" + std::to_string(mdp.horizon()) + " ~ " +
        std::to_string(count) + " paths, above the limit of " + std::to_string(limit));
  }
  std::vector<Vector> probs;
  std::vector<std::vector<Vector>> scores;
  tabulate(mdp, policy, theta, probs, scores);

  ExactPolicyValue out;
  out.grad = Vector::Zero(static_cast<Eigen::Index>(policy.dim()));
  Enumerator walk{mdp, probs, scores, out};
  const Vector zero = Vector::Zero(out.grad.size());
  for (std::size_t s = 0; s < mdp.num_states(); ++s) {
    if (mdp.initial(s) == 0.0) continue;
    walk.visit(0, s, mdp.initial(s), 0.0, 1.0, zero);
  }
  return out;
}

ExactPolicyValue policy_gradient_dp(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                                    const Vector& theta) {
  check_compatible(mdp, policy, theta);
  std::vector<Vector> probs;
  std::vector<std::vector<Vector>> scores;
  tabulate(mdp, policy, theta, probs, scores);

  const std::size_t S = mdp.num_states();
  const std::size_t A = mdp.num_actions();
  const auto d = static_cast<Eigen::Index>(policy.dim());
  // dist[s] = P(s_t = s); acc[s] = E[1{s_t = s} sum_{i < t} grad log pi(a_i | s_i)].
  std::vector<double> dist(S), next_dist(S);
  std::vector<Vector> acc(S, Vector::Zero(d)), next_acc(S, Vector::Zero(d));
  for (std::size_t s = 0; s < S; ++s) dist[s] = mdp.initial(s);

  ExactPolicyValue out;
  out.grad = Vector::Zero(d);
  double weight = 1.0;
  Vector joint_score(d);
  for (std::size_t t = 0; t < mdp.horizon(); ++t) {
    std::fill(next_dist.begin(), next_dist.end(), 0.0);
    for (auto& v : next_acc) v.setZero();
    for (std::size_t s = 0; s < S; ++s) {
      for (std::size_t a = 0; a < A; ++a) {
        const double pa = probs[s][static_cast<Eigen::Index>(a)];
        const double q = dist[s] * pa;
        // E[1{s_t = s, a_t = a} sum_{i <= t} grad log pi(a_i | s_i)]
        joint_score = pa * acc[s] + q * scores[s][a];
        const double r = weight * mdp.reward(s, a);
        out.J += q * r;
        out.grad += r * joint_score;
        if (t + 1 == mdp.horizon()) continue;
        for (std::size_t n = 0; n < S; ++n) {
          const double pt = mdp.transition(s, a, n);
          if (pt == 0.0) continue;
          next_dist[n] += q * pt;
          next_acc[n] += pt * joint_score;
        }
      }
    }
    std::swap(dist, next_dist);
    std::swap(acc, next_acc);
    weight *= mdp.discount();
  }
  return out;
}

double expected_return(const TabularMdp& mdp, const SoftmaxPolicy& policy, const Vector& theta) {
  return policy_gradient_dp(mdp, policy, theta).J;
}

}  // namespace abavr
