#pragma once

#include <cstddef>

#include "abavr/mdp.hpp"
#include "abavr/objective.hpp"
#include "abavr/policies.hpp"

namespace abavr {

struct ExactPolicyValue {
  /// J(theta) = E[sum_t gamma^t r_t].
  double J = 0.0;
  Vector grad;
  /// Trajectories with nonzero probability that were visited (0 for DP).
  std::size_t trajectories = 0;
};

inline constexpr std::size_t kDefaultEnumerationLimit = 20'000'000;

/// Sum over every length-H trajectory of p(tau | theta) R(tau) grad log p(tau | theta).
/// Throws std::invalid_argument when (S A)^H exceeds `limit`.
ExactPolicyValue exact_policy_gradient(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                                       const Vector& theta,
                                       std::size_t limit = kDefaultEnumerationLimit);

/// Same quantities by forward recursion over state marginals: O(H S^2 A d).
ExactPolicyValue policy_gradient_dp(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                                    const Vector& theta);

double expected_return(const TabularMdp& mdp, const SoftmaxPolicy& policy, const Vector& theta);

}  // namespace abavr
