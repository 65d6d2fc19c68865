#pragma once

#include <cstddef>

#include "abavr/sampling.hpp"

namespace abavr {

/// One-dimensional continuous control: push a point mass toward the origin.
///   s_0 ~ N(0, init_spread^2),  s' = clip(s + a + noise * xi, -5, 5),
///   r(s, a) = -min(s^2 + 0.1 a^2, reward_bound).
class PushEnv {
 public:
  using State = double;
  using Action = double;

  struct Options {
    std::size_t horizon = 10;
    double discount = 0.99;
    double noise = 0.1;
    double init_spread = 1.0;
    double reward_bound = 10.0;
  };

  PushEnv() : PushEnv(Options{}) {}
  explicit PushEnv(Options opts);

  std::size_t horizon() const noexcept { return opts_.horizon; }
  double discount() const noexcept { return opts_.discount; }
  double reward_bound() const noexcept { return opts_.reward_bound; }

  State initial_state(SeededRng& rng) const;
  State next_state(State s, Action a, SeededRng& rng) const;
  double reward(State s, Action a) const;

 private:
  Options opts_;
};

}  // namespace abavr
