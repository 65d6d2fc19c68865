#include "abavr/push_env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace abavr {

PushEnv::PushEnv(Options opts) : opts_(opts) {
  if (opts_.horizon == 0) throw std::invalid_argument("PushEnv: horizon must be >= 1");
  if (!(opts_.discount >= 0.0 && opts_.discount < 1.0)) {
    throw std::invalid_argument("PushEnv: discount must be in [0, 1)");
  }
  if (!(opts_.noise >= 0.0) || !(opts_.init_spread >= 0.0) || !(opts_.reward_bound > 0.0)) {
    throw std::invalid_argument("PushEnv: noise, spread must be >= 0 and reward_bound > 0");
  }
}

PushEnv::State PushEnv::initial_state(SeededRng& rng) const { return opts_.init_spread * rng.normal(); }

PushEnv::State PushEnv::next_state(State s, Action a, SeededRng& rng) const {
  return std::clamp(s + a + opts_.noise * rng.normal(), -5.0, 5.0);
}

double PushEnv::reward(State s, Action a) const {
  return -std::min(s * s + 0.1 * a * a, opts_.reward_bound);
}

}  // namespace abavr
