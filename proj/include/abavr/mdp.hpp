#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "abavr/sampling.hpp"

namespace abavr {

/// Finite-horizon MDP with finite state and action sets.
class TabularMdp {
 public:
  using State = std::size_t;
  using Action = std::size_t;

  /// transitions is laid out [s][a][s'], rewards [s][a]. When reward_bound
  /// is not positive it defaults to max |R(s, a)|.
  TabularMdp(std::size_t states, std::size_t actions, std::vector<double> transitions,
             std::vector<double> rewards, std::vector<double> initial, std::size_t horizon,
             double discount, double reward_bound = 0.0);

  /// Five-state chain, actions {left, right}; the chosen direction succeeds
  /// with probability 0.9 (walls keep the agent in place). Per-step reward
  /// depends on the state only: (-1, -0.5, 0, 0.5, 1). Starts in the middle.
  static TabularMdp chain5(std::size_t horizon = 5, double discount = 0.99);

  /// Declarative text format, one directive per line ('#' starts a comment):
  ///   states <S>            actions <A>
  ///   horizon <H>           discount <gamma>
  ///   initial <p_0> ... <p_{S-1}>
  ///   transition <s> <a> <p_0> ... <p_{S-1}>     (required for every (s, a))
  ///   reward <s> <a> <r>                         (default 0)
  ///   reward_bound <R_max>                       (optional)
  static TabularMdp parse(std::istream& in);
  static TabularMdp load(const std::string& path);

  std::size_t num_states() const noexcept { return states_; }
  std::size_t num_actions() const noexcept { return actions_; }
  std::size_t horizon() const noexcept { return horizon_; }
  double discount() const noexcept { return discount_; }
  double reward_bound() const noexcept { return reward_bound_; }

  double transition(State s, Action a, State next) const {
    return transitions_[(s * actions_ + a) * states_ + next];
  }
  double reward(State s, Action a) const { return rewards_[s * actions_ + a]; }
  double initial(State s) const { return initial_[s]; }

  State initial_state(SeededRng& rng) const;
  State next_state(State s, Action a, SeededRng& rng) const;

 private:
  std::size_t states_;
  std::size_t actions_;
  std::vector<double> transitions_;
  std::vector<double> rewards_;
  std::vector<double> initial_;
  std::size_t horizon_;
  double discount_;
  double reward_bound_;
};

/// Index drawn from a discrete distribution given as a probability range.
std::size_t sample_categorical(const double* probs, std::size_t count, SeededRng& rng);

}  // namespace abavr
