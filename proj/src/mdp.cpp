#include "abavr/mdp.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>

namespace abavr {

namespace {

void check_distribution(const double* p, std::size_t count, const std::string& what) {
  double sum = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    if (!(p[i] >= 0.0) || !std::isfinite(p[i])) {
      throw std::invalid_argument(what + ": probabilities must be finite and >= 0");
    }
    sum += p[i];
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    std::ostringstream os;
    os << what << ": probabilities sum to " << sum << ", expected 1";
    throw std::invalid_argument(os.str());
  }
}

}  // namespace

TabularMdp::TabularMdp(std::size_t states, std::size_t actions, std::vector<double> transitions,
                       std::vector<double> rewards, std::vector<double> initial,
                       std::size_t horizon, double discount, double reward_bound)
    : states_(states), actions_(actions), transitions_(std::move(transitions)),
      rewards_(std::move(rewards)), initial_(std::move(initial)), horizon_(horizon),
      discount_(discount), reward_bound_(reward_bound) {
  if (states_ == 0 || actions_ == 0) throw std::invalid_argument("MDP: empty state or action set");
  if (transitions_.size() != states_ * actions_ * states_) {
    throw std::invalid_argument("MDP: transition table has wrong size");
  }
  if (rewards_.size() != states_ * actions_) throw std::invalid_argument("MDP: reward table has wrong size");
  if (initial_.size() != states_) throw std::invalid_argument("MDP: initial distribution has wrong size");
  if (horizon_ == 0) throw std::invalid_argument("MDP: horizon must be >= 1");
  if (!(discount_ >= 0.0 && discount_ < 1.0)) throw std::invalid_argument("MDP: discount must be in [0, 1)");
  check_distribution(initial_.data(), states_, "MDP initial distribution");
  for (std::size_t sa = 0; sa < states_ * actions_; ++sa) {
    check_distribution(&transitions_[sa * states_], states_,
                       "MDP transition row (s=" + std::to_string(sa / actions_) +
                           ", a=" + std::to_string(sa % actions_) + ")");
  }
  double max_abs = 0.0;
  for (double r : rewards_) {
    if (!std::isfinite(r)) throw std::invalid_argument("MDP: rewards must be finite");
    max_abs = std::max(max_abs, std::abs(r));
  }
  if (reward_bound_ <= 0.0) reward_bound_ = max_abs;
  if (max_abs > reward_bound_) throw std::invalid_argument("MDP: reward exceeds reward_bound");
}

TabularMdp TabularMdp::chain5(std::size_t horizon, double discount) {
  constexpr std::size_t S = 5, A = 2;
  constexpr double success = 0.9;
  const double state_reward[S] = {-1.0, -0.5, 0.0, 0.5, 1.0};
  std::vector<double> p(S * A * S, 0.0), r(S * A, 0.0), rho(S, 0.0);
  for (std::size_t s = 0; s < S; ++s) {
    const std::size_t left = s == 0 ? 0 : s - 1;
    const std::size_t right = s + 1 == S ? s : s + 1;
    p[(s * A + 0) * S + left] += success;
    p[(s * A + 0) * S + right] += 1.0 - success;
    p[(s * A + 1) * S + right] += success;
    p[(s * A + 1) * S + left] += 1.0 - success;
    r[s * A + 0] = r[s * A + 1] = state_reward[s];
  }
  rho[2] = 1.0;
  return TabularMdp(S, A, std::move(p), std::move(r), std::move(rho), horizon, discount);
}

TabularMdp TabularMdp::parse(std::istream& in) {
  std::size_t states = 0, actions = 0, horizon = 0;
  double discount = -1.0, bound = 0.0;
  std::vector<double> initial, transitions, rewards;
  std::vector<bool> seen_transition;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&line_no](const std::string& why) -> void {
    throw std::invalid_argument("MDP file line " + std::to_string(line_no) + ": " + why);
  };
  auto need_sizes = [&]() {
    if (states == 0 || actions == 0) fail("'states' and 'actions' must come first");
    if (transitions.empty()) {
      transitions.assign(states * actions * states, 0.0);
      rewards.assign(states * actions, 0.0);
      seen_transition.assign(states * actions, false);
    }
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    auto read_index = [&](std::size_t limit, const char* what) {
      long long v = -1;
      if (!(ls >> v) || v < 0 || static_cast<std::size_t>(v) >= limit) {
        fail(std::string("bad ") + what + " index");
      }
      return static_cast<std::size_t>(v);
    };
    auto read_probs = [&](std::vector<double>& dst, std::size_t offset) {
      for (std::size_t j = 0; j < states; ++j) {
        if (!(ls >> dst[offset + j])) fail("expected " + std::to_string(states) + " probabilities");
      }
    };
    if (key == "states") {
      if (!(ls >> states) || states == 0) fail("bad state count");
    } else if (key == "actions") {
      if (!(ls >> actions) || actions == 0) fail("bad action count");
    } else if (key == "horizon") {
      if (!(ls >> horizon) || horizon == 0) fail("bad horizon");
    } else if (key == "discount") {
      if (!(ls >> discount)) fail("bad discount");
    } else if (key == "reward_bound") {
      if (!(ls >> bound)) fail("bad reward bound");
    } else if (key == "initial") {
      need_sizes();
      initial.assign(states, 0.0);
      read_probs(initial, 0);
    } else if (key == "transition") {
      need_sizes();
      const std::size_t s = read_index(states, "state");
      const std::size_t a = read_index(actions, "action");
      read_probs(transitions, (s * actions + a) * states);
      seen_transition[s * actions + a] = true;
    } else if (key == "reward") {
      need_sizes();
      const std::size_t s = read_index(states, "state");
      const std::size_t a = read_index(actions, "action");
      if (!(ls >> rewards[s * actions + a])) fail("bad reward value");
    } else {
      fail("unknown directive '" + key + "'");
    }
    std::string extra;
    if (ls >> extra) fail("trailing token '" + extra + "'");
  }
  line_no = 0;
  if (states == 0 || actions == 0) fail("missing 'states' or 'actions'");
  if (horizon == 0) fail("missing 'horizon'");
  if (discount < 0.0) fail("missing 'discount'");
  if (initial.empty()) fail("missing 'initial'");
  for (std::size_t sa = 0; sa < seen_transition.size(); ++sa) {
    if (!seen_transition[sa]) {
      fail("missing transition for s=" + std::to_string(sa / actions) +
           " a=" + std::to_string(sa % actions));
    }
  }
  return TabularMdp(states, actions, std::move(transitions), std::move(rewards),
                    std::move(initial), horizon, discount, bound);
}

TabularMdp TabularMdp::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open MDP file '" + path + "'");
  return parse(in);
}

std::size_t sample_categorical(const double* probs, std::size_t count, SeededRng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    acc += probs[i];
    if (u < acc) return i;
  }
  // Rounding left u above the last partial sum; return the last supported outcome.
  for (std::size_t i = count; i-- > 0;) {
    if (probs[i] > 0.0) return i;
  }
  return count - 1;
}

TabularMdp::State TabularMdp::initial_state(SeededRng& rng) const {
  return sample_categorical(initial_.data(), states_, rng);
}

TabularMdp::State TabularMdp::next_state(State s, Action a, SeededRng& rng) const {
  return sample_categorical(&transitions_[(s * actions_ + a) * states_], states_, rng);
}

}  // namespace abavr
