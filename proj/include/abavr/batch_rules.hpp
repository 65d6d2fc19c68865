#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>

#include "abavr/vr_config.hpp"

namespace abavr {

/// ceil(value) clamped to [1, cap]. Non-finite or huge values map to cap.
/// A relative 1e-12 allowance absorbs rounding in quotients such as 16/0.1.
std::size_t ceil_clamp(double value, std::size_t cap);

/// N_s = clamp(ceil(min(c_beta sigma^2 / beta_s, c_eps sigma^2 / eps, n)), 1, n).
/// The first term is +inf when beta_s == 0.
std::size_t adaptive_batch_size(double beta_s, const AbaConfig& cfg, std::size_t n);

/// min(ceil(c_eps sigma^2 / eps), n): the vanilla fixed anchor batch.
std::size_t fixed_anchor_batch(const AbaConfig& cfg, std::size_t n);

/// AbaSGD: min(c_beta sigma^2 / mean(window), c_eps sigma^2 / eps, n).
std::size_t abasgd_batch_size(std::span<const double> window_sq_norms, double sigma_sq,
                              double eps, const AbaSgdOptions& opts, std::size_t n);

namespace schedule {
struct Fixed {
  std::size_t size;
};
/// N_s = mu^s.
struct Exponential {
  double mu;
};
/// N_s = nu (s + 1).
struct Linear {
  double nu;
};
struct Adaptive {};
}  // namespace schedule

using BatchSchedule =
    std::variant<schedule::Fixed, schedule::Exponential, schedule::Linear, schedule::Adaptive>;

/// Anchor batch for 1-based epoch s. Always in [1, n].
std::size_t anchor_batch_size(const BatchSchedule& sched, std::size_t s, double beta_s,
                              const AbaConfig& cfg, std::size_t n);

std::string describe(const BatchSchedule& sched);

}  // namespace abavr
