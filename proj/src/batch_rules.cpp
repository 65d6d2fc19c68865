#include "abavr/batch_rules.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace abavr {

std::size_t ceil_clamp(double value, std::size_t cap) {
  if (cap == 0) throw std::invalid_argument("ceil_clamp: cap must be >= 1");
  if (std::isnan(value)) return cap;
  if (value <= 1.0) return 1;
  if (value >= static_cast<double>(cap)) return cap;
  const double c = std::ceil(value * (1.0 - 1e-12));
  return std::clamp(static_cast<std::size_t>(c), std::size_t{1}, cap);
}

std::size_t adaptive_batch_size(double beta_s, const AbaConfig& cfg, std::size_t n) {
  const double history_term = beta_s > 0.0 ? cfg.c_beta * cfg.sigma_sq / beta_s
                                           : std::numeric_limits<double>::infinity();
  const double accuracy_term = cfg.c_eps * cfg.sigma_sq / cfg.eps;
  return ceil_clamp(std::min(history_term, accuracy_term), n);
}

std::size_t fixed_anchor_batch(const AbaConfig& cfg, std::size_t n) {
  return ceil_clamp(cfg.c_eps * cfg.sigma_sq / cfg.eps, n);
}

std::size_t abasgd_batch_size(std::span<const double> window_sq_norms, double sigma_sq,
                              double eps, const AbaSgdOptions& opts, std::size_t n) {
  const double mean = window_sq_norms.empty()
                          ? 0.0
                          : std::accumulate(window_sq_norms.begin(), window_sq_norms.end(), 0.0) /
                                static_cast<double>(window_sq_norms.size());
  const double history_term =
      mean > 0.0 ? opts.c_beta * sigma_sq / mean : std::numeric_limits<double>::infinity();
  return ceil_clamp(std::min(history_term, opts.c_eps * sigma_sq / eps), n);
}

std::size_t anchor_batch_size(const BatchSchedule& sched, std::size_t s, double beta_s,
                              const AbaConfig& cfg, std::size_t n) {
  struct Visitor {
    std::size_t s;
    double beta_s;
    const AbaConfig& cfg;
    std::size_t n;
    std::size_t operator()(const schedule::Fixed& f) const {
      return std::clamp<std::size_t>(f.size, 1, n);
    }
    std::size_t operator()(const schedule::Exponential& e) const {
      return ceil_clamp(std::pow(e.mu, static_cast<double>(s)), n);
    }
    std::size_t operator()(const schedule::Linear& l) const {
      return ceil_clamp(l.nu * static_cast<double>(s + 1), n);
    }
    std::size_t operator()(const schedule::Adaptive&) const {
      return adaptive_batch_size(beta_s, cfg, n);
    }
  };
  return std::visit(Visitor{s, beta_s, cfg, n}, sched);
}

std::string describe(const BatchSchedule& sched) {
  std::ostringstream os;
  std::visit(
      [&os](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, schedule::Fixed>) os << "fixed(" << v.size << ")";
        if constexpr (std::is_same_v<T, schedule::Exponential>) os << "exp(" << v.mu << ")";
        if constexpr (std::is_same_v<T, schedule::Linear>) os << "lin(" << v.nu << ")";
        if constexpr (std::is_same_v<T, schedule::Adaptive>) os << "adaptive";
      },
      sched);
  return os.str();
}

}  // namespace abavr
