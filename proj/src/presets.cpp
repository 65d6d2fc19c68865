#include "abavr/presets.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace abavr {

PlPreset pl_theorem_preset(double L, double tau, double c_eta, Estimator estimator, double eps,
                           double sigma_sq, std::size_t epochs) {
  if (!(c_eta > 4.0)) throw std::invalid_argument("pl preset: c_eta must be > 4");
  if (!(L > 0.0) || !(tau > 0.0)) throw std::invalid_argument("pl preset: L and tau must be > 0");
  const double Lt = L * tau;
  const auto m = static_cast<std::size_t>(std::ceil(8.0 * Lt / (c_eta - 2.0)));
  if (!(static_cast<double>(m) < 4.0 * Lt)) {
    throw std::invalid_argument("pl preset: no epoch length in [8 L tau / (c_eta - 2), 4 L tau) for L tau = " +
                                std::to_string(Lt));
  }
  PlPreset p;
  p.L = L;
  p.tau = tau;
  p.gamma_hat = 1.0 - 1.0 / (8.0 * Lt);
  const double tail = 2.0 * tau / (1.0 - std::exp(-4.0 / (c_eta * (c_eta - 2.0))));
  const double c = std::max(2.0 * tau + tail, 16.0 * c_eta * Lt / static_cast<double>(m));
  AbaConfig& cfg = p.cfg;
  cfg.eta = 1.0 / (c_eta * L);
  cfg.m = std::max<std::size_t>(m, 1);
  cfg.B = estimator == Estimator::svrg ? cfg.m * cfg.m : cfg.m;
  cfg.c_beta = c;
  cfg.c_eps = c;
  cfg.eps = eps;
  cfg.sigma_sq = sigma_sq;
  cfg.max_epochs = epochs;
  cfg.beta_init = eps * std::pow(p.gamma_hat, -static_cast<double>(cfg.m) *
                                                  static_cast<double>(epochs > 0 ? epochs - 1 : 0));
  return p;
}

AbaConfig svrg_corollary_preset(double L, std::size_t m, double eps, double sigma_sq,
                                std::size_t epochs) {
  AbaConfig cfg;
  cfg.eta = 1.0 / (4.0 * L);
  cfg.m = m;
  cfg.B = m * m;
  cfg.c_beta = cfg.c_eps = 16.0;
  cfg.eps = eps;
  cfg.sigma_sq = sigma_sq;
  cfg.max_epochs = epochs;
  return cfg;
}

AbaConfig spider_corollary_preset(double L, std::size_t n, double eps, double sigma_sq,
                                  std::size_t epochs) {
  const double scale = std::min(static_cast<double>(n), 1.0 / eps);
  AbaConfig cfg;
  cfg.B = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(scale))));
  cfg.m = std::max<std::size_t>(1, static_cast<std::size_t>(std::round(scale / static_cast<double>(cfg.B))));
  cfg.eta = std::sqrt(static_cast<double>(cfg.B) / static_cast<double>(cfg.m)) / (4.0 * L);
  cfg.c_beta = cfg.c_eps = 16.0;
  cfg.eps = eps;
  cfg.sigma_sq = sigma_sq;
  cfg.max_epochs = epochs;
  return cfg;
}

}  // namespace abavr
