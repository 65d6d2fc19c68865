#pragma once

#include <cstddef>

#include "abavr/vr_algorithms.hpp"
#include "abavr/vr_config.hpp"

namespace abavr {

/// Parameters of the linear-rate results under gradient dominance:
///   eta = 1 / (c_eta L), m = ceil(8 L tau / (c_eta - 2)) (< 4 L tau),
///   B = m^2 (svrg) or m (spider), gamma_hat = 1 - 1 / (8 L tau),
///   c_beta = c_eps = max(2 tau + 2 tau / (1 - exp(-4 / (c_eta (c_eta - 2)))), 16 c_eta L tau / m),
///   beta_1 = eps gamma_hat^{-m (S - 1)}.
struct PlPreset {
  AbaConfig cfg;
  double gamma_hat;
  double L;
  double tau;
};

/// Throws std::invalid_argument when c_eta <= 4 or no integer m fits the
/// window [8 L tau / (c_eta - 2), 4 L tau).
PlPreset pl_theorem_preset(double L, double tau, double c_eta, Estimator estimator, double eps,
                           double sigma_sq, std::size_t epochs);

/// AbaSVRG nonconvex preset: eta = 1 / (4 L), B = m^2, c_beta = c_eps = 16.
AbaConfig svrg_corollary_preset(double L, std::size_t m, double eps, double sigma_sq,
                                std::size_t epochs);

/// AbaSPIDER nonconvex preset: B = floor(sqrt(n ^ 1/eps)), m = (n ^ 1/eps) / B,
/// eta = sqrt(B / m) / (4 L), c_beta = c_eps = 16.
AbaConfig spider_corollary_preset(double L, std::size_t n, double eps, double sigma_sq,
                                  std::size_t epochs);

}  // namespace abavr
