#pragma once

#include <cstddef>

#include "abavr/objective.hpp"
#include "abavr/sampling.hpp"

namespace abavr {

/// Empirical component-gradient variance (1/k) sum ||grad f_i(x) - mean||^2
/// over a pilot of k = min(n, pilot) components drawn without replacement.
double estimate_sigma_sq(const FiniteSumObjective& obj, const Vector& x, SeededRng& rng,
                         std::size_t pilot = 1000);

/// Exact (1/n) sum ||grad f_i(x) - grad f(x)||^2.
double component_gradient_variance(const FiniteSumObjective& obj, const Vector& x);

/// max ||grad f_i(u) - grad f_i(v)|| / ||u - v|| over random pairs near x.
double estimate_lipschitz(const FiniteSumObjective& obj, const Vector& x, SeededRng& rng,
                          std::size_t pairs = 200, double radius = 1.0);

}  // namespace abavr
