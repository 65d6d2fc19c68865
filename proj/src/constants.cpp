#include "abavr/constants.hpp"

#include <algorithm>

namespace abavr {

namespace {

double spread(const FiniteSumObjective& obj, const Vector& x, const IndexList& idx) {
  std::vector<Vector> grads;
  grads.reserve(idx.size());
  Vector mean = Vector::Zero(x.size());
  for (auto i : idx) {
    grads.push_back(obj.component_grad(x, i));
    mean += grads.back();
  }
  mean /= static_cast<double>(idx.size());
  double total = 0.0;
  for (const auto& g : grads) total += (g - mean).squaredNorm();
  return total / static_cast<double>(idx.size());
}

}  // namespace

double estimate_sigma_sq(const FiniteSumObjective& obj, const Vector& x, SeededRng& rng,
                         std::size_t pilot) {
  const std::size_t k = std::min(obj.size(), std::max<std::size_t>(pilot, 1));
  return spread(obj, x, sample_without_replacement(obj.size(), k, rng));
}

double component_gradient_variance(const FiniteSumObjective& obj, const Vector& x) {
  IndexList all(obj.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return spread(obj, x, all);
}

double estimate_lipschitz(const FiniteSumObjective& obj, const Vector& x, SeededRng& rng,
                          std::size_t pairs, double radius) {
  double best = 0.0;
  const auto d = static_cast<Eigen::Index>(obj.dim());
  for (std::size_t p = 0; p < pairs; ++p) {
    Vector u(d), v(d);
    for (Eigen::Index j = 0; j < d; ++j) {
      u[j] = x[j] + radius * rng.normal();
      v[j] = u[j] + radius * rng.normal();
    }
    const double gap = (u - v).norm();
    if (gap == 0.0) continue;
    const std::size_t i = rng.uniform_index(obj.size());
    best = std::max(best, (obj.component_grad(u, i) - obj.component_grad(v, i)).norm() / gap);
  }
  return best;
}

}  // namespace abavr
