#include "abavr/policies.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "abavr/mdp.hpp"

namespace abavr {

SoftmaxPolicy::SoftmaxPolicy(std::size_t states, std::size_t actions, std::vector<Vector> features)
    : states_(states), actions_(actions), dim_(0), features_(std::move(features)) {
  if (states_ == 0 || actions_ == 0) throw std::invalid_argument("SoftmaxPolicy: empty state/action set");
  if (features_.size() != states_ * actions_) {
    throw std::invalid_argument("SoftmaxPolicy: need one feature vector per (s, a)");
  }
  dim_ = static_cast<std::size_t>(features_.front().size());
  for (const auto& f : features_) {
    if (static_cast<std::size_t>(f.size()) != dim_) {
      throw std::invalid_argument("SoftmaxPolicy: feature dimensions differ");
    }
  }
}

SoftmaxPolicy SoftmaxPolicy::tabular(std::size_t states, std::size_t actions) {
  const auto d = static_cast<Eigen::Index>(states * actions);
  std::vector<Vector> features;
  for (Eigen::Index k = 0; k < d; ++k) features.push_back(Vector::Unit(d, k));
  return SoftmaxPolicy(states, actions, std::move(features));
}

SoftmaxPolicy SoftmaxPolicy::action_affine(std::size_t states, std::size_t actions) {
  const auto d = static_cast<Eigen::Index>(2 * actions);
  const double scale = states > 1 ? 1.0 / static_cast<double>(states - 1) : 0.0;
  std::vector<Vector> features;
  for (std::size_t s = 0; s < states; ++s) {
    for (std::size_t a = 0; a < actions; ++a) {
      Vector f = Vector::Zero(d);
      f[static_cast<Eigen::Index>(2 * a)] = 1.0;
      f[static_cast<Eigen::Index>(2 * a + 1)] = static_cast<double>(s) * scale;
      features.push_back(std::move(f));
    }
  }
  return SoftmaxPolicy(states, actions, std::move(features));
}

void SoftmaxPolicy::check(const Vector& theta, std::size_t s) const {
  if (static_cast<std::size_t>(theta.size()) != dim_) {
    throw std::invalid_argument("SoftmaxPolicy: theta has dimension " +
                                std::to_string(theta.size()) + ", expected " + std::to_string(dim_));
  }
  if (s >= states_) throw std::invalid_argument("SoftmaxPolicy: state out of range");
}

Vector SoftmaxPolicy::logits(const Vector& theta, std::size_t s) const {
  check(theta, s);
  Vector z(static_cast<Eigen::Index>(actions_));
  for (std::size_t a = 0; a < actions_; ++a) z[static_cast<Eigen::Index>(a)] = feature(s, a).dot(theta);
  return z;
}

Vector SoftmaxPolicy::probabilities(const Vector& theta, std::size_t s) const {
  Vector z = logits(theta, s);
  const double top = z.maxCoeff();
  Vector p = (z.array() - top).exp().matrix();
  p /= p.sum();
  return p;
}

double SoftmaxPolicy::log_prob(const Vector& theta, std::size_t s, std::size_t a) const {
  if (a >= actions_) throw std::invalid_argument("SoftmaxPolicy: action out of range");
  const Vector z = logits(theta, s);
  const double top = z.maxCoeff();
  const double log_norm = top + std::log((z.array() - top).exp().sum());
  return z[static_cast<Eigen::Index>(a)] - log_norm;
}

Vector SoftmaxPolicy::grad_log_prob(const Vector& theta, std::size_t s, std::size_t a) const {
  if (a >= actions_) throw std::invalid_argument("SoftmaxPolicy: action out of range");
  const Vector p = probabilities(theta, s);
  Vector g = feature(s, a);
  for (std::size_t b = 0; b < actions_; ++b) g -= p[static_cast<Eigen::Index>(b)] * feature(s, b);
  return g;
}

std::size_t SoftmaxPolicy::sample(const Vector& theta, std::size_t s, SeededRng& rng) const {
  const Vector p = probabilities(theta, s);
  return sample_categorical(p.data(), actions_, rng);
}

void GaussianPolicy::check(const Vector& theta) const {
  if (theta.size() != 3) throw std::invalid_argument("GaussianPolicy: theta must have 3 entries");
}

double GaussianPolicy::mean(const Vector& theta, double s) const {
  check(theta);
  return theta[0] * s + theta[1];
}

double GaussianPolicy::std_dev(const Vector& theta) const {
  check(theta);
  return std::max(std::exp(theta[2]), kMinStdDev);
}

double GaussianPolicy::log_prob(const Vector& theta, double s, double a) const {
  const double sd = std_dev(theta);
  const double z = (a - mean(theta, s)) / sd;
  return -0.5 * z * z - std::log(sd) - 0.5 * std::log(2.0 * std::numbers::pi);
}

Vector GaussianPolicy::grad_log_prob(const Vector& theta, double s, double a) const {
  const double sd = std_dev(theta);
  const double diff = a - mean(theta, s);
  const double z = diff / sd;
  Vector g(3);
  g[0] = diff / (sd * sd) * s;
  g[1] = diff / (sd * sd);
  g[2] = std::exp(theta[2]) > kMinStdDev ? z * z - 1.0 : 0.0;
  return g;
}

double GaussianPolicy::sample(const Vector& theta, double s, SeededRng& rng) const {
  return mean(theta, s) + std_dev(theta) * rng.normal();
}

}  // namespace abavr
