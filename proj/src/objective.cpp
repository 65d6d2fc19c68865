#include "abavr/objective.hpp"

#include <stdexcept>
#include <string>

namespace abavr {

void FiniteSumObjective::check_point(const Vector& x) const {
  if (static_cast<std::size_t>(x.size()) != dim()) {
    throw std::invalid_argument("dimension mismatch: expected " + std::to_string(dim()) +
                                ", got " + std::to_string(x.size()));
  }
}

void FiniteSumObjective::check_index(std::size_t i) const {
  if (i >= size()) {
    throw std::invalid_argument("component index " + std::to_string(i) +
                                " out of range [0, " + std::to_string(size()) + ")");
  }
}

double FiniteSumObjective::value(const Vector& x) const {
  check_point(x);
  return unchecked_value(x);
}

double FiniteSumObjective::component_value(const Vector& x, std::size_t i) const {
  check_point(x);
  check_index(i);
  return unchecked_component_value(x, i);
}

double FiniteSumObjective::unchecked_value(const Vector& x) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < size(); ++i) sum += unchecked_component_value(x, i);
  return sum / static_cast<double>(size());
}

Vector FiniteSumObjective::component_grad(const Vector& x, std::size_t i) const {
  check_point(x);
  check_index(i);
  Vector g = Vector::Zero(static_cast<Eigen::Index>(dim()));
  accumulate_component_grad(x, i, 1.0, g);
  return g;
}

Vector FiniteSumObjective::full_grad(const Vector& x) const {
  check_point(x);
  Vector g = Vector::Zero(static_cast<Eigen::Index>(dim()));
  for (std::size_t i = 0; i < size(); ++i) accumulate_component_grad(x, i, 1.0, g);
  g /= static_cast<double>(size());
  return g;
}

Vector FiniteSumObjective::batch_grad(const Vector& x,
                                      std::span<const std::size_t> indices) const {
  check_point(x);
  if (indices.empty()) throw std::invalid_argument("batch_grad: empty index multiset");
  for (auto i : indices) check_index(i);
  Vector g = Vector::Zero(static_cast<Eigen::Index>(dim()));
  for (auto i : indices) accumulate_component_grad(x, i, 1.0, g);
  g /= static_cast<double>(indices.size());
  return g;
}

Vector FiniteSumObjective::batch_grad_difference(const Vector& x, const Vector& y,
                                                 std::span<const std::size_t> indices) const {
  check_point(x);
  check_point(y);
  if (indices.empty()) throw std::invalid_argument("batch_grad_difference: empty batch");
  for (auto i : indices) check_index(i);
  Vector g = Vector::Zero(static_cast<Eigen::Index>(dim()));
  for (auto i : indices) accumulate_component_grad_difference(x, y, i, 1.0, g);
  g /= static_cast<double>(indices.size());
  return g;
}

void FiniteSumObjective::accumulate_component_grad_difference(const Vector& x, const Vector& y,
                                                              std::size_t i, double scale,
                                                              Vector& out) const {
  accumulate_component_grad(x, i, scale, out);
  accumulate_component_grad(y, i, -scale, out);
}

}  // namespace abavr
