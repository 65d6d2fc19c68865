#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include <Eigen/Core>

namespace abavr {

using Vector = Eigen::VectorXd;

/// f(x) = (1/n) sum_i f_i(x). Implementations are immutable after
/// construction and every method is safe to call concurrently.
///
/// The public entry points validate their arguments (dimension, index range,
/// nonempty batch) and throw std::invalid_argument on violation. The
/// accumulate_* hooks are the unchecked hot path used by the optimizers.
class FiniteSumObjective {
 public:
  virtual ~FiniteSumObjective() = default;

  virtual std::size_t size() const noexcept = 0;
  virtual std::size_t dim() const noexcept = 0;

  /// Upper bound on the per-component gradient Lipschitz constant, if known.
  virtual std::optional<double> lipschitz_hint() const { return std::nullopt; }

  double value(const Vector& x) const;
  double component_value(const Vector& x, std::size_t i) const;
  Vector component_grad(const Vector& x, std::size_t i) const;
  Vector full_grad(const Vector& x) const;
  /// Mean of component gradients over a multiset; duplicates count.
  Vector batch_grad(const Vector& x, std::span<const std::size_t> indices) const;
  /// Mean over the multiset of (grad f_i(x) - grad f_i(y)).
  Vector batch_grad_difference(const Vector& x, const Vector& y,
                               std::span<const std::size_t> indices) const;

  /// out += scale * grad f_i(x). No argument checks.
  virtual void accumulate_component_grad(const Vector& x, std::size_t i, double scale,
                                         Vector& out) const = 0;
  virtual void accumulate_component_grad_difference(const Vector& x, const Vector& y,
                                                    std::size_t i, double scale,
                                                    Vector& out) const;

 protected:
  virtual double unchecked_value(const Vector& x) const;
  virtual double unchecked_component_value(const Vector& x, std::size_t i) const = 0;

  void check_point(const Vector& x) const;
  void check_index(std::size_t i) const;
};

}  // namespace abavr
