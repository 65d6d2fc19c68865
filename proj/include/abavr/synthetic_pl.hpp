#pragma once

#include <cstdint>

#include <Eigen/Core>

#include "abavr/objective.hpp"

namespace abavr {

/// Consistent least squares f_i(x) = 0.5 (<a_i, x> - b_i)^2 with b = A x*.
/// With A^T A / n positive definite this is strongly convex, hence
/// tau-gradient dominated with tau = 1 / (2 lambda_min(A^T A / n)), and
/// f* = f(x*) = 0.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class SyntheticPL final : public FiniteSumObjective {
 public:
  SyntheticPL(RowMatrix rows, Vector minimizer);

  /// Rows are i.i.d. standard normal; x* is standard normal.
  static SyntheticPL generate(std::size_t n, std::size_t d, std::uint64_t seed);

  std::size_t size() const noexcept override { return static_cast<std::size_t>(rows_.rows()); }
  std::size_t dim() const noexcept override { return static_cast<std::size_t>(rows_.cols()); }
  /// Component smoothness max_i ||a_i||^2.
  std::optional<double> lipschitz_hint() const override { return smoothness_; }

  const Vector& minimizer() const noexcept { return minimizer_; }
  double min_value() const noexcept { return 0.0; }
  double smoothness() const noexcept { return smoothness_; }
  /// Gradient-dominance constant tau.
  double pl_constant() const noexcept { return 0.5 / hessian_min_; }
  double hessian_min_eigenvalue() const noexcept { return hessian_min_; }
  /// Smoothness of f itself (largest Hessian eigenvalue).
  double hessian_max_eigenvalue() const noexcept { return hessian_max_; }

  void accumulate_component_grad(const Vector& x, std::size_t i, double scale,
                                 Vector& out) const override;
  void accumulate_component_grad_difference(const Vector& x, const Vector& y, std::size_t i,
                                            double scale, Vector& out) const override;

 protected:
  double unchecked_component_value(const Vector& x, std::size_t i) const override;

 private:
  RowMatrix rows_;
  Vector targets_;
  Vector minimizer_;
  double smoothness_ = 0.0;
  double hessian_min_ = 0.0;
  double hessian_max_ = 0.0;
};

}  // namespace abavr
