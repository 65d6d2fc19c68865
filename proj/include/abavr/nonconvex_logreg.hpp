#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/SparseCore>

#include "abavr/objective.hpp"

namespace abavr {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Binary logistic regression with the bounded nonconvex regularizer
///   f_i(w) = log(1 + exp(-y_i * <w, x_i>)) + alpha * sum_j w_j^2 / (1 + w_j^2).
/// Labels must be in {-1, +1}.
class NonconvexLogReg final : public FiniteSumObjective {
 public:
  NonconvexLogReg(SparseMatrix features, std::vector<double> labels, double reg_alpha = 0.1);

  /// Gaussian features, labels from a random linear teacher with a fraction
  /// of flipped labels so the problem is not separable.
  static NonconvexLogReg synthetic(std::size_t n, std::size_t d, std::uint64_t seed,
                                   double label_flip = 0.1, double reg_alpha = 0.1);

  std::size_t size() const noexcept override { return labels_.size(); }
  std::size_t dim() const noexcept override { return static_cast<std::size_t>(features_.cols()); }
  /// max_i ||x_i||^2 / 4 + 2 alpha: the logistic curvature is at most 1/4 and
  /// the regularizer curvature at most 2 alpha.
  std::optional<double> lipschitz_hint() const override;

  double reg_alpha() const noexcept { return reg_alpha_; }
  const SparseMatrix& features() const noexcept { return features_; }
  const std::vector<double>& labels() const noexcept { return labels_; }

  void accumulate_component_grad(const Vector& x, std::size_t i, double scale,
                                 Vector& out) const override;
  void accumulate_component_grad_difference(const Vector& x, const Vector& y, std::size_t i,
                                            double scale, Vector& out) const override;

 protected:
  double unchecked_value(const Vector& x) const override;
  double unchecked_component_value(const Vector& x, std::size_t i) const override;

 private:
  double margin(const Vector& w, std::size_t i) const;
  double loss_slope(const Vector& w, std::size_t i) const;
  double regularizer(const Vector& w) const;

  SparseMatrix features_;
  std::vector<double> labels_;
  double reg_alpha_;
  double max_row_norm_sq_ = 0.0;
};

/// log(1 + exp(t)) without overflow.
double softplus(double t);
/// 1 / (1 + exp(-t)) without overflow.
double sigmoid(double t);

}  // namespace abavr
