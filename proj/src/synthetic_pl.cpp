#include "abavr/synthetic_pl.hpp"

#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "abavr/sampling.hpp"

namespace abavr {

SyntheticPL::SyntheticPL(RowMatrix rows, Vector minimizer)
    : rows_(std::move(rows)), minimizer_(std::move(minimizer)) {
  if (rows_.rows() == 0 || rows_.cols() == 0) {
    throw std::invalid_argument("SyntheticPL: empty design matrix");
  }
  if (minimizer_.size() != rows_.cols()) {
    throw std::invalid_argument("SyntheticPL: minimizer dimension mismatch");
  }
  targets_ = rows_ * minimizer_;
  smoothness_ = rows_.rowwise().squaredNorm().maxCoeff();
  const Eigen::MatrixXd hessian =
      (rows_.transpose() * rows_) / static_cast<double>(rows_.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hessian, Eigen::EigenvaluesOnly);
  hessian_min_ = eig.eigenvalues().minCoeff();
  hessian_max_ = eig.eigenvalues().maxCoeff();
  if (!(hessian_min_ > 0.0)) {
    throw std::invalid_argument("SyntheticPL: A^T A / n is singular; no PL constant");
  }
}

SyntheticPL SyntheticPL::generate(std::size_t n, std::size_t d, std::uint64_t seed) {
  if (n < d) throw std::invalid_argument("SyntheticPL: need n >= d for strong convexity");
  SeededRng rng(seed);
  RowMatrix rows(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    for (Eigen::Index j = 0; j < rows.cols(); ++j) rows(i, j) = rng.normal();
  }
  Vector x_star(static_cast<Eigen::Index>(d));
  for (auto& v : x_star) v = rng.normal();
  return SyntheticPL(std::move(rows), std::move(x_star));
}

double SyntheticPL::unchecked_component_value(const Vector& x, std::size_t i) const {
  const auto row = static_cast<Eigen::Index>(i);
  const double r = rows_.row(row).dot(x) - targets_[row];
  return 0.5 * r * r;
}

void SyntheticPL::accumulate_component_grad(const Vector& x, std::size_t i, double scale,
                                            Vector& out) const {
  const auto row = static_cast<Eigen::Index>(i);
  const double r = rows_.row(row).dot(x) - targets_[row];
  out.noalias() += (scale * r) * rows_.row(row).transpose();
}

void SyntheticPL::accumulate_component_grad_difference(const Vector& x, const Vector& y,
                                                       std::size_t i, double scale,
                                                       Vector& out) const {
  const auto row = static_cast<Eigen::Index>(i);
  const double r = rows_.row(row).dot(x) - rows_.row(row).dot(y);
  out.noalias() += (scale * r) * rows_.row(row).transpose();
}

}  // namespace abavr
