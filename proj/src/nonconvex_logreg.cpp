#include "abavr/nonconvex_logreg.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "abavr/sampling.hpp"

namespace abavr {

double softplus(double t) { return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t))); }

double sigmoid(double t) {
  if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

NonconvexLogReg::NonconvexLogReg(SparseMatrix features, std::vector<double> labels,
                                 double reg_alpha)
    : features_(std::move(features)), labels_(std::move(labels)), reg_alpha_(reg_alpha) {
  if (features_.rows() == 0 || features_.cols() == 0) {
    throw std::invalid_argument("NonconvexLogReg: empty feature matrix");
  }
  if (static_cast<std::size_t>(features_.rows()) != labels_.size()) {
    throw std::invalid_argument("NonconvexLogReg: " + std::to_string(features_.rows()) +
                                " feature rows but " + std::to_string(labels_.size()) +
                                " labels");
  }
  for (double y : labels_) {
    if (y != 1.0 && y != -1.0) throw std::invalid_argument("NonconvexLogReg: labels must be +-1");
  }
  if (!(reg_alpha_ >= 0.0) || !std::isfinite(reg_alpha_)) {
    throw std::invalid_argument("NonconvexLogReg: reg_alpha must be finite and >= 0");
  }
  features_.makeCompressed();
  for (Eigen::Index i = 0; i < features_.rows(); ++i) {
    max_row_norm_sq_ = std::max(max_row_norm_sq_, features_.row(i).squaredNorm());
  }
}

NonconvexLogReg NonconvexLogReg::synthetic(std::size_t n, std::size_t d, std::uint64_t seed,
                                           double label_flip, double reg_alpha) {
  if (n == 0 || d == 0) throw std::invalid_argument("synthetic logreg: n and d must be positive");
  SeededRng rng(seed);
  Vector teacher(static_cast<Eigen::Index>(d));
  for (auto& t : teacher) t = rng.normal();
  Eigen::MatrixXd dense(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  std::vector<double> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) dense(i, j) = rng.normal();
    double y = dense.row(i).dot(teacher) >= 0 ? 1.0 : -1.0;
    if (rng.uniform() < label_flip) y = -y;
    labels[i] = y;
  }
  return NonconvexLogReg(dense.sparseView(), std::move(labels), reg_alpha);
}

std::optional<double> NonconvexLogReg::lipschitz_hint() const {
  return max_row_norm_sq_ / 4.0 + 2.0 * reg_alpha_;
}

double NonconvexLogReg::margin(const Vector& w, std::size_t i) const {
  double z = 0.0;
  for (SparseMatrix::InnerIterator it(features_, static_cast<Eigen::Index>(i)); it; ++it) {
    z += it.value() * w[it.index()];
  }
  return labels_[i] * z;
}

// d/dz of log(1 + exp(-y z)) is -y * sigmoid(-y z).
double NonconvexLogReg::loss_slope(const Vector& w, std::size_t i) const {
  return -labels_[i] * sigmoid(-margin(w, i));
}

double NonconvexLogReg::regularizer(const Vector& w) const {
  double r = 0.0;
  for (double wj : w) {
    const double sq = wj * wj;
    r += sq / (1.0 + sq);
  }
  return reg_alpha_ * r;
}

double NonconvexLogReg::unchecked_value(const Vector& x) const {
  double loss = 0.0;
  for (std::size_t i = 0; i < size(); ++i) loss += softplus(-margin(x, i));
  return loss / static_cast<double>(size()) + regularizer(x);
}

double NonconvexLogReg::unchecked_component_value(const Vector& x, std::size_t i) const {
  return softplus(-margin(x, i)) + regularizer(x);
}

void NonconvexLogReg::accumulate_component_grad(const Vector& x, std::size_t i, double scale,
                                                Vector& out) const {
  const double c = scale * loss_slope(x, i);
  for (SparseMatrix::InnerIterator it(features_, static_cast<Eigen::Index>(i)); it; ++it) {
    out[it.index()] += c * it.value();
  }
  if (reg_alpha_ == 0.0) return;
  const double k = 2.0 * reg_alpha_ * scale;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double den = 1.0 + x[j] * x[j];
    out[j] += k * x[j] / (den * den);
  }
}

void NonconvexLogReg::accumulate_component_grad_difference(const Vector& x, const Vector& y,
                                                           std::size_t i, double scale,
                                                           Vector& out) const {
  const double c = scale * (loss_slope(x, i) - loss_slope(y, i));
  for (SparseMatrix::InnerIterator it(features_, static_cast<Eigen::Index>(i)); it; ++it) {
    out[it.index()] += c * it.value();
  }
  if (reg_alpha_ == 0.0) return;
  const double k = 2.0 * reg_alpha_ * scale;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double dx = 1.0 + x[j] * x[j];
    const double dy = 1.0 + y[j] * y[j];
    out[j] += k * (x[j] / (dx * dx) - y[j] / (dy * dy));
  }
}

}  // namespace abavr
