#include "abavr/verify_suite.hpp"

#include <algorithm>
#include <stdexcept>

#include "abavr/checks.hpp"
#include "abavr/constants.hpp"
#include "abavr/exact_gradient.hpp"
#include "abavr/mdp.hpp"
#include "abavr/nonconvex_logreg.hpp"
#include "abavr/policies.hpp"
#include "abavr/presets.hpp"
#include "abavr/synthetic_pl.hpp"
#include "abavr/vr_algorithms.hpp"

namespace abavr {

namespace {

Vector random_point(Eigen::Index d, double scale, SeededRng& rng) {
  Vector x(d);
  for (Eigen::Index j = 0; j < d; ++j) x[j] = scale * rng.normal();
  return x;
}

/// Worst finite-difference error over `points` random (x, i) pairs.
CheckReport component_fd(const std::string& name, const FiniteSumObjective& obj,
                         std::size_t points, double scale, double fixed_step,
                         std::uint64_t seed) {
  SeededRng rng(seed);
  CheckReport worst;
  worst.name = name;
  worst.passed = true;
  for (std::size_t k = 0; k < points; ++k) {
    const Vector x = random_point(static_cast<Eigen::Index>(obj.dim()), scale, rng);
    const std::size_t i = rng.uniform_index(obj.size());
    const double step = fixed_step > 0.0 ? fixed_step : default_fd_step(x);
    const auto rep = finite_diff_check(
        name, [&](const Vector& p) { return obj.component_value(p, i); },
        [&](const Vector& p) { return obj.component_grad(p, i); }, x, step);
    if (k == 0 || rep.measured > worst.measured) {
      worst.measured = rep.measured;
      worst.tolerance = rep.tolerance;
      worst.detail = "worst of " + std::to_string(points) + " points; " + rep.detail;
    }
    worst.passed = worst.passed && rep.passed;
  }
  worst.sample_size = points;
  worst.seed = seed;
  return worst;
}

std::vector<CheckReport> core_suite(std::uint64_t seed) {
  std::vector<CheckReport> out;
  std::uint64_t counter = 0;
  auto next_seed = [&] { return mix_seed(seed, ++counter); };

  // Gradients.
  const auto logreg = NonconvexLogReg::synthetic(200, 10, next_seed());
  out.push_back(component_fd("finite_diff/logreg", logreg, 100, 1.0, 0.0, next_seed()));
  const auto pl = SyntheticPL::generate(500, 5, next_seed());
  out.push_back(component_fd("finite_diff/synthetic_pl", pl, 100, 1.0, 1e-3, next_seed()));

  const auto mdp = TabularMdp::chain5();
  const auto softmax = SoftmaxPolicy::action_affine(mdp.num_states(), mdp.num_actions());
  {
    SeededRng rng(next_seed());
    CheckReport rep;
    rep.name = "finite_diff/softmax_log_prob";
    rep.passed = true;
    for (int k = 0; k < 100; ++k) {
      const Vector theta = random_point(static_cast<Eigen::Index>(softmax.dim()), 1.0, rng);
      const std::size_t s = rng.uniform_index(mdp.num_states());
      const std::size_t a = rng.uniform_index(mdp.num_actions());
      const auto r = finite_diff_check(
          rep.name, [&](const Vector& t) { return softmax.log_prob(t, s, a); },
          [&](const Vector& t) { return softmax.grad_log_prob(t, s, a); }, theta,
          default_fd_step(theta));
      rep.measured = std::max(rep.measured, r.measured);
      rep.tolerance = r.tolerance;
      rep.passed = rep.passed && r.passed;
    }
    rep.sample_size = 100;
    out.push_back(rep);
  }
  {
    SeededRng rng(next_seed());
    const GaussianPolicy gauss;
    CheckReport rep;
    rep.name = "finite_diff/gaussian_log_prob";
    rep.passed = true;
    for (int k = 0; k < 100; ++k) {
      Vector theta = random_point(3, 0.5, rng);
      const double s = rng.normal();
      const double a = gauss.sample(theta, s, rng);
      const auto r = finite_diff_check(
          rep.name, [&](const Vector& t) { return gauss.log_prob(t, s, a); },
          [&](const Vector& t) { return gauss.grad_log_prob(t, s, a); }, theta,
          default_fd_step(theta));
      rep.measured = std::max(rep.measured, r.measured);
      rep.tolerance = r.tolerance;
      rep.passed = rep.passed && r.passed;
    }
    rep.sample_size = 100;
    out.push_back(rep);
  }
  {
    SeededRng rng(next_seed());
    const Vector theta = random_point(static_cast<Eigen::Index>(softmax.dim()), 0.5, rng);
    auto rep = finite_diff_check(
        "finite_diff/exact_J", [&](const Vector& t) { return exact_policy_gradient(mdp, softmax, t).J; },
        [&](const Vector& t) { return exact_policy_gradient(mdp, softmax, t).grad; }, theta, 1e-5,
        1e-6);
    out.push_back(rep);
  }

  // Batch-mean statistics.
  {
    SeededRng rng(next_seed());
    const Vector x = random_point(static_cast<Eigen::Index>(logreg.dim()), 0.5, rng);
    const std::size_t sizes[] = {2, 8, 32};
    for (auto N : sizes) out.push_back(sample_mean_variance_check(logreg, x, N, 10000, next_seed()));
    out.push_back(variance_slope_check(logreg, x, sizes, 10000, next_seed()));
    out.push_back(negative_control(
        sample_mean_variance_check(logreg, x, logreg.size(), 1000, next_seed(), false)));
  }

  // Linear rate under gradient dominance.
  {
    const Vector x0 = Vector::Zero(static_cast<Eigen::Index>(pl.dim()));
    const double sigma_sq = component_gradient_variance(pl, x0);
    for (auto est : {Estimator::svrg, Estimator::spider}) {
      const auto preset = pl_theorem_preset(pl.smoothness(), pl.pl_constant(), 5.0, est, 1e-8,
                                            sigma_sq, 20);
      const PlRateOptions opts{preset.gamma_hat, preset.cfg.m, preset.cfg.eps};
      const std::uint64_t s = next_seed();
      SeededRng rng(s);
      const auto trace = est == Estimator::svrg ? run_abasvrg(pl, preset.cfg, x0, rng)
                                                : run_abaspider(pl, preset.cfg, x0, rng);
      out.push_back(pl_rate_check(trace, pl, opts));
      AbaConfig bad = preset.cfg;
      bad.eta = 2.0 / pl.hessian_max_eigenvalue();
      SeededRng rng2(s);
      const auto bad_trace = est == Estimator::svrg ? run_abasvrg(pl, bad, x0, rng2)
                                                    : run_abaspider(pl, bad, x0, rng2);
      auto rep = pl_rate_check(bad_trace, pl, opts);
      rep.name += "/eta=2/L";
      out.push_back(negative_control(rep));
    }
  }

  // Policy-gradient estimators and importance weights.
  {
    const Vector theta = Vector::Zero(static_cast<Eigen::Index>(softmax.dim()));
    for (auto kind : {GradKind::reinforce, GradKind::gpomdp}) {
      out.push_back(rl_unbiasedness_check(mdp, softmax, theta, kind, 100000, next_seed()));
    }
    Vector shifted = theta;
    shifted[0] += 0.5;
    out.push_back(negative_control(policy_gradient_mean_check(
        "rl_unbiased/score_at_other_theta", mdp, softmax, theta, shifted, GradKind::gpomdp,
        100000, next_seed(), false)));
    out.push_back(policy_gradient_mean_check("rl_unbiased/importance_weighted_snapshot", mdp,
                                             softmax, theta, shifted, GradKind::gpomdp, 100000,
                                             next_seed(), true));
    Vector target = theta;
    target[1] -= 0.5;
    target[3] += 0.5;
    out.push_back(importance_weight_mean_check(mdp, softmax, theta, target, 100000, next_seed()));
    out.push_back(negative_control(
        importance_weight_mean_check(mdp, softmax, theta, target, 100000, next_seed(), true)));
    Vector direction = Vector::Ones(static_cast<Eigen::Index>(softmax.dim()));
    direction[0] = -1.0;
    const double radii[] = {0.0, 0.1, 0.5};
    out.push_back(importance_weight_variance_check(mdp, softmax, theta, direction, radii, 100000,
                                                   next_seed()));
    const double reversed[] = {0.5, 0.1, 0.0};
    auto rev = importance_weight_variance_check(mdp, softmax, theta, direction, reversed, 100000,
                                                next_seed());
    rev.name += "/reversed_radii";
    out.push_back(negative_control(rev));
  }
  return out;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"core"};
  return names;
}

std::vector<CheckReport> run_suite(const std::string& name, std::uint64_t seed) {
  if (name == "core") {
    auto reports = core_suite(seed);
    for (auto& r : reports) {
      if (r.seed == 0) r.seed = seed;
    }
    return reports;
  }
  throw std::invalid_argument("unknown suite '" + name + "'");
}

}  // namespace abavr
