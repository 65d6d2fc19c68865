// One line per acceptance criterion; exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "abavr/batch_rules.hpp"
#include "abavr/checks.hpp"
#include "abavr/constants.hpp"
#include "abavr/exact_gradient.hpp"
#include "abavr/experiment_config.hpp"
#include "abavr/libsvm.hpp"
#include "abavr/nonconvex_logreg.hpp"
#include "abavr/policies.hpp"
#include "abavr/presets.hpp"
#include "abavr/rl_algorithms.hpp"
#include "abavr/runner.hpp"
#include "abavr/synthetic_pl.hpp"
#include "abavr/vr_algorithms.hpp"

using namespace abavr;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool passed = true;
  std::string summary;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string g(double v) { return fmt("%.4g", v); }

int failures = 0;

void criterion(int id, const char* title, double limit_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = secs < limit_s;
  const bool ok = out.passed && in_time;
  if (!ok) ++failures;
  std::printf("[%s] criterion %d %s: %s; runtime %.2f s (limit %g s%s)\n", ok ? "PASS" : "FAIL",
              id, title, out.summary.c_str(), secs, limit_s, in_time ? "" : ", exceeded");
  std::fflush(stdout);
}

Vector random_point(SeededRng& rng, std::size_t d, double scale) {
  Vector x(static_cast<Eigen::Index>(d));
  for (auto& v : x) v = scale * rng.normal();
  return x;
}

/// Worst relative error over `points` random evaluations.
double worst_fd(std::size_t points, const std::function<double(SeededRng&, Vector&,
                                                               ValueFn&, GradFn&)>& draw,
                std::uint64_t seed) {
  SeededRng rng(seed);
  double worst = 0.0;
  for (std::size_t k = 0; k < points; ++k) {
    Vector x;
    ValueFn f;
    GradFn grad;
    const double step = draw(rng, x, f, grad);
    worst = std::max(worst, finite_diff_max_rel_error(f, grad, x, step));
  }
  return worst;
}

Outcome gradient_correctness() {
  const auto logreg = NonconvexLogReg::synthetic(1000, 20, 42);
  const auto pl = SyntheticPL::generate(500, 5, 3);
  const auto softmax = SoftmaxPolicy::action_affine(5, 2);
  const GaussianPolicy gauss;
  auto component = [](const FiniteSumObjective& obj, double fixed_step) {
    return [&obj, fixed_step](SeededRng& rng, Vector& x, ValueFn& f, GradFn& grad) {
      x = random_point(rng, obj.dim(), 1.0);
      const std::size_t i = rng.uniform_index(obj.size());
      f = [&obj, i](const Vector& p) { return obj.component_value(p, i); };
      grad = [&obj, i](const Vector& p) { return obj.component_grad(p, i); };
      return fixed_step > 0 ? fixed_step : default_fd_step(x);
    };
  };
  // Quadratic components: the truncation error vanishes, so a wider step
  // only reduces cancellation.
  const double e_logreg = worst_fd(100, component(logreg, 0.0), 11);
  const double e_pl = worst_fd(100, component(pl, 1e-3), 12);
  const double e_softmax = worst_fd(
      100,
      [&](SeededRng& rng, Vector& x, ValueFn& f, GradFn& grad) {
        x = random_point(rng, softmax.dim(), 1.0);
        const std::size_t s = rng.uniform_index(5), a = rng.uniform_index(2);
        f = [&softmax, s, a](const Vector& t) { return softmax.log_prob(t, s, a); };
        grad = [&softmax, s, a](const Vector& t) { return softmax.grad_log_prob(t, s, a); };
        return default_fd_step(x);
      },
      13);
  const double e_gauss = worst_fd(
      100,
      [&](SeededRng& rng, Vector& x, ValueFn& f, GradFn& grad) {
        x = random_point(rng, 3, 0.5);
        const double s = rng.normal();
        const double a = gauss.sample(x, s, rng);
        f = [&gauss, s, a](const Vector& t) { return gauss.log_prob(t, s, a); };
        grad = [&gauss, s, a](const Vector& t) { return gauss.grad_log_prob(t, s, a); };
        return default_fd_step(x);
      },
      14);
  const double worst = std::max({e_logreg, e_pl, e_softmax, e_gauss});
  return {worst < 1e-5, "max relative error logreg " + g(e_logreg) + ", pl " + g(e_pl) +
                            ", softmax " + g(e_softmax) + ", gaussian " + g(e_gauss) +
                            " (tolerance 1e-05, 100 points each)"};
}

Outcome batch_rules() {
  std::vector<std::string> failed;
  int total = 0;
  auto expect = [&](const std::string& name, std::size_t got, std::size_t want) {
    ++total;
    if (got != want) failed.push_back(name + "=" + std::to_string(got) + "!=" + std::to_string(want));
  };
  AbaConfig cfg;
  cfg.sigma_sq = 1;
  cfg.c_beta = cfg.c_eps = 16;
  cfg.eps = 0.1;
  expect("direct", adaptive_batch_size(4, cfg, 1000), 4);
  expect("beta0", adaptive_batch_size(0, cfg, 100), 100);
  expect("clamp1", adaptive_batch_size(1e9, cfg, 1000), 1);
  expect("cap", fixed_anchor_batch(cfg, 100), 100);

  RlAbaConfig rl;
  rl.alpha_sigma_sq = 1;
  rl.eps = 0.01;
  rl.N_max = 100;
  expect("rl_first", rl_adaptive_batch_size(std::vector<double>(rl.m, 0.0), rl), 100);
  RlAbaConfig rl2;
  rl2.alpha_sigma_sq = 48;
  rl2.beta = 6;
  rl2.m = 2;
  rl2.eps = 0.01;
  rl2.N_max = 1000;
  expect("rl_direct", rl_adaptive_batch_size(std::vector<double>{1, 1}, rl2), 8);
  RlAbaConfig rl3 = rl;
  rl3.beta = 0;
  rl3.alpha_sigma_sq = 1;
  rl3.eps = 0.03;
  rl3.N_max = 1000;
  expect("rl_beta0", rl_adaptive_batch_size(std::vector<double>(rl3.m, 5.0), rl3), 34);
  rl3.N_max = 10;
  expect("rl_cap", rl_adaptive_batch_size(std::vector<double>(rl3.m, 5.0), rl3), 10);
  expect("rl_clamp1", rl_adaptive_batch_size(std::vector<double>(rl.m, 1e12), rl), 1);

  const AbaSgdOptions sgd;
  expect("sgd_window", abasgd_batch_size(std::vector<double>{0.5, 0.5}, 1, 0.01, sgd, 1000), 4);
  expect("sgd_zero", abasgd_batch_size(std::vector<double>(4, 0.0), 1, 0.01, sgd, 100000), 2400);
  expect("sgd_zero_cap", abasgd_batch_size(std::vector<double>(4, 0.0), 1, 0.01, sgd, 1000), 1000);

  expect("exp", anchor_batch_size(schedule::Exponential{2}, 5, 0, cfg, 1000), 32);
  expect("lin", anchor_batch_size(schedule::Linear{200}, 3, 0, cfg, 1000), 800);

  std::string summary = std::to_string(total - static_cast<int>(failed.size())) + "/" +
                        std::to_string(total) + " exact integer matches";
  for (const auto& f : failed) summary += "; " + f;
  return {failed.empty(), summary};
}

Outcome estimator_statistics() {
  const auto obj = NonconvexLogReg::synthetic(1000, 20, 42);
  SeededRng rng(21);
  const Vector x = random_point(rng, 20, 0.5);
  bool ok = true;
  std::string summary = "variance ratio";
  for (std::size_t N : {2u, 8u, 32u}) {
    const auto rep = sample_mean_variance_check(obj, x, N, 10000, 22 + N);
    ok = ok && rep.passed;
    summary += " N=" + std::to_string(N) + ":" + fmt("%.3f", rep.measured);
  }
  summary += " (band [0.8, 1.2], 1e4 redraws)";

  int identities = 0, held = 0;
  for (int r = 0; r < 100; ++r) {
    const Vector snap = random_point(rng, 20, 1.0), anchor = random_point(rng, 20, 1.0);
    const EpochState st{snap, anchor, 0.0, 1};
    const auto batch = sample_with_replacement(1000, 1 + rng.uniform_index(50), rng);
    held += svrg_inner_direction(obj, snap, st, batch) == anchor;
    held += spider_inner_direction(obj, snap, snap, anchor, batch) == anchor;
    identities += 2;
  }
  ok = ok && held == identities;
  summary += "; bitwise estimator identities " + std::to_string(held) + "/" +
             std::to_string(identities);
  return {ok, summary};
}

struct DeskSetup {
  NonconvexLogReg obj;
  double L;
  double sigma_hat;
};

DeskSetup desk_problem(const char* libsvm_path) {
  if (libsvm_path) {
    auto data = load_libsvm(libsvm_path);
    NonconvexLogReg obj(std::move(data.features), std::move(data.labels), 0.1);
    const double L = *obj.lipschitz_hint();
    SeededRng pilot(1);
    const double s = estimate_sigma_sq(obj, Vector::Zero(static_cast<Eigen::Index>(obj.dim())), pilot);
    return {std::move(obj), L, s};
  }
  auto obj = NonconvexLogReg::synthetic(1000, 20, 42);
  const double L = *obj.lipschitz_hint();
  SeededRng pilot(1);
  const double s = estimate_sigma_sq(obj, Vector::Zero(20), pilot);
  return {std::move(obj), L, s};
}

Outcome convergence(const DeskSetup& desk) {
  const Vector x0 = Vector::Zero(static_cast<Eigen::Index>(desk.obj.dim()));
  const double eps = 1e-3;
  AbaConfig cfg = svrg_corollary_preset(desk.L, 10, eps, desk.sigma_hat, 200);
  cfg.cadence = MetricCadence::iteration;
  AbaConfig sgd_cfg = cfg;
  sgd_cfg.eta = 1.0 / (2.0 * desk.L);
  bool ok = true;
  std::string summary;
  auto judge = [&](const RunTrace& t) {
    const auto cost = t.sfo_at_threshold(eps);
    double best = INFINITY;
    for (const auto& r : t.records)
      if (!std::isnan(r.grad_norm_sq)) best = std::min(best, r.grad_norm_sq);
    ok = ok && cost.has_value() && t.status != RunStatus::diverged;
    if (!summary.empty()) summary += "; ";
    summary += t.algorithm + " min grad-norm^2 " + g(best) + " final " + g(t.final_grad_norm_sq) +
               (cost ? " reached 1e-3 at sfo " + std::to_string(*cost) : " never reached 1e-3");
  };
  SeededRng a(1), b(1), c(1);
  judge(run_abasvrg(desk.obj, cfg, x0, a));
  judge(run_abaspider(desk.obj, cfg, x0, b));
  judge(run_abasgd(desk.obj, sgd_cfg, AbaSgdOptions{}, x0, c));
  summary += " (eta 1/(4L) [1/(2L) for abasgd], m 10, B 100, 200 epochs)";
  return {ok, summary};
}

Outcome sfo_ordering(const DeskSetup& desk) {
  const Vector x0 = Vector::Zero(static_cast<Eigen::Index>(desk.obj.dim()));
  AbaConfig cfg;
  cfg.eta = 1.0 / (4.0 * desk.L);
  cfg.m = 10;
  cfg.B = 100;
  cfg.eps = 1e-3;
  cfg.sigma_sq = 1.0;
  cfg.c_beta = cfg.c_eps = 5.0;
  cfg.max_epochs = 200;
  cfg.cadence = MetricCadence::iteration;
  std::vector<RunTrace> abasvrg, svrg, abaspider, spiderboost;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SeededRng r1(seed), r2(seed), r3(seed), r4(seed);
    abasvrg.push_back(run_abasvrg(desk.obj, cfg, x0, r1));
    svrg.push_back(run_baseline(desk.obj, BaselineKind::svrg_fixed, cfg, {}, x0, r2));
    abaspider.push_back(run_abaspider(desk.obj, cfg, x0, r3));
    spiderboost.push_back(run_baseline(desk.obj, BaselineKind::spiderboost_fixed, cfg, {}, x0, r4));
  }
  const auto r1 = sfo_ordering_check("abasvrg_vs_svrg", abasvrg, svrg, cfg.eps);
  const auto r2 = sfo_ordering_check("abaspider_vs_spiderboost", abaspider, spiderboost, cfg.eps);
  return {r1.passed && r2.passed,
          "sfo ratio AbaSVRG/SVRG " + g(r1.measured) + " (" + r1.detail + "), AbaSPIDER/SpiderBoost " +
              g(r2.measured) + " (" + r2.detail + ") (limit 0.9, 5 seeds, threshold 1e-3)"};
}

Outcome pl_rate() {
  const auto obj = SyntheticPL::generate(500, 5, 3);
  const Vector x0 = Vector::Zero(5);
  const double sigma = component_gradient_variance(obj, x0);
  const double eps = 1e-8;
  bool ok = true;
  std::string summary;
  for (auto est : {Estimator::svrg, Estimator::spider}) {
    const auto preset = pl_theorem_preset(obj.smoothness(), obj.pl_constant(), 5.0, est, eps,
                                          sigma, 20);
    const PlRateOptions opts{preset.gamma_hat, preset.cfg.m, eps};
    double worst = INFINITY, control_best = -INFINITY;
    int passes = 0, control_fails = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      SeededRng rng(seed);
      const auto t = est == Estimator::svrg ? run_abasvrg(obj, preset.cfg, x0, rng)
                                            : run_abaspider(obj, preset.cfg, x0, rng);
      const auto rep = pl_rate_check(t, obj, opts);
      passes += rep.passed;
      worst = std::min(worst, rep.measured);
      AbaConfig bad = preset.cfg;
      bad.eta = 2.0 / obj.hessian_max_eigenvalue();
      SeededRng rng2(seed);
      const auto tb = est == Estimator::svrg ? run_abasvrg(obj, bad, x0, rng2)
                                             : run_abaspider(obj, bad, x0, rng2);
      const auto neg = pl_rate_check(tb, obj, opts);
      control_fails += !neg.passed;
      control_best = std::max(control_best, neg.measured);
    }
    ok = ok && passes == 5 && control_fails == 5;
    if (!summary.empty()) summary += "; ";
    summary += std::string(est == Estimator::svrg ? "AbaSVRG (B=m^2=" : "AbaSPIDER (B=m=") +
               std::to_string(preset.cfg.B) + ") passes " + std::to_string(passes) +
               "/5, worst rate ratio " + g(worst) + ", eta=2/lambda_max(f) control fails " +
               std::to_string(control_fails) + "/5 (best ratio " + g(control_best) + ")";
  }
  summary += " (required ratio >= 0.9)";
  return {ok, summary};
}

Outcome rl_unbiasedness() {
  const auto mdp = TabularMdp::chain5(5, 0.99);
  const auto policy = SoftmaxPolicy::action_affine(5, 2);
  const Vector theta = Vector::Zero(4);
  const auto re = rl_unbiasedness_check(mdp, policy, theta, GradKind::reinforce, 100000, 31);
  const auto gp = rl_unbiasedness_check(mdp, policy, theta, GradKind::gpomdp, 100000, 32);
  Vector target = theta;
  target[1] -= 0.5;
  target[3] += 0.5;
  const auto w = importance_weight_mean_check(mdp, policy, theta, target, 100000, 33);
  Vector dir = Vector::Ones(4);
  dir[0] = -1.0;
  const std::vector<double> radii{0.0, 0.1, 0.5};
  const auto var = importance_weight_variance_check(mdp, policy, theta, dir, radii, 100000, 34);
  std::string vars;
  for (const auto& [k, v] : var.extras) vars += " " + k + "=" + g(v);
  return {re.passed && gp.passed && w.passed && var.passed,
          "relative error REINFORCE " + g(re.measured) + ", GPOMDP " + g(gp.measured) +
              " (limit 0.01, N=1e5); |E[w]-1| " + g(w.measured) + " (3 sigma " + g(w.tolerance) +
              "); Var(w):" + vars + (var.passed ? " increasing" : " NOT increasing")};
}

Outcome rl_optimization() {
  const auto mdp = TabularMdp::chain5(5, 0.99);
  const auto policy = SoftmaxPolicy::action_affine(5, 2);
  const PolicyMetric metric = [&](const Vector& th) {
    const auto e = policy_gradient_dp(mdp, policy, th);
    return PolicyMetricValue{e.J, e.grad.squaredNorm()};
  };
  const double eps = 0.01, threshold = 10 * eps;
  RlAbaConfig cfg;
  cfg.alpha_sigma_sq = 1.0;
  cfg.beta = 1000.0;
  cfg.eps = eps;
  cfg.m = 10;
  cfg.B = 20;
  cfg.eta = 0.05;
  cfg.N_max = 100;
  cfg.max_epochs = 200;
  cfg.cadence = MetricCadence::iteration;
  cfg.stop_grad_norm_sq = threshold;
  RlAbaConfig vanilla = cfg;
  vanilla.beta = 0.0;
  const Vector theta0 = Vector::Zero(4);
  const double J0 = metric(theta0).J;

  bool ok = true;
  std::string summary;
  for (auto est : {Estimator::svrg, Estimator::spider}) {
    std::vector<RunTrace> ada, van;
    int raised = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      SeededRng r1(seed), r2(seed);
      ada.push_back(run_policy_gradient(mdp, policy, est, cfg, theta0, r1,
                                        est == Estimator::svrg ? "abasvrpg" : "abaspiderpg", metric));
      van.push_back(run_policy_gradient(mdp, policy, est, vanilla, theta0, r2,
                                        est == Estimator::svrg ? "svrpg" : "spiderpg", metric));
      raised += ada.back().final_loss > J0;
    }
    const auto rep = sfo_ordering_check(ada.front().algorithm, ada, van, threshold);
    ok = ok && rep.passed && raised == 10;
    if (!summary.empty()) summary += "; ";
    summary += ada.front().algorithm + "/" + van.front().algorithm + " trajectory ratio " +
               g(rep.measured) + " (" + rep.detail + "), J raised in " + std::to_string(raised) +
               "/10";
  }
  summary += " (limit 0.9, 10 seeds, threshold ||grad J||^2 <= 0.1, J0 " + g(J0) + ")";
  return {ok, summary};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "abavr_acceptance_determinism";
  fs::remove_all(root);
  ExperimentConfig opt;
  opt.algorithms = {"abasvrg", "abaspider", "abasgd", "svrg_fixed"};
  opt.seeds = {1, 2};
  opt.opt.max_epochs = 20;
  opt.opt.eta = 0.5;
  opt.opt.cadence = MetricCadence::iteration;
  opt.sigma_sq_auto = true;
  opt.workers = 2;
  ExperimentConfig rl;
  rl.kind = ExperimentKind::rl;
  rl.algorithms = {"abasvrpg", "abaspiderpg"};
  rl.seeds = {3};
  rl.rl.max_epochs = 5;

  std::size_t files = 0, identical = 0;
  for (auto* cfg : {&opt, &rl}) {
    cfg->output_dir = (root / "a").string();
    run_experiment(*cfg);
    cfg->output_dir = (root / "b").string();
    run_experiment(*cfg);
    for (const auto& entry : fs::directory_iterator(root / "a")) {
      if (entry.path().extension() != ".csv") continue;
      ++files;
      identical += slurp(entry.path()) == slurp(root / "b" / entry.path().filename());
    }
    fs::remove_all(root);
  }

  int round_trips = 0, held = 0;
  ExperimentConfig edited = opt;
  edited.threshold = 1.0 / 7.0;
  edited.opt.beta_init = 3e-5;
  edited.env.horizon = 9;
  edited.rl.theory_constants["L_g"] = 4.25;
  for (const auto* cfg : {&opt, &rl, &edited}) {
    ++round_trips;
    std::istringstream in(cfg->serialize());
    const auto back = ExperimentConfig::parse(in);
    held += back == *cfg && back.serialize() == cfg->serialize();
  }
  return {files > 0 && identical == files && held == round_trips,
          std::to_string(identical) + "/" + std::to_string(files) +
              " CSVs byte-identical across repeated runs; config round-trip " +
              std::to_string(held) + "/" + std::to_string(round_trips)};
}

}  // namespace

int main(int argc, char** argv) {
  const char* libsvm = argc > 1 ? argv[1] : nullptr;
  criterion(1, "gradient correctness", 10, gradient_correctness);
  criterion(2, "batch-rule unit suite", 1, batch_rules);
  criterion(3, "estimator statistics", 30, estimator_statistics);
  const auto start = std::chrono::steady_clock::now();
  const DeskSetup desk = desk_problem(libsvm);
  const double setup_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("desk problem: %s n=%zu d=%zu L=%.4g sigma_hat^2=%.4g (setup %.2f s)\n",
              libsvm ? libsvm : "synthetic logreg", desk.obj.size(), desk.obj.dim(), desk.L,
              desk.sigma_hat, setup_s);
  criterion(4, "convergence", 120, [&] { return convergence(desk); });
  criterion(5, "SFO ordering", 300, [&] { return sfo_ordering(desk); });
  criterion(6, "PL linear rate", 60, pl_rate);
  criterion(7, "RL unbiasedness", 120, rl_unbiasedness);
  criterion(8, "RL optimization", 300, rl_optimization);
  criterion(9, "determinism and schema", 10, determinism);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
