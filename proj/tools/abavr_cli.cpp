#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "abavr/constants.hpp"
#include "abavr/experiment_config.hpp"
#include "abavr/libsvm.hpp"
#include "abavr/runner.hpp"
#include "abavr/verify_suite.hpp"

using namespace abavr;

namespace {

using Overrides = std::vector<std::pair<std::string, std::string>>;

/// Flag whose value is forwarded to a config key.
void forward_flag(CLI::App* app, Overrides& ov, const std::string& flag, const std::string& key,
          const std::string& help) {
  app->add_option_function<std::string>(
      flag, [&ov, key](const std::string& v) { ov.emplace_back(key, v); }, help);
}

struct Common {
  std::string config_path;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> sets;
  Overrides overrides;
  bool print_config = false;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config_path, "Experiment config file")->check(CLI::ExistingFile);
  app->add_option("--seed", c.seeds, "Seed (repeat for multiple runs)");
  forward_flag(app, c.overrides, "--workers", "workers", "Concurrent runs");
  forward_flag(app, c.overrides, "--out", "output_dir", "Output directory (default $ABAVR_OUTPUT_DIR or ./results)");
  forward_flag(app, c.overrides, "--threshold", "threshold", "grad-norm^2 level for the cost table");
  app->add_option("--set", c.sets, "Raw override section.key=value (repeatable)");
  app->add_flag("--print-config", c.print_config, "Print the resolved config and exit");
}

void add_opt_flags(CLI::App* app, Common& c) {
  auto& ov = c.overrides;
  app->add_option_function<std::string>(
      "--data",
      [&ov](const std::string& v) {
        ov.emplace_back("objective.kind", "libsvm");
        ov.emplace_back("objective.path", v);
      },
      "LIBSVM data file");
  forward_flag(app, ov, "--objective", "objective.kind", "logreg | libsvm | pl");
  forward_flag(app, ov, "--n", "objective.n", "Synthetic sample count");
  forward_flag(app, ov, "--d", "objective.d", "Synthetic dimension");
  forward_flag(app, ov, "--data-seed", "objective.data_seed", "Synthetic data seed");
  forward_flag(app, ov, "--reg-alpha", "objective.reg_alpha", "Nonconvex regularizer weight");
  app->add_flag_callback(
      "--scale", [&ov] { ov.emplace_back("objective.scale", "true"); },
      "Min-max scale features to [-1, 1]");
  forward_flag(app, ov, "--eps", "optimizer.eps", "Target accuracy");
  forward_flag(app, ov, "--m", "optimizer.m", "Epoch length");
  forward_flag(app, ov, "--B", "optimizer.B", "Inner mini-batch size");
  forward_flag(app, ov, "--eta", "optimizer.eta", "Step size");
  forward_flag(app, ov, "--epochs", "optimizer.max_epochs", "Number of epochs");
  forward_flag(app, ov, "--c-beta", "optimizer.c_beta", "Adaptive-term constant");
  forward_flag(app, ov, "--c-eps", "optimizer.c_eps", "Accuracy-term constant");
  forward_flag(app, ov, "--sigma-sq", "optimizer.sigma_sq", "Variance bound, or 'auto' to estimate at x0");
  forward_flag(app, ov, "--beta-init", "optimizer.beta_init", "beta_1");
  forward_flag(app, ov, "--sfo-mode", "optimizer.sfo_mode", "samples | gradient-evals");
  forward_flag(app, ov, "--output-mode", "optimizer.output_mode", "last | uniform");
  forward_flag(app, ov, "--cadence", "optimizer.cadence", "epoch | iteration");
  forward_flag(app, ov, "--stop", "optimizer.stop_grad_norm_sq", "Stop at this grad-norm^2");
}

void add_rl_flags(CLI::App* app, Common& c) {
  auto& ov = c.overrides;
  forward_flag(app, ov, "--env", "rl.env", "chain5 | push | file:<path>");
  forward_flag(app, ov, "--horizon", "rl.horizon", "Episode length");
  forward_flag(app, ov, "--gamma", "rl.gamma", "Discount factor");
  forward_flag(app, ov, "--policy", "rl.policy", "action_affine | tabular");
  forward_flag(app, ov, "--alpha-sigma-sq", "rl.alpha_sigma_sq", "alpha * sigma^2");
  forward_flag(app, ov, "--beta", "rl.beta", "History weight beta (0 = vanilla)");
  forward_flag(app, ov, "--eps", "rl.eps", "Target accuracy");
  forward_flag(app, ov, "--m", "rl.m", "Epoch length");
  forward_flag(app, ov, "--B", "rl.B", "Inner trajectory batch");
  forward_flag(app, ov, "--eta", "rl.eta", "Step size");
  forward_flag(app, ov, "--N-max", "rl.N_max", "Cap on the anchor batch");
  forward_flag(app, ov, "--grad-kind", "rl.grad_kind", "reinforce | gpomdp");
  forward_flag(app, ov, "--epochs", "rl.max_epochs", "Number of epochs");
  forward_flag(app, ov, "--stop", "rl.stop_grad_norm_sq", "Stop at this exact ||grad J||^2");
  forward_flag(app, ov, "--sto-mode", "rl.sto_mode", "samples | gradient-evals");
  forward_flag(app, ov, "--output-mode", "rl.output_mode", "last | uniform");
  forward_flag(app, ov, "--cadence", "rl.cadence", "epoch | iteration");
}

ExperimentConfig resolve(const Common& c, ExperimentKind kind, const Overrides& extra) {
  ExperimentConfig cfg = c.config_path.empty() ? ExperimentConfig{} : ExperimentConfig::load(c.config_path);
  if (c.config_path.empty()) {
    cfg.kind = kind;
    if (kind == ExperimentKind::rl) cfg.algorithms = {"abaspiderpg"};
  }
  for (const auto& [k, v] : extra) cfg.set(k, v);
  for (const auto& [k, v] : c.overrides) cfg.set(k, v);
  for (const auto& s : c.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--set expects section.key=value, got '" + s + "'");
    cfg.set(s.substr(0, eq), s.substr(eq + 1));
  }
  if (!c.seeds.empty()) {
    cfg.seeds = c.seeds;
  }
  if (cfg.output_dir.empty()) cfg.output_dir = default_output_dir();
  cfg.validate();
  return cfg;
}

int report_runs(const ExperimentConfig& cfg, const ExperimentResult& result) {
  for (const auto& t : result.traces) {
    std::cout << run_id(t.algorithm, t.seed) << " status=" << to_string(t.status)
              << " final_loss=" << t.final_loss << " final_grad_norm_sq=" << t.final_grad_norm_sq
              << " total_cost=" << t.total_sfo;
    if (!t.diagnostic.empty()) std::cout << " diagnostic=\"" << t.diagnostic << '"';
    std::cout << '\n';
  }
  std::cout << "wrote " << result.traces.size() << " trace file(s) and summary.json to "
            << cfg.output_dir << '\n';
  return result.exit_code;
}

int run_cmd(const Common& c, ExperimentKind kind, const std::string& algo) {
  Overrides extra;
  if (!algo.empty()) extra.emplace_back("algorithms", algo);
  const ExperimentConfig cfg = resolve(c, kind, extra);
  if (c.print_config) {
    std::cout << cfg.serialize();
    return kExitOk;
  }
  return report_runs(cfg, run_experiment(cfg));
}

int compare_cmd(const Common& c, const std::string& algos) {
  Overrides extra;
  extra.emplace_back("algorithms", algos);
  const ExperimentConfig cfg = resolve(c, ExperimentKind::opt, extra);
  if (c.print_config) {
    std::cout << cfg.serialize();
    return kExitOk;
  }
  const auto result = run_experiment(cfg);
  std::cout << "cost to reach grad-norm^2 <= " << cfg.effective_threshold() << '\n'
            << format_compare_table(result.summary["compare"]);
  std::cout << "wrote traces and summary.json to " << cfg.output_dir << '\n';
  return result.exit_code;
}

int verify_cmd(const std::string& suite, std::uint64_t seed, const std::string& out_path) {
  const auto reports = run_suite(suite, seed);
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw std::runtime_error("cannot write '" + out_path + "'");
  }
  bool all = true;
  for (const auto& r : reports) {
    const std::string line = r.to_json_line();
    std::cout << line << '\n';
    if (file) file << line << '\n';
    all = all && r.passed;
  }
  return all ? kExitOk : kExitFailure;
}

struct ConstantsArgs {
  std::size_t pilot = 1000;
  std::size_t pairs = 200;
  double radius = 1.0;
  std::uint64_t seed = 1;
};

int constants_cmd(const Common& c, const ConstantsArgs& a) {
  const ExperimentConfig cfg = resolve(c, ExperimentKind::opt, {});
  const auto obj = make_objective(cfg.objective);
  const Vector x0 = Vector::Zero(static_cast<Eigen::Index>(obj->dim()));
  SeededRng rng(a.seed);
  SeededRng sigma_rng = rng.substream(1);
  SeededRng lip_rng = rng.substream(2);
  nlohmann::json j;
  j["n"] = obj->size();
  j["d"] = obj->dim();
  j["pilot"] = std::min(a.pilot, obj->size());
  j["sigma_sq_hat"] = estimate_sigma_sq(*obj, x0, sigma_rng, a.pilot);
  j["L_hat"] = estimate_lipschitz(*obj, x0, lip_rng, a.pairs, a.radius);
  if (const auto hint = obj->lipschitz_hint()) j["L_bound"] = *hint;
  j["grad_norm_sq_at_zero"] = obj->full_grad(x0).squaredNorm();
  std::cout << j.dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive batch-size variance-reduced optimization and policy gradient"};
  app.require_subcommand(1);

  auto* opt = app.add_subcommand("opt", "Finite-sum optimization");
  opt->require_subcommand(1);
  auto* opt_run = opt->add_subcommand("run", "Run one algorithm over one or more seeds");
  Common opt_common;
  std::string opt_algo;
  opt_run->add_option("--algo", opt_algo, "Algorithm id");
  add_common(opt_run, opt_common);
  add_opt_flags(opt_run, opt_common);

  auto* rl = app.add_subcommand("rl", "Policy optimization");
  rl->require_subcommand(1);
  auto* rl_run = rl->add_subcommand("run", "Run one policy-gradient algorithm");
  Common rl_common;
  std::string rl_algo;
  rl_run->add_option("--algo", rl_algo, "abasvrpg | abaspiderpg | svrpg | spiderpg");
  add_common(rl_run, rl_common);
  add_rl_flags(rl_run, rl_common);

  auto* compare = app.add_subcommand("compare", "Cost-to-threshold table over several optimizers");
  Common cmp_common;
  std::string cmp_algos = "abasvrg,svrg_fixed,abaspider,spiderboost_fixed,sgd,hsgd,abasgd";
  compare->add_option("--algos", cmp_algos, "Comma-separated algorithm ids")->capture_default_str();
  add_common(compare, cmp_common);
  add_opt_flags(compare, cmp_common);

  auto* verify = app.add_subcommand("verify", "Run the oracle suite; JSON lines on stdout");
  std::string suite = "core";
  std::uint64_t verify_seed = 1;
  std::string verify_out;
  verify->add_option("--suite", suite, "Suite name")->check(CLI::IsMember(suite_names()))->capture_default_str();
  verify->add_option("--seed", verify_seed, "Seed")->capture_default_str();
  verify->add_option("--out", verify_out, "Also write the reports to this file");

  auto* constants = app.add_subcommand("estimate-constants", "Pilot estimates of sigma^2 and L at x = 0");
  Common const_common;
  ConstantsArgs const_args;
  constants->add_option("--config", const_common.config_path, "Experiment config file")->check(CLI::ExistingFile);
  constants->add_option("--pilot", const_args.pilot, "Components in the variance pilot")->capture_default_str();
  constants->add_option("--pairs", const_args.pairs, "Random pairs for the Lipschitz pilot")->capture_default_str();
  constants->add_option("--radius", const_args.radius, "Pair sampling radius")->capture_default_str();
  constants->add_option("--seed", const_args.seed, "Seed")->capture_default_str();
  add_opt_flags(constants, const_common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalidConfig;
  }

  try {
    if (*opt_run) return run_cmd(opt_common, ExperimentKind::opt, opt_algo);
    if (*rl_run) return run_cmd(rl_common, ExperimentKind::rl, rl_algo);
    if (*compare) return compare_cmd(cmp_common, cmp_algos);
    if (*verify) return verify_cmd(suite, verify_seed, verify_out);
    if (*constants) return constants_cmd(const_common, const_args);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalidConfig;
  } catch (const LibsvmError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalidConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}
