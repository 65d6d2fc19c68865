#include "abavr/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "abavr/constants.hpp"
#include "abavr/exact_gradient.hpp"
#include "abavr/libsvm.hpp"
#include "abavr/mdp.hpp"
#include "abavr/nonconvex_logreg.hpp"
#include "abavr/policies.hpp"
#include "abavr/push_env.hpp"
#include "abavr/synthetic_pl.hpp"

namespace abavr {

namespace {

constexpr std::uint64_t kSigmaStream = 0x7369676d61;

std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::json json_number(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

struct Moments {
  double mean = kNotMeasured;
  double std_dev = kNotMeasured;
};

Moments moments(const std::vector<double>& xs) {
  Moments m;
  if (xs.empty()) return m;
  double total = 0.0;
  for (double x : xs) total += x;
  m.mean = total / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - m.mean) * (x - m.mean);
  m.std_dev = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
  return m;
}

nlohmann::json moments_json(const std::vector<double>& xs) {
  const auto m = moments(xs);
  return {{"mean", json_number(m.mean)}, {"std", json_number(m.std_dev)}, {"count", xs.size()}};
}

TabularMdp with_overrides(const TabularMdp& base, const EnvSpec& env) {
  const std::size_t S = base.num_states(), A = base.num_actions();
  std::vector<double> transitions, rewards, initial;
  for (std::size_t s = 0; s < S; ++s) {
    initial.push_back(base.initial(s));
    for (std::size_t a = 0; a < A; ++a) {
      rewards.push_back(base.reward(s, a));
      for (std::size_t n = 0; n < S; ++n) transitions.push_back(base.transition(s, a, n));
    }
  }
  return TabularMdp(S, A, std::move(transitions), std::move(rewards), std::move(initial),
                    env.horizon.value_or(base.horizon()), env.gamma.value_or(base.discount()),
                    base.reward_bound());
}

TabularMdp make_mdp(const EnvSpec& env) {
  if (env.name == "chain5") return TabularMdp::chain5(env.horizon.value_or(5), env.gamma.value_or(0.99));
  if (env.name.rfind("file:", 0) == 0) return with_overrides(TabularMdp::load(env.name.substr(5)), env);
  throw std::invalid_argument("environment '" + env.name + "' is not a finite MDP");
}

RlAbaConfig rl_config_for(const ExperimentConfig& cfg, const std::string& algorithm) {
  RlAbaConfig rl = cfg.rl;
  if (algorithm == "svrpg" || algorithm == "spiderpg") rl.beta = 0.0;
  if (!rl.stop_grad_norm_sq && cfg.threshold) rl.stop_grad_norm_sq = cfg.threshold;
  return rl;
}

bool is_spider_pg(const std::string& algorithm) {
  return algorithm == "abaspiderpg" || algorithm == "spiderpg";
}

}  // namespace

std::string run_id(const std::string& algorithm, std::uint64_t seed) {
  return algorithm + "_seed" + std::to_string(seed);
}

void write_trace_csv(std::ostream& out, const RunTrace& trace, const std::string& id) {
  out << kCsvHeader << '\n';
  for (const auto& r : trace.records) {
    out << id << ',' << trace.algorithm << ',' << trace.seed << ',' << r.iter << ',' << r.epoch
        << ',' << r.sfo << ',' << csv_number(r.loss) << ',' << csv_number(r.grad_norm_sq) << ','
        << r.batch_size << '\n';
  }
}

std::shared_ptr<const FiniteSumObjective> make_objective(const ObjectiveSpec& spec) {
  if (spec.kind == "logreg") {
    return std::make_shared<NonconvexLogReg>(
        NonconvexLogReg::synthetic(spec.n, spec.d, spec.data_seed, spec.label_flip, spec.reg_alpha));
  }
  if (spec.kind == "libsvm") {
    LibsvmOptions opts;
    opts.scale = spec.scale;
    auto data = load_libsvm(spec.path, opts);
    return std::make_shared<NonconvexLogReg>(std::move(data.features), std::move(data.labels),
                                             spec.reg_alpha);
  }
  if (spec.kind == "pl") {
    return std::make_shared<SyntheticPL>(SyntheticPL::generate(spec.n, spec.d, spec.data_seed));
  }
  throw std::invalid_argument("unknown objective kind '" + spec.kind + "'");
}

RunTrace run_optimizer(const FiniteSumObjective& obj, const std::string& algorithm,
                       const ExperimentConfig& cfg, std::uint64_t seed) {
  const Vector x0 = Vector::Zero(static_cast<Eigen::Index>(obj.dim()));
  SeededRng rng(seed);
  AbaConfig opt = cfg.opt;
  if (cfg.sigma_sq_auto) {
    SeededRng pilot = rng.substream(kSigmaStream);
    opt.sigma_sq = std::max(estimate_sigma_sq(obj, x0, pilot), 1e-12);
  }
  if (algorithm == "abasvrg") return run_abasvrg(obj, opt, x0, rng);
  if (algorithm == "abaspider") return run_abaspider(obj, opt, x0, rng);
  if (algorithm == "abasgd") return run_abasgd(obj, opt, cfg.sgd, x0, rng);
  static const std::map<std::string, BaselineKind> baselines = {
      {"sgd", BaselineKind::sgd},
      {"hsgd", BaselineKind::hsgd},
      {"svrg_fixed", BaselineKind::svrg_fixed},
      {"spiderboost_fixed", BaselineKind::spiderboost_fixed},
      {"spider_exp", BaselineKind::spider_exp},
      {"spider_lin", BaselineKind::spider_lin}};
  const auto it = baselines.find(algorithm);
  if (it == baselines.end()) throw std::invalid_argument("unknown optimizer '" + algorithm + "'");
  return run_baseline(obj, it->second, opt, cfg.baseline, x0, rng);
}

RunTrace run_policy_optimizer(const ExperimentConfig& cfg, const std::string& algorithm,
                              std::uint64_t seed) {
  const RlAbaConfig rl = rl_config_for(cfg, algorithm);
  SeededRng rng(seed);
  const Estimator est = is_spider_pg(algorithm) ? Estimator::spider : Estimator::svrg;

  if (cfg.env.name == "push") {
    PushEnv::Options opts;
    if (cfg.env.horizon) opts.horizon = *cfg.env.horizon;
    if (cfg.env.gamma) opts.discount = *cfg.env.gamma;
    const PushEnv env(opts);
    const GaussianPolicy policy;
    return run_policy_gradient(env, policy, est, rl, Vector::Zero(3), rng, algorithm);
  }
  const TabularMdp mdp = make_mdp(cfg.env);
  const SoftmaxPolicy policy = cfg.env.policy == "tabular"
                                   ? SoftmaxPolicy::tabular(mdp.num_states(), mdp.num_actions())
                                   : SoftmaxPolicy::action_affine(mdp.num_states(), mdp.num_actions());
  const PolicyMetric metric = [&](const Vector& theta) {
    const auto exact = policy_gradient_dp(mdp, policy, theta);
    return PolicyMetricValue{exact.J, exact.grad.squaredNorm()};
  };
  const Vector theta0 = Vector::Zero(static_cast<Eigen::Index>(policy.dim()));
  return run_policy_gradient(mdp, policy, est, rl, theta0, rng, algorithm, metric);
}

nlohmann::json compare_table(const std::vector<RunTrace>& traces, double threshold) {
  std::map<std::string, std::vector<const RunTrace*>> by_algo;
  for (const auto& t : traces) by_algo[t.algorithm].push_back(&t);
  struct Row {
    std::string algo;
    std::vector<double> costs;
    std::size_t runs;
  };
  std::vector<Row> rows;
  for (const auto& [algo, runs] : by_algo) {
    Row row{algo, {}, runs.size()};
    for (const auto* t : runs) {
      if (const auto c = t->sfo_at_threshold(threshold)) row.costs.push_back(static_cast<double>(*c));
    }
    rows.push_back(std::move(row));
  }
  // Algorithms whose every run reached the threshold first, by mean cost.
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    const bool ca = a.costs.size() == a.runs, cb = b.costs.size() == b.runs;
    if (ca != cb) return ca;
    const double ma = moments(a.costs).mean, mb = moments(b.costs).mean;
    if (std::isnan(ma) || std::isnan(mb)) return !std::isnan(ma) && std::isnan(mb);
    return ma < mb;
  });
  nlohmann::json table = nlohmann::json::array();
  for (const auto& row : rows) {
    const auto m = moments(row.costs);
    table.push_back({{"algo", row.algo},
                     {"runs", row.runs},
                     {"reached", row.costs.size()},
                     {"sfo_mean", json_number(m.mean)},
                     {"sfo_std", json_number(m.std_dev)}});
  }
  return table;
}

std::string format_compare_table(const nlohmann::json& table) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%-20s %8s %14s %14s\n", "algo", "reached", "sfo_mean", "sfo_std");
  os << line;
  for (const auto& row : table) {
    const std::string reached = std::to_string(row["reached"].get<std::size_t>()) + "/" +
                                std::to_string(row["runs"].get<std::size_t>());
    auto cell = [](const nlohmann::json& v) {
      if (v.is_null()) return std::string("-");
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.6g", v.get<double>());
      return std::string(buf);
    };
    std::snprintf(line, sizeof line, "%-20s %8s %14s %14s\n",
                  row["algo"].get<std::string>().c_str(), reached.c_str(),
                  cell(row["sfo_mean"]).c_str(), cell(row["sfo_std"]).c_str());
    os << line;
  }
  return os.str();
}

std::string default_output_dir() {
  const char* env = std::getenv("ABAVR_OUTPUT_DIR");
  return env && *env ? env : "results";
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::shared_ptr<const FiniteSumObjective> obj;
  if (cfg.kind == ExperimentKind::opt) obj = make_objective(cfg.objective);

  struct Cell {
    std::string algo;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (const auto& a : cfg.algorithms) {
    for (auto s : cfg.seeds) cells.push_back({a, s});
  }

  ExperimentResult result;
  result.traces.resize(cells.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        result.traces[i] = cfg.kind == ExperimentKind::opt
                               ? run_optimizer(*obj, cells[i].algo, cfg, cells[i].seed)
                               : run_policy_optimizer(cfg, cells[i].algo, cells[i].seed);
        result.traces[i].algorithm = cells[i].algo;
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min(cfg.workers, cells.size());
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  const double threshold = cfg.effective_threshold();
  nlohmann::json runs = nlohmann::json::array();
  std::map<std::string, std::map<std::string, std::vector<double>>> agg;
  for (const auto& t : result.traces) {
    const auto cost = t.sfo_at_threshold(threshold);
    runs.push_back({{"run_id", run_id(t.algorithm, t.seed)},
                    {"algo", t.algorithm},
                    {"seed", t.seed},
                    {"status", std::string(to_string(t.status))},
                    {"diagnostic", t.diagnostic},
                    {"final_loss", json_number(t.final_loss)},
                    {"final_grad_norm_sq", json_number(t.final_grad_norm_sq)},
                    {"output_loss", json_number(t.output_loss)},
                    {"output_grad_norm_sq", json_number(t.output_grad_norm_sq)},
                    {"total_sfo", t.total_sfo},
                    {"sfo_at_threshold", cost ? nlohmann::json(*cost) : nlohmann::json(nullptr)}});
    auto& a = agg[t.algorithm];
    if (std::isfinite(t.final_loss)) a["final_loss"].push_back(t.final_loss);
    if (std::isfinite(t.final_grad_norm_sq)) a["final_grad_norm_sq"].push_back(t.final_grad_norm_sq);
    a["total_sfo"].push_back(static_cast<double>(t.total_sfo));
    if (cost) a["sfo_at_threshold"].push_back(static_cast<double>(*cost));
    if (t.status == RunStatus::diverged) result.exit_code = kExitDiverged;
  }
  nlohmann::json aggregate = nlohmann::json::object();
  for (const auto& [algo, metrics] : agg) {
    nlohmann::json entry = nlohmann::json::object();
    for (const char* key : {"final_loss", "final_grad_norm_sq", "total_sfo", "sfo_at_threshold"}) {
      const auto it = metrics.find(key);
      entry[key] = moments_json(it == metrics.end() ? std::vector<double>{} : it->second);
    }
    aggregate[algo] = std::move(entry);
  }

  result.summary = {{"schema_version", kSchemaVersion},
                    {"kind", std::string(to_string(cfg.kind))},
                    {"cost_unit", cfg.kind == ExperimentKind::opt ? "sfo" : "trajectories"},
                    {"threshold", threshold},
                    {"config", cfg.serialize()},
                    {"runs", std::move(runs)},
                    {"aggregate", std::move(aggregate)},
                    {"compare", compare_table(result.traces, threshold)}};

  if (!cfg.output_dir.empty()) {
    std::filesystem::create_directories(cfg.output_dir);
    for (const auto& t : result.traces) {
      const std::string id = run_id(t.algorithm, t.seed);
      std::ofstream csv(std::filesystem::path(cfg.output_dir) / (id + ".csv"), std::ios::binary);
      write_trace_csv(csv, t, id);
      if (!csv) throw std::runtime_error("failed writing " + id + ".csv");
    }
    std::ofstream summary(std::filesystem::path(cfg.output_dir) / "summary.json", std::ios::binary);
    summary << result.summary.dump(2) << '\n';
    if (!summary) throw std::runtime_error("failed writing summary.json");
  }
  return result;
}

}  // namespace abavr
