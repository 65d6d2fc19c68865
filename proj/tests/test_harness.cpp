#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "abavr/experiment_config.hpp"
#include "abavr/libsvm.hpp"
#include "abavr/runner.hpp"

using namespace abavr;
namespace fs = std::filesystem;

namespace {

LibsvmData parse(const std::string& text, LibsvmOptions opts = {}) {
  std::istringstream in(text);
  return parse_libsvm(in, opts);
}

std::size_t error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const LibsvmError& e) {
    return e.line();
  }
  return static_cast<std::size_t>(-1);
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("abavr_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig small_opt_config() {
  ExperimentConfig cfg;
  cfg.objective.n = 200;
  cfg.objective.d = 5;
  cfg.opt.max_epochs = 5;
  cfg.opt.eta = 0.3;
  cfg.opt.cadence = MetricCadence::iteration;
  cfg.algorithms = {"abasvrg", "abaspider"};
  cfg.seeds = {1, 2};
  return cfg;
}

}  // namespace

TEST(Libsvm, BasicLine) {
  const auto d = parse("+1 1:0.5 3:-2\n");
  ASSERT_EQ(d.labels.size(), 1u);
  EXPECT_EQ(d.labels[0], 1.0);
  EXPECT_GE(d.features.cols(), 3);
  EXPECT_EQ(d.features.coeff(0, 0), 0.5);
  EXPECT_EQ(d.features.coeff(0, 1), 0.0);
  EXPECT_EQ(d.features.coeff(0, 2), -2.0);
}

TEST(Libsvm, ZeroOneLabelsRemapped) {
  const auto d = parse("0 2:1\n1 1:3\n");
  EXPECT_EQ(d.labels, (std::vector<double>{-1.0, 1.0}));
  EXPECT_EQ(d.features.cols(), 2);
}

TEST(Libsvm, CommentsBlankLinesAndMinDim) {
  const auto d = parse("# header\n\n-1 2:1.5  \n+1 1:1 # trailing\n", {.scale = false, .min_dim = 10});
  EXPECT_EQ(d.labels, (std::vector<double>{-1.0, 1.0}));
  EXPECT_EQ(d.features.cols(), 10);
}

TEST(Libsvm, ScalingToUnitRange) {
  const auto d = parse("1 1:2 2:5\n-1 1:4\n1 1:6 2:-5\n", {.scale = true});
  EXPECT_DOUBLE_EQ(d.features.coeff(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(d.features.coeff(1, 0), 0.0);
  EXPECT_DOUBLE_EQ(d.features.coeff(2, 0), 1.0);
  EXPECT_DOUBLE_EQ(d.features.coeff(1, 1), 0.0);  // implicit zero, column range [-5, 5]
  EXPECT_DOUBLE_EQ(d.features.coeff(0, 1), 1.0);
}

TEST(Libsvm, MalformedLinesReportLineNumbers) {
  EXPECT_EQ(error_line("1 1:1\n1 3:1 2:1\n"), 2u);     // descending index
  EXPECT_EQ(error_line("1 1:1\n\n1 0:1\n"), 3u);       // zero index
  EXPECT_EQ(error_line("abc 1:1\n"), 1u);              // bad label
  EXPECT_EQ(error_line("1 1:1\n1 2:x\n"), 2u);         // bad value
  EXPECT_EQ(error_line("1 1:1\n1 2\n"), 2u);           // missing colon
  EXPECT_EQ(error_line("1 1:1 1:2\n"), 1u);            // repeated index
  EXPECT_THROW(parse(""), LibsvmError);
  EXPECT_THROW(parse("# only comments\n\n"), LibsvmError);
  EXPECT_THROW(load_libsvm("/nonexistent/file.libsvm"), std::exception);
}

TEST(Libsvm, FileRoundTripIntoObjective) {
  const auto dir = scratch_dir("libsvm");
  {
    std::ofstream out(dir / "d.libsvm");
    out << "+1 1:0.5 3:-2\n-1 2:1\n+1 1:1 2:1 3:1\n";
  }
  ExperimentConfig cfg;
  cfg.objective.kind = "libsvm";
  cfg.objective.path = (dir / "d.libsvm").string();
  const auto obj = make_objective(cfg.objective);
  EXPECT_EQ(obj->size(), 3u);
  EXPECT_EQ(obj->dim(), 3u);
  EXPECT_NEAR(obj->value(Vector::Zero(3)), std::log(2.0), 1e-15);
}

TEST(Config, RoundTripDefaultsAndEdits) {
  ExperimentConfig a;
  std::istringstream text(a.serialize());
  EXPECT_EQ(ExperimentConfig::parse(text), a);

  ExperimentConfig b = small_opt_config();
  b.threshold = 0.0123456789012345;
  b.opt.eta = 1.0 / 3.0;
  b.opt.beta_init = 1e-7;
  b.opt.stop_grad_norm_sq = 1e-9;
  b.sigma_sq_auto = true;
  b.opt.sfo_mode = SfoMode::gradient_evals;
  b.opt.output_mode = OutputMode::uniform_random_iterate;
  b.env.name = "push";
  b.env.horizon = 7;
  b.env.gamma = 0.95;
  b.rl.grad_kind = GradKind::reinforce;
  b.rl.theory_constants["G"] = 2.5;
  b.output_dir = "out dir";
  std::istringstream in(b.serialize());
  const auto c = ExperimentConfig::parse(in);
  EXPECT_EQ(c, b);
  EXPECT_EQ(c.serialize(), b.serialize());
  EXPECT_EQ(c.opt.eta, 1.0 / 3.0);
  EXPECT_EQ(*c.threshold, 0.0123456789012345);
}

TEST(Config, FileRoundTrip) {
  const auto dir = scratch_dir("config");
  const auto cfg = small_opt_config();
  {
    std::ofstream out(dir / "exp.cfg");
    out << cfg.serialize();
  }
  EXPECT_EQ(ExperimentConfig::load((dir / "exp.cfg").string()), cfg);
}

TEST(Config, SetAndValidate) {
  ExperimentConfig cfg;
  cfg.set("optimizer.m", "7");
  cfg.set("algorithms", "abasvrg,svrg_fixed");
  cfg.set("seeds", "3,4,5");
  cfg.set("optimizer.sigma_sq", "auto");
  EXPECT_EQ(cfg.opt.m, 7u);
  EXPECT_EQ(cfg.algorithms.size(), 2u);
  EXPECT_EQ(cfg.seeds, (std::vector<std::uint64_t>{3, 4, 5}));
  EXPECT_TRUE(cfg.sigma_sq_auto);
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_THROW(cfg.set("optimizer.nope", "1"), std::invalid_argument);
  EXPECT_THROW(cfg.set("optimizer.m", "seven"), std::invalid_argument);
  cfg.set("algorithms", "not_an_algorithm");
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  std::istringstream bad("[optimizer]\neta = 0.1\nbogus line\n");
  EXPECT_THROW(ExperimentConfig::parse(bad), std::invalid_argument);
}

TEST(Config, Thresholds) {
  ExperimentConfig cfg;
  EXPECT_EQ(cfg.effective_threshold(), cfg.opt.eps);
  cfg.kind = ExperimentKind::rl;
  EXPECT_EQ(cfg.effective_threshold(), 10 * cfg.rl.eps);
  cfg.threshold = 0.5;
  EXPECT_EQ(cfg.effective_threshold(), 0.5);
}

TEST(Runner, CsvIsByteIdenticalAcrossRepeats) {
  auto cfg = small_opt_config();
  const auto first = scratch_dir("csv_a");
  cfg.output_dir = first.string();
  run_experiment(cfg);
  cfg.output_dir = scratch_dir("csv_b").string();
  cfg.workers = 2;
  run_experiment(cfg);
  for (const char* f : {"abasvrg_seed1.csv", "abasvrg_seed2.csv", "abaspider_seed1.csv",
                        "abaspider_seed2.csv"}) {
    const auto a = slurp(first / f);
    const auto b = slurp(fs::path(cfg.output_dir) / f);
    EXPECT_FALSE(a.empty());
    EXPECT_EQ(a, b) << f;
    EXPECT_EQ(a.substr(0, a.find('\n')), kCsvHeader);
  }
}

TEST(Runner, SummarySchema) {
  auto cfg = small_opt_config();
  cfg.output_dir = scratch_dir("summary").string();
  const auto res = run_experiment(cfg);
  EXPECT_EQ(res.exit_code, kExitOk);
  EXPECT_EQ(res.traces.size(), 4u);
  std::ifstream in(fs::path(cfg.output_dir) / "summary.json");
  const auto j = nlohmann::json::parse(in);
  EXPECT_EQ(j["schema_version"], kSchemaVersion);
  EXPECT_EQ(j["runs"].size(), 4u);
  EXPECT_TRUE(j["aggregate"]["abasvrg"]["final_grad_norm_sq"].contains("std"));
  EXPECT_EQ(j["aggregate"]["abaspider"]["final_loss"]["count"], 2);
  std::istringstream cfg_text(j["config"].get<std::string>());
  EXPECT_EQ(ExperimentConfig::parse(cfg_text), cfg);
}

TEST(Runner, CompareTableOrderedAscending) {
  auto cfg = small_opt_config();
  cfg.algorithms = {"sgd", "abasvrg", "svrg_fixed", "abaspider", "spiderboost_fixed", "hsgd",
                    "abasgd"};
  cfg.seeds = {1};
  cfg.opt.max_epochs = 20;
  cfg.opt.eta = 0.5;
  cfg.threshold = 1e-4;
  const auto res = run_experiment(cfg);
  const auto& table = res.summary["compare"];
  ASSERT_EQ(table.size(), 7u);
  double last = -1.0;
  bool seen_unreached = false;
  for (const auto& row : table) {
    if (row["reached"].get<int>() == 0) {
      seen_unreached = true;
      continue;
    }
    EXPECT_FALSE(seen_unreached);
    EXPECT_GE(row["sfo_mean"].get<double>(), last);
    last = row["sfo_mean"].get<double>();
  }
  EXPECT_FALSE(format_compare_table(table).empty());
}

TEST(Runner, DivergenceSetsExitCode) {
  auto cfg = small_opt_config();
  cfg.opt.eta = 1e6;
  cfg.seeds = {1};
  cfg.algorithms = {"abasvrg"};
  const auto res = run_experiment(cfg);
  EXPECT_EQ(res.exit_code, kExitDiverged);
  EXPECT_EQ(res.traces[0].status, RunStatus::diverged);
}

TEST(Runner, PolicyGradientExperiment) {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::rl;
  cfg.algorithms = {"abaspiderpg", "spiderpg"};
  cfg.rl.max_epochs = 3;
  const auto res = run_experiment(cfg);
  ASSERT_EQ(res.traces.size(), 2u);
  EXPECT_EQ(res.summary["cost_unit"], "trajectories");
  for (const auto& t : res.traces) {
    EXPECT_TRUE(std::isfinite(t.final_grad_norm_sq));
    EXPECT_GT(t.final_loss, t.initial_loss);
  }
}

TEST(Runner, OutputDirFromEnvironment) {
  ::setenv("ABAVR_OUTPUT_DIR", "/tmp/abavr_env_dir", 1);
  EXPECT_EQ(default_output_dir(), "/tmp/abavr_env_dir");
  ::unsetenv("ABAVR_OUTPUT_DIR");
  EXPECT_EQ(default_output_dir(), "results");
}
