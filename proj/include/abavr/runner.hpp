#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"

#include "abavr/experiment_config.hpp"
#include "abavr/objective.hpp"
#include "abavr/run_trace.hpp"

namespace abavr {

inline constexpr int kSchemaVersion = 1;

/// Process exit statuses.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitInvalidConfig = 2,
  kExitDiverged = 3,
};

inline constexpr const char* kCsvHeader =
    "run_id,algo,seed,iter,epoch,sfo,loss,grad_norm_sq,batch_size";

std::string run_id(const std::string& algorithm, std::uint64_t seed);

/// One row per record; wall-clock time is left out so equal seeds give
/// byte-identical files.
void write_trace_csv(std::ostream& out, const RunTrace& trace, const std::string& id);

/// Builds the objective of an optimization experiment.
std::shared_ptr<const FiniteSumObjective> make_objective(const ObjectiveSpec& spec);

/// One (algorithm, seed) cell on a shared objective.
RunTrace run_optimizer(const FiniteSumObjective& obj, const std::string& algorithm,
                       const ExperimentConfig& cfg, std::uint64_t seed);

/// One (algorithm, seed) policy-gradient cell.
RunTrace run_policy_optimizer(const ExperimentConfig& cfg, const std::string& algorithm,
                              std::uint64_t seed);

struct ExperimentResult {
  std::vector<RunTrace> traces;
  nlohmann::json summary;
  int exit_code = kExitOk;
};

/// Runs every (algorithm, seed) cell on up to cfg.workers threads. When
/// cfg.output_dir is non-empty writes <run_id>.csv per cell and summary.json.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Cost-at-threshold table: rows sorted ascending by mean cost, algorithms
/// that never reached the threshold last.
nlohmann::json compare_table(const std::vector<RunTrace>& traces, double threshold);
std::string format_compare_table(const nlohmann::json& table);

/// Directory for outputs when none is configured: $ABAVR_OUTPUT_DIR or "results".
std::string default_output_dir();

}  // namespace abavr
