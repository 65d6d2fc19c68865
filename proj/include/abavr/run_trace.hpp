#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "abavr/objective.hpp"
#include "abavr/vr_config.hpp"

namespace abavr {

/// Oracle cost of one algorithmic event. Anchor batches cost N either way;
/// a variance-reduced inner sample evaluates two component gradients, which
/// `gradient_evals` mode charges and `samples` mode does not.
struct SfoEvent {
  enum class Kind { outer, inner, plain };
  Kind kind;
  std::uint64_t count;

  static SfoEvent outer(std::uint64_t n) { return {Kind::outer, n}; }
  static SfoEvent inner(std::uint64_t b) { return {Kind::inner, b}; }
  /// Single-gradient-per-sample work (SGD-type steps).
  static SfoEvent plain(std::uint64_t b) { return {Kind::plain, b}; }
};

std::uint64_t sfo_increment(SfoEvent event, SfoMode mode);

class SfoCounter {
 public:
  explicit SfoCounter(SfoMode mode) : mode_(mode) {}
  void add(SfoEvent event);
  std::uint64_t total() const noexcept { return total_; }

 private:
  SfoMode mode_;
  std::uint64_t total_ = 0;
};

inline constexpr double kNotMeasured = std::numeric_limits<double>::quiet_NaN();

/// One row of a run. `sfo` is the oracle cost spent to reach the point at
/// which loss / grad_norm_sq were measured (NaN when not measured). Boundary
/// rows describe the snapshot an anchor batch of `batch_size` is drawn at.
/// For policy-gradient runs `sfo` counts trajectories and `loss` holds J.
struct TraceRecord {
  std::size_t iter = 0;
  std::size_t epoch = 0;
  bool boundary = false;
  std::uint64_t sfo = 0;
  double loss = kNotMeasured;
  double grad_norm_sq = kNotMeasured;
  std::size_t batch_size = 0;
  double wall_seconds = 0.0;
};

enum class RunStatus { completed, reached_target, diverged };
std::string_view to_string(RunStatus status);

struct RunTrace {
  std::string algorithm;
  std::uint64_t seed = 0;
  std::vector<TraceRecord> records;
  Vector final_iterate;
  Vector output_iterate;
  double initial_loss = kNotMeasured;
  double final_loss = kNotMeasured;
  double final_grad_norm_sq = kNotMeasured;
  double output_loss = kNotMeasured;
  double output_grad_norm_sq = kNotMeasured;
  std::uint64_t total_sfo = 0;
  RunStatus status = RunStatus::completed;
  std::string diagnostic;

  /// Cost at the first measured point with grad_norm_sq <= threshold.
  std::optional<std::uint64_t> sfo_at_threshold(double threshold) const;
  std::size_t boundary_count() const;
};

}  // namespace abavr
