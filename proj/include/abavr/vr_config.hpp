#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace abavr {

enum class OutputMode { last, uniform_random_iterate };
enum class SfoMode { samples, gradient_evals };
enum class MetricCadence { epoch, iteration };

std::string_view to_string(OutputMode mode);
std::string_view to_string(SfoMode mode);
std::string_view to_string(MetricCadence cadence);
OutputMode parse_output_mode(std::string_view text);
SfoMode parse_sfo_mode(std::string_view text);
MetricCadence parse_metric_cadence(std::string_view text);

/// Tunables shared by the epoch-based optimizers.
struct AbaConfig {
  double c_beta = 16.0;
  double c_eps = 16.0;
  double eps = 1e-3;
  double sigma_sq = 1.0;
  /// beta_1; defaults to eps * max_epochs when unset.
  std::optional<double> beta_init;
  std::size_t m = 10;
  std::size_t B = 100;
  double eta = 0.1;
  std::size_t max_epochs = 200;
  OutputMode output_mode = OutputMode::last;
  SfoMode sfo_mode = SfoMode::samples;
  MetricCadence cadence = MetricCadence::epoch;
  /// Stop once a measured grad-norm^2 is at or below this value.
  std::optional<double> stop_grad_norm_sq;

  double initial_beta() const;
  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// AbaSGD knobs on top of AbaConfig (m is the history window there).
struct AbaSgdOptions {
  double alpha0 = 1.0;
  double c_beta = 2.0;
  double c_eps = 24.0;
};

}  // namespace abavr
