#include "abavr/run_trace.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace abavr {

std::string_view to_string(OutputMode mode) {
  return mode == OutputMode::last ? "last" : "uniform";
}

std::string_view to_string(SfoMode mode) {
  return mode == SfoMode::samples ? "samples" : "gradient-evals";
}

std::string_view to_string(MetricCadence cadence) {
  return cadence == MetricCadence::epoch ? "epoch" : "iteration";
}

OutputMode parse_output_mode(std::string_view text) {
  if (text == "last") return OutputMode::last;
  if (text == "uniform" || text == "uniform-random-iterate") return OutputMode::uniform_random_iterate;
  throw std::invalid_argument("unknown output mode '" + std::string(text) + "'");
}

SfoMode parse_sfo_mode(std::string_view text) {
  if (text == "samples") return SfoMode::samples;
  if (text == "gradient-evals") return SfoMode::gradient_evals;
  throw std::invalid_argument("unknown sfo mode '" + std::string(text) + "'");
}

MetricCadence parse_metric_cadence(std::string_view text) {
  if (text == "epoch") return MetricCadence::epoch;
  if (text == "iteration") return MetricCadence::iteration;
  throw std::invalid_argument("unknown metric cadence '" + std::string(text) + "'");
}

double AbaConfig::initial_beta() const {
  return beta_init.value_or(eps * static_cast<double>(max_epochs));
}

void AbaConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("AbaConfig: " + what); };
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(c_beta) || c_beta < 0) fail("c_beta must be finite and >= 0");
  if (!finite(c_eps) || c_eps < 0) fail("c_eps must be finite and >= 0");
  if (!finite(eps) || eps <= 0) fail("eps must be finite and > 0");
  if (!finite(sigma_sq) || sigma_sq <= 0) fail("sigma_sq must be finite and > 0");
  if (beta_init && (!finite(*beta_init) || *beta_init < 0)) fail("beta_init must be >= 0");
  if (!finite(eta) || eta <= 0) fail("eta must be finite and > 0");
  if (m == 0) fail("m must be >= 1");
  if (B == 0) fail("B must be >= 1");
  if (max_epochs == 0) fail("max_epochs must be >= 1");
}

std::uint64_t sfo_increment(SfoEvent event, SfoMode mode) {
  switch (event.kind) {
    case SfoEvent::Kind::outer:
    case SfoEvent::Kind::plain:
      return event.count;
    case SfoEvent::Kind::inner:
      return mode == SfoMode::samples ? event.count : 2 * event.count;
  }
  return 0;
}

void SfoCounter::add(SfoEvent event) { total_ += sfo_increment(event, mode_); }

std::string_view to_string(RunStatus status) {
  switch (status) {
    case RunStatus::completed: return "completed";
    case RunStatus::reached_target: return "reached_target";
    case RunStatus::diverged: return "diverged";
  }
  return "unknown";
}

std::optional<std::uint64_t> RunTrace::sfo_at_threshold(double threshold) const {
  for (const auto& r : records) {
    if (!std::isnan(r.grad_norm_sq) && r.grad_norm_sq <= threshold) return r.sfo;
  }
  if (!std::isnan(final_grad_norm_sq) && final_grad_norm_sq <= threshold) return total_sfo;
  return std::nullopt;
}

std::size_t RunTrace::boundary_count() const {
  std::size_t c = 0;
  for (const auto& r : records) c += r.boundary ? 1 : 0;
  return c;
}

}  // namespace abavr
