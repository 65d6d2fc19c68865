#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>

#include "json.hpp"

namespace abavr {

/// Outcome of one oracle check.
struct CheckReport {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::size_t sample_size = 0;
  std::uint64_t seed = 0;
  std::string detail;
  /// Secondary measurements (per-case values, variances, ...).
  std::map<std::string, double> extras;

  nlohmann::json to_json() const;
  /// Single-line JSON object.
  std::string to_json_line() const;
};

/// Wraps a check that is expected to fail: passes exactly when `inner` fails.
CheckReport negative_control(CheckReport inner);

}  // namespace abavr
