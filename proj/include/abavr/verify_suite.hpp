#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "abavr/check_report.hpp"

namespace abavr {

/// Names accepted by run_suite.
const std::vector<std::string>& suite_names();

/// Runs the named oracle suite. Every check derives its own seed from
/// `seed`; negative controls are reported as passing when the wrapped
/// property is violated. Throws std::invalid_argument for unknown suites.
std::vector<CheckReport> run_suite(const std::string& name, std::uint64_t seed);

}  // namespace abavr
