#include "abavr/check_report.hpp"

#include <cmath>

namespace abavr {

namespace {
// JSON has no NaN/inf; emit null for those.
nlohmann::json number(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}
}  // namespace

nlohmann::json CheckReport::to_json() const {
  nlohmann::json j;
  j["name"] = name;
  j["passed"] = passed;
  j["measured"] = number(measured);
  j["tolerance"] = number(tolerance);
  j["sample_size"] = sample_size;
  j["seed"] = seed;
  if (!detail.empty()) j["detail"] = detail;
  if (!extras.empty()) {
    nlohmann::json e = nlohmann::json::object();
    for (const auto& [key, value] : extras) e[key] = number(value);
    j["extras"] = std::move(e);
  }
  return j;
}

std::string CheckReport::to_json_line() const { return to_json().dump(); }

CheckReport negative_control(CheckReport inner) {
  inner.name = "negative_control/" + inner.name;
  inner.passed = !inner.passed;
  inner.detail = (inner.passed ? "property violated as expected" : "control unexpectedly passed") +
                 (inner.detail.empty() ? std::string() : "; " + inner.detail);
  return inner;
}

}  // namespace abavr
