#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "abavr/rl_algorithms.hpp"
#include "abavr/vr_algorithms.hpp"
#include "abavr/vr_config.hpp"

namespace abavr {

enum class ExperimentKind { opt, rl };

struct ObjectiveSpec {
  /// logreg (synthetic), libsvm, or pl (synthetic least squares).
  std::string kind = "logreg";
  std::string path;
  std::size_t n = 1000;
  std::size_t d = 20;
  std::uint64_t data_seed = 0;
  double reg_alpha = 0.1;
  double label_flip = 0.1;
  bool scale = false;
  bool operator==(const ObjectiveSpec&) const = default;
};

struct EnvSpec {
  /// chain5, push, or file:<path>.
  std::string name = "chain5";
  /// Overrides of the environment's own horizon / discount.
  std::optional<std::size_t> horizon;
  std::optional<double> gamma;
  /// action_affine or tabular (finite MDPs only).
  std::string policy = "action_affine";
  bool operator==(const EnvSpec&) const = default;
};

/// Everything needed to reproduce a batch of runs.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::opt;
  std::vector<std::string> algorithms{"abasvrg"};
  std::vector<std::uint64_t> seeds{1};
  std::string output_dir;
  std::size_t workers = 1;
  /// grad-norm^2 level for the cost-at-threshold table; defaults to eps
  /// (optimization) or 10 eps (policy gradient).
  std::optional<double> threshold;

  ObjectiveSpec objective;
  AbaConfig opt;
  /// Estimate sigma^2 at x0 instead of using opt.sigma_sq.
  bool sigma_sq_auto = false;
  AbaSgdOptions sgd;
  BaselineParams baseline;

  EnvSpec env;
  RlAbaConfig rl;

  double effective_threshold() const;

  /// Throws std::invalid_argument on unknown algorithms, empty seed lists
  /// or invalid optimizer settings.
  void validate() const;

  /// Sets one `section.key` (or bare top-level key) from text.
  void set(const std::string& key, const std::string& value);

  /// `[section]` headers and `key = value` lines; '#' starts a comment.
  static ExperimentConfig parse(std::istream& in);
  static ExperimentConfig load(const std::string& path);
  /// Canonical text form; parse(serialize()) reproduces the config.
  std::string serialize() const;

  bool operator==(const ExperimentConfig& other) const;
};

std::string_view to_string(ExperimentKind kind);

const std::vector<std::string>& optimization_algorithms();
const std::vector<std::string>& policy_gradient_algorithms();

}  // namespace abavr
