#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "schedrate/problem.hpp"
#include "schedrate/rational.hpp"
#include "schedrate/schedulers.hpp"

namespace schedrate::cli {

// Description of a job process as written in a config file.
struct ProcessSpec {
  std::string kind;  // "iid" | "markov" | "mixture"
  std::map<std::string, double> probs;
  std::map<std::string, double> initial;
  std::map<std::string, std::map<std::string, double>> transition;
  std::vector<double> weights;
  std::vector<ProcessSpec> components;

  friend bool operator==(const ProcessSpec&, const ProcessSpec&) = default;
};

struct ProblemSpec {
  std::vector<std::pair<std::string, std::int64_t>> alphabet;
  std::vector<Rational> speeds;
  ProcessSpec process;

  friend bool operator==(const ProblemSpec&, const ProblemSpec&) = default;
};

inline const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds{"validate", "scan",         "achievability", "converse",
                                              "second-order", "average-case", "cost"};
  return kinds;
}

struct ExperimentSpec {
  std::string kind;
  std::vector<std::int64_t> n_grid;
  std::vector<Rational> alpha_grid;
  std::optional<Rational> alpha;
  std::optional<Rational> gamma;
  std::optional<Rational> gap;
  std::optional<double> epsilon;
  std::int64_t trials = 1000;
  std::uint64_t master_seed = 0;
  std::uint64_t budget = kDefaultBudget;
  double delta = 1e-3;
  std::string scheduler = "eft";
  unsigned workers = 1;
  bool strict_window = false;

  friend bool operator==(const ExperimentSpec&, const ExperimentSpec&) = default;
};

struct ExperimentConfig {
  ProblemSpec problem;
  ExperimentSpec experiment;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

// JSON text -> validated config. ConfigError lists every problem found.
ExperimentConfig parse_config(std::string_view text);

// Canonical JSON; parse_config(emit_config(c)) == c.
std::string emit_config(const ExperimentConfig& config);

// 16 hex digits, FNV-1a over emit_config.
std::string config_hash(const ExperimentConfig& config);

SchedulingProblem build_problem(const ProblemSpec& spec);

}  // namespace schedrate::cli
