#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "schedrate/core.hpp"

namespace schedrate {

// Row sums and probability vectors must hit 1 within this tolerance.
inline constexpr double kStochasticTolerance = 1e-12;

// Jobs drawn independently from one per-symbol law.
class IIDModel {
 public:
  IIDModel(std::vector<std::string> symbols, std::vector<double> probs);
  // Symbols missing from `probs` get probability 0; unknown symbols throw.
  static IIDModel over(const JobAlphabet& alphabet, const std::map<std::string, double>& probs);

  const std::vector<std::string>& symbols() const noexcept { return symbols_; }
  const std::vector<double>& probs() const noexcept { return probs_; }

  friend bool operator==(const IIDModel&, const IIDModel&) = default;

 private:
  std::vector<std::string> symbols_;
  std::vector<double> probs_;
};

// First-order chain: P(j^n) = P(j_n | j_{n-1}) ... P(j_2 | j_1) P(j_1).
// Must be irreducible; periodic chains are accepted.
class MarkovModel {
 public:
  MarkovModel(std::vector<std::string> symbols, std::vector<std::vector<double>> transition,
              std::vector<double> initial);

  const std::vector<std::string>& symbols() const noexcept { return symbols_; }
  const std::vector<std::vector<double>>& transition() const noexcept { return transition_; }
  const std::vector<double>& initial() const noexcept { return initial_; }

  friend bool operator==(const MarkovModel&, const MarkovModel&) = default;

 private:
  std::vector<std::string> symbols_;
  std::vector<std::vector<double>> transition_;
  std::vector<double> initial_;
};

class JobProcess;

// P = sum_i w_i P^i over finitely many components sharing one alphabet.
// A countable mixture is represented by any finite truncation of it.
class MixtureModel {
 public:
  MixtureModel(std::vector<double> weights, std::vector<JobProcess> components);

  std::size_t size() const noexcept { return weights_.size(); }
  const std::vector<double>& weights() const noexcept { return weights_; }
  const JobProcess& component(std::size_t i) const { return *components_.at(i); }
  const std::vector<std::string>& symbols() const noexcept { return symbols_; }

  friend bool operator==(const MixtureModel& a, const MixtureModel& b);

 private:
  std::vector<double> weights_;
  std::vector<std::shared_ptr<const JobProcess>> components_;
  std::vector<std::string> symbols_;
};

// The sequence of laws {P_{J^n}}: i.i.d., Markov, or a mixture of processes.
class JobProcess {
 public:
  using Model = std::variant<IIDModel, MarkovModel, MixtureModel>;

  JobProcess(IIDModel m) : model_(std::move(m)) {}          // NOLINT(google-explicit-constructor)
  JobProcess(MarkovModel m) : model_(std::move(m)) {}       // NOLINT(google-explicit-constructor)
  JobProcess(MixtureModel m) : model_(std::move(m)) {}      // NOLINT(google-explicit-constructor)

  const Model& model() const noexcept { return model_; }
  const std::vector<std::string>& symbols() const;

  const IIDModel* as_iid() const noexcept { return std::get_if<IIDModel>(&model_); }
  const MarkovModel* as_markov() const noexcept { return std::get_if<MarkovModel>(&model_); }
  const MixtureModel* as_mixture() const noexcept { return std::get_if<MixtureModel>(&model_); }

  // Non-mixture leaves with their overall weights; nested mixtures are
  // multiplied out. A non-mixture process yields {(1, *this)}.
  std::vector<std::pair<double, JobProcess>> flattened() const;

  // Same process with symbols permuted into `order` (a permutation of symbols()).
  JobProcess reordered(const std::vector<std::string>& order) const;

  friend bool operator==(const JobProcess&, const JobProcess&) = default;

 private:
  Model model_;
};

// Exact law of T_n = sum of processing times of n jobs.
class SumDistribution {
 public:
  SumDistribution(std::int64_t n, std::int64_t min_sum, std::vector<double> mass, std::vector<char> reachable);

  std::int64_t n() const noexcept { return n_; }
  std::int64_t min_sum() const noexcept { return min_sum_; }
  std::int64_t max_sum() const noexcept { return min_sum_ + static_cast<std::int64_t>(mass_.size()) - 1; }

  double probability(std::int64_t s) const;
  bool reachable(std::int64_t s) const;
  // P(T_n > s) and P(T_n < s); both accumulated from the far end.
  double tail_greater(std::int64_t s) const;
  double tail_less(std::int64_t s) const;

  double total_mass() const;
  double mean() const;
  // Reachable sums in increasing order.
  std::vector<std::int64_t> support() const;
  // Largest reachable sum <= s, if any.
  std::optional<std::int64_t> max_reachable_at_most(std::int64_t s) const;

  const std::vector<double>& masses() const noexcept { return mass_; }

 private:
  std::int64_t n_;
  std::int64_t min_sum_;
  std::vector<double> mass_;
  std::vector<char> reachable_;
  std::vector<double> upper_;  // upper_[k] = P(T_n >= min_sum + k)
  std::vector<double> lower_;  // lower_[k] = P(T_n <= min_sum + k)
};

// Largest sum table sum_distribution will allocate.
inline constexpr std::int64_t kMaxSumSpan = 50'000'000;

// Exact-to-rounding law of T_n under the process. Markov chains start from
// their explicit initial vector.
SumDistribution sum_distribution(const JobProcess& process, const JobAlphabet& alphabet, std::int64_t n);

// Seed for worker `worker`, trial `trial`; independent of how trials are
// distributed across workers.
std::uint64_t stream_seed(std::uint64_t master_seed, std::uint64_t worker, std::uint64_t trial);

// One realization of J^n. Mixtures pick a component once per sequence.
JobSequence sample_sequence(const JobProcess& process, const JobAlphabet& alphabet, std::int64_t n,
                            std::uint64_t seed);

// pi with pi * P = pi, sum 1. NumericError (with the residual) if the solve is inaccurate.
std::vector<double> stationary_distribution(const MarkovModel& model);

// E[T(J)]: one entry for i.i.d. (per-symbol law) and Markov (stationary law);
// one entry per flattened component for a mixture.
std::vector<double> expected_processing_time(const JobProcess& process, const JobAlphabet& alphabet);

// Central moments of T(J); i.i.d. only.
double variance_processing_time(const JobProcess& process, const JobAlphabet& alphabet);
double third_abs_central_moment(const JobProcess& process, const JobAlphabet& alphabet);

}  // namespace schedrate
