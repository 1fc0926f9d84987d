#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "schedrate/problem.hpp"
#include "schedrate/schedulers.hpp"

namespace schedrate {

inline constexpr double kDefaultConvergenceDelta = 1e-3;

// Spectral sup-rate for the supported model classes: E[T]/v_sum for i.i.d.,
// stationary E[T]/v_sum for Markov, max over components for mixtures
// (nested mixtures are flattened). Floating-point model parameters are
// rationalized to within 1e-10 before dividing by v_sum.
Rational ebar_theoretical(const SchedulingProblem& problem);

// Spectral inf-rate: equals ebar for i.i.d. and Markov, min over components
// for mixtures.
Rational ebar_underline_theoretical(const SchedulingProblem& problem);

bool strong_converse_holds(const SchedulingProblem& problem);

struct SpectralReport {
  std::vector<Rational> alpha_grid;
  std::vector<std::int64_t> n_grid;
  // tail[i][k] = P(T_n / (n v_sum) > alpha_k) at n = n_grid[i].
  std::vector<std::vector<double>> tail;
  // lower_tail[i][k] = P(T_n / (n v_sum) < alpha_k).
  std::vector<std::vector<double>> lower_tail;
  double delta = kDefaultConvergenceDelta;
  // Per alpha: upper tail below delta at the largest n and nonincreasing over
  // the last three n.
  std::vector<bool> converged;
  std::vector<bool> lower_converged;
  // Smallest converged alpha / largest lower-converged alpha.
  std::optional<Rational> ebar_estimate;
  std::optional<Rational> ebar_underline_estimate;
};

// Grids must be nonempty and strictly increasing.
SpectralReport spectral_scan(const SchedulingProblem& problem, const std::vector<Rational>& alpha_grid,
                             const std::vector<std::int64_t>& n_grid, double delta = kDefaultConvergenceDelta,
                             unsigned workers = 1);

struct RateExperimentRow {
  std::int64_t n = 0;
  Rational alpha;
  double discard_prob = 0.0;
  // Exact COST when `exact`; otherwise the certified upper end of the bracket.
  Rational cost;
  Rational cost_per_job;
  Rational cost_lo;
  Rational cost_hi;
  bool exact = false;
  // ebar + gamma + T_max / (n v_min)
  Rational rate_bound;
};

// Threshold discard set at alpha = ebar + gamma with the given scheduler.
// COST is enumerated exactly when it fits the scheduler's budget, otherwise
// bracketed by [K / v_sum, K / v_sum + T_max / v_min] with K the largest
// attainable kept T_n.
std::vector<RateExperimentRow> achievability_experiment(const SchedulingProblem& problem, const Rational& gamma,
                                                        const Scheduler& scheduler,
                                                        const std::vector<std::int64_t>& n_grid,
                                                        unsigned workers = 1);

struct ConverseRow {
  std::int64_t n = 0;
  Rational target_rate;
  // Any scheduling with COST/n <= target must discard at least this much.
  double min_discard_prob = 0.0;
};

// Requires 0 < gap < ebar; target rate is ebar - gap.
std::vector<ConverseRow> converse_experiment(const SchedulingProblem& problem, const Rational& gap,
                                             const std::vector<std::int64_t>& n_grid, unsigned workers = 1);

struct AverageCaseResult {
  std::int64_t n = 0;
  std::int64_t trials = 0;
  double mc_mean_span_per_job = 0.0;
  double std_error = 0.0;
  double bracket_lo = 0.0;  // E[T_n] / (n v_sum)
  double bracket_hi = 0.0;  // bracket_lo + T_max / (n v_min)

  // mc mean within [lo - 3 SE, hi + 3 SE].
  bool within_bracket() const noexcept {
    return mc_mean_span_per_job >= bracket_lo - 3.0 * std_error &&
           mc_mean_span_per_job <= bracket_hi + 3.0 * std_error;
  }
};

AverageCaseResult average_case_bracket(const SchedulingProblem& problem, std::int64_t n, std::int64_t trials,
                                       std::uint64_t seed, const Scheduler& scheduler, unsigned workers = 1);

}  // namespace schedrate
