#include "schedrate/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "schedrate/errors.hpp"
#include "schedrate/parallel.hpp"

namespace schedrate {

namespace {

std::vector<Rational> component_rates(const SchedulingProblem& problem) {
  auto means = expected_processing_time(problem.process(), problem.alphabet());
  std::vector<Rational> rates;
  rates.reserve(means.size());
  for (double mean : means) rates.push_back(rationalize(mean) / problem.machines().v_sum());
  return rates;
}

void require_increasing(const std::vector<std::int64_t>& n_grid) {
  if (n_grid.empty()) throw DomainError("n grid must not be empty");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 1) throw DomainError("n grid entries must be >= 1");
    if (i > 0 && n_grid[i] <= n_grid[i - 1]) throw DomainError("n grid must be strictly increasing");
  }
}

// P(T_n / (n v_sum) > alpha) and P(T_n / (n v_sum) < alpha) on an exact law.
double upper_tail_at(const SumDistribution& dist, const Rational& alpha, const MachineSet& machines) {
  return dist.tail_greater(floor(Rational(dist.n()) * machines.v_sum() * alpha));
}

double lower_tail_at(const SumDistribution& dist, const Rational& beta, const MachineSet& machines) {
  // T_n < x  <=>  T_n < ceil(x)
  const Rational x = Rational(dist.n()) * machines.v_sum() * beta;
  std::int64_t c = floor(x);
  if (Rational(c) != x) ++c;
  return dist.tail_less(c);
}

bool nonincreasing_tail(const std::vector<std::vector<double>>& table, std::size_t column) {
  const std::size_t rows = table.size();
  const std::size_t first = rows >= 3 ? rows - 3 : 0;
  for (std::size_t i = first + 1; i < rows; ++i) {
    if (table[i][column] > table[i - 1][column]) return false;
  }
  return true;
}

}  // namespace

Rational ebar_theoretical(const SchedulingProblem& problem) {
  auto rates = component_rates(problem);
  return *std::max_element(rates.begin(), rates.end());
}

Rational ebar_underline_theoretical(const SchedulingProblem& problem) {
  auto rates = component_rates(problem);
  return *std::min_element(rates.begin(), rates.end());
}

bool strong_converse_holds(const SchedulingProblem& problem) {
  return ebar_theoretical(problem) == ebar_underline_theoretical(problem);
}

SpectralReport spectral_scan(const SchedulingProblem& problem, const std::vector<Rational>& alpha_grid,
                             const std::vector<std::int64_t>& n_grid, double delta, unsigned workers) {
  if (alpha_grid.empty()) throw DomainError("alpha grid must not be empty");
  for (std::size_t k = 0; k < alpha_grid.size(); ++k) {
    if (alpha_grid[k] < 0) throw DomainError("alpha grid entries must be non-negative");
    if (k > 0 && alpha_grid[k] <= alpha_grid[k - 1]) throw DomainError("alpha grid must be strictly increasing");
  }
  require_increasing(n_grid);
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("convergence threshold delta must lie in (0, 1)");

  SpectralReport report;
  report.alpha_grid = alpha_grid;
  report.n_grid = n_grid;
  report.delta = delta;
  report.tail.assign(n_grid.size(), std::vector<double>(alpha_grid.size(), 0.0));
  report.lower_tail = report.tail;

  parallel_for(n_grid.size(), workers, [&](std::size_t i) {
    auto dist = sum_distribution(problem.process(), problem.alphabet(), n_grid[i]);
    for (std::size_t k = 0; k < alpha_grid.size(); ++k) {
      report.tail[i][k] = upper_tail_at(dist, alpha_grid[k], problem.machines());
      report.lower_tail[i][k] = lower_tail_at(dist, alpha_grid[k], problem.machines());
    }
  });

  report.converged.assign(alpha_grid.size(), false);
  report.lower_converged.assign(alpha_grid.size(), false);
  for (std::size_t k = 0; k < alpha_grid.size(); ++k) {
    report.converged[k] = report.tail.back()[k] < delta && nonincreasing_tail(report.tail, k);
    report.lower_converged[k] = report.lower_tail.back()[k] < delta && nonincreasing_tail(report.lower_tail, k);
  }
  for (std::size_t k = 0; k < alpha_grid.size(); ++k) {
    if (report.converged[k]) {
      report.ebar_estimate = alpha_grid[k];
      break;
    }
  }
  for (std::size_t k = alpha_grid.size(); k-- > 0;) {
    if (report.lower_converged[k]) {
      report.ebar_underline_estimate = alpha_grid[k];
      break;
    }
  }
  return report;
}

std::vector<RateExperimentRow> achievability_experiment(const SchedulingProblem& problem, const Rational& gamma,
                                                        const Scheduler& scheduler,
                                                        const std::vector<std::int64_t>& n_grid, unsigned workers) {
  if (gamma <= 0) throw DomainError("gamma must be positive");
  require_increasing(n_grid);
  const auto& alphabet = problem.alphabet();
  const auto& machines = problem.machines();
  const Rational alpha = ebar_theoretical(problem) + gamma;
  const Rational slack = Rational(alphabet.t_max()) / machines.v_min();

  std::vector<RateExperimentRow> rows(n_grid.size());
  parallel_for(n_grid.size(), workers, [&](std::size_t i) {
    const std::int64_t n = n_grid[i];
    ThresholdDiscardSet discard(n, alpha);
    if (!discard.kept_nonempty(alphabet, machines)) {
      throw DomainError("alpha = " + to_string(alpha) + " keeps no sequence at n = " + std::to_string(n));
    }
    RateExperimentRow row;
    row.n = n;
    row.alpha = alpha;
    row.discard_prob = discard_probability(discard, problem);
    row.rate_bound = alpha + slack / Rational(n);

    const auto kept = max_attainable_sum_at_most(alphabet, n, discard.max_kept_sum(machines));
    row.cost_lo = Rational(*kept) / machines.v_sum();
    row.cost_hi = row.cost_lo + slack;

    bool fits = cost_enumeration_size(scheduler, n, alphabet) <= scheduler.budget;
    if (scheduler.strategy == Strategy::BruteForce) {
      const auto m = static_cast<long double>(machines.size());
      fits = fits && std::pow(m, static_cast<long double>(n)) <= static_cast<long double>(scheduler.budget);
    }
    if (fits) {
      row.cost = cost_exact(scheduler, discard, problem);
      row.exact = true;
    } else {
      row.cost = row.cost_hi;
    }
    row.cost_per_job = row.cost / Rational(n);
    rows[i] = row;
  });
  return rows;
}

std::vector<ConverseRow> converse_experiment(const SchedulingProblem& problem, const Rational& gap,
                                             const std::vector<std::int64_t>& n_grid, unsigned workers) {
  const Rational ebar = ebar_theoretical(problem);
  if (gap <= 0 || gap >= ebar) {
    throw DomainError("gap out of range: need 0 < gap < ebar = " + to_string(ebar) + ", got " + to_string(gap));
  }
  require_increasing(n_grid);
  const Rational target = ebar - gap;
  std::vector<ConverseRow> rows(n_grid.size());
  parallel_for(n_grid.size(), workers, [&](std::size_t i) {
    auto dist = sum_distribution(problem.process(), problem.alphabet(), n_grid[i]);
    rows[i] = ConverseRow{n_grid[i], target, upper_tail_at(dist, target, problem.machines())};
  });
  return rows;
}

AverageCaseResult average_case_bracket(const SchedulingProblem& problem, std::int64_t n, std::int64_t trials,
                                       std::uint64_t seed, const Scheduler& scheduler, unsigned workers) {
  if (trials < 1) throw DomainError("average-case bracket needs at least one trial");
  if (n < 1) throw DomainError("average-case bracket needs n >= 1");
  const auto& alphabet = problem.alphabet();
  const auto& machines = problem.machines();

  std::vector<double> per_job(static_cast<std::size_t>(trials));
  parallel_for(per_job.size(), workers, [&](std::size_t t) {
    auto seq = sample_sequence(problem.process(), alphabet, n, stream_seed(seed, 0, t));
    per_job[t] = to_double(scheduler.span(seq, alphabet, machines) / Rational(n));
  });

  AverageCaseResult out;
  out.n = n;
  out.trials = trials;
  const double count = static_cast<double>(trials);
  out.mc_mean_span_per_job = std::accumulate(per_job.begin(), per_job.end(), 0.0) / count;
  if (trials > 1) {
    double ss = 0.0;
    for (double x : per_job) ss += (x - out.mc_mean_span_per_job) * (x - out.mc_mean_span_per_job);
    out.std_error = std::sqrt(ss / (count - 1.0)) / std::sqrt(count);
  }
  const auto dist = sum_distribution(problem.process(), alphabet, n);
  out.bracket_lo = dist.mean() / (static_cast<double>(n) * to_double(machines.v_sum()));
  out.bracket_hi = out.bracket_lo + to_double(Rational(alphabet.t_max()) / (Rational(n) * machines.v_min()));
  return out;
}

}  // namespace schedrate
