#include "schedrate/cli/run.hpp"

#include <chrono>

#include <json.hpp>

#include "schedrate/errors.hpp"
#include "schedrate/secondorder.hpp"
#include "schedrate/spectrum.hpp"

namespace schedrate::cli {

namespace {

Scheduler scheduler_of(const ExperimentSpec& e) { return Scheduler{parse_strategy(e.scheduler), e.budget}; }

void run_validate(const SchedulingProblem& problem, const ExperimentSpec& e, ResultTable& table) {
  table.columns = {"n",       "lemma1_lo", "lemma1_hi",       "ebar",      "ebar_lower",
                   "strong_converse", "samples", "optimum_checked", "violations"};
  const auto ebar = ebar_theoretical(problem);
  const auto ebar_lower = ebar_underline_theoretical(problem);
  const auto scheduler = scheduler_of(e);
  for (auto n : e.n_grid) {
    const auto bracket = lemma1_cost_per_job_bracket(n, problem.alphabet(), problem.machines());
    const auto audit = sandwich_audit(problem, scheduler, n, e.trials, e.master_seed);
    table.add_row({n, bracket.lo, bracket.hi, ebar, ebar_lower, ebar == ebar_lower, audit.samples,
                   audit.optimum_checked, audit.violations});
  }
}

void run_scan(const SchedulingProblem& problem, const ExperimentSpec& e, ResultTable& table) {
  table.columns = {"n", "alpha", "tail", "lower_tail", "converged"};
  const auto report = spectral_scan(problem, e.alpha_grid, e.n_grid, e.delta, e.workers);
  for (std::size_t i = 0; i < report.n_grid.size(); ++i) {
    for (std::size_t k = 0; k < report.alpha_grid.size(); ++k) {
      table.add_row({report.n_grid[i], report.alpha_grid[k], report.tail[i][k], report.lower_tail[i][k],
                     static_cast<bool>(report.converged[k])});
    }
  }
  table.set_metadata("ebar_estimate", report.ebar_estimate ? to_string(*report.ebar_estimate) : "none");
  table.set_metadata("ebar_lower_estimate",
                     report.ebar_underline_estimate ? to_string(*report.ebar_underline_estimate) : "none");
  table.set_metadata("ebar_theoretical", to_string(ebar_theoretical(problem)));
}

void run_achievability(const SchedulingProblem& problem, const ExperimentSpec& e, ResultTable& table) {
  table.columns = {"n",       "alpha",   "discard_prob", "cost", "cost_per_job",
                   "cost_lo", "cost_hi", "exact",        "rate_bound"};
  for (const auto& r : achievability_experiment(problem, *e.gamma, scheduler_of(e), e.n_grid, e.workers)) {
    table.add_row({r.n, r.alpha, r.discard_prob, r.cost, r.cost_per_job, r.cost_lo, r.cost_hi, r.exact,
                   r.rate_bound});
  }
}

void run_converse(const SchedulingProblem& problem, const ExperimentSpec& e, ResultTable& table) {
  table.columns = {"n", "target_rate", "min_discard_prob"};
  for (const auto& r : converse_experiment(problem, *e.gap, e.n_grid, e.workers)) {
    table.add_row({r.n, r.target_rate, r.min_discard_prob});
  }
}

void run_second_order(const SchedulingProblem& problem, const ExperimentSpec& e, ResultTable& table) {
  table.columns = {"n", "epsilon", "r_n_plus", "cost_lo", "cost_hi", "prediction", "residual"};
  for (const auto& r : second_order_table(e.n_grid, *e.epsilon, problem, e.strict_window, e.workers)) {
    table.add_row({r.n, r.epsilon, r.r_n_plus, r.cost_lo, r.cost_hi, r.prediction, r.residual});
  }
}

void run_average_case(const SchedulingProblem& problem, const ExperimentSpec& e, ResultTable& table) {
  table.columns = {"n", "trials", "mc_mean", "std_error", "bracket_lo", "bracket_hi", "within"};
  const auto scheduler = scheduler_of(e);
  for (auto n : e.n_grid) {
    const auto r = average_case_bracket(problem, n, e.trials, e.master_seed, scheduler, e.workers);
    table.add_row({r.n, r.trials, r.mc_mean_span_per_job, r.std_error, r.bracket_lo, r.bracket_hi,
                   r.within_bracket()});
  }
}

void run_cost(const SchedulingProblem& problem, const ExperimentSpec& e, ResultTable& table) {
  table.columns = {"n", "alpha", "discard_prob", "cost"};
  const auto scheduler = scheduler_of(e);
  for (auto n : e.n_grid) {
    ThresholdDiscardSet discard(n, *e.alpha);
    table.add_row({n, *e.alpha, discard_probability(discard, problem), cost_exact(scheduler, discard, problem)});
  }
}

}  // namespace

ResultTable run(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const auto problem = build_problem(config.problem);
  const auto& e = config.experiment;

  ResultTable table;
  table.set_metadata("experiment", e.kind);
  table.set_metadata("config_hash", config_hash(config));
  table.set_metadata("seed", std::to_string(e.master_seed));
  table.set_metadata("tool_version", kToolVersion);

  if (e.kind == "validate") {
    run_validate(problem, e, table);
  } else if (e.kind == "scan") {
    run_scan(problem, e, table);
  } else if (e.kind == "achievability") {
    run_achievability(problem, e, table);
  } else if (e.kind == "converse") {
    run_converse(problem, e, table);
  } else if (e.kind == "second-order") {
    run_second_order(problem, e, table);
  } else if (e.kind == "average-case") {
    run_average_case(problem, e, table);
  } else if (e.kind == "cost") {
    run_cost(problem, e, table);
  } else {
    throw DomainError("unknown experiment kind '" + e.kind + "'");
  }

  const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
  table.set_metadata("wall_time_ms", std::to_string(elapsed.count()));
  return table;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const DomainError*>(&e)) return kExitConfig;
  if (dynamic_cast<const ResourceError*>(&e)) return kExitResource;
  if (dynamic_cast<const NumericError*>(&e)) return kExitNumeric;
  if (dynamic_cast<const std::bad_alloc*>(&e)) return kExitResource;
  return kExitNumeric;
}

std::string error_record(const std::exception& e) {
  std::string kind = "numeric";
  std::vector<std::string> messages{e.what()};
  if (const auto* c = dynamic_cast<const ConfigError*>(&e)) {
    kind = "config";
    messages = c->messages();
  } else if (dynamic_cast<const DomainError*>(&e)) {
    kind = "domain";
  } else if (dynamic_cast<const ResourceError*>(&e) || dynamic_cast<const std::bad_alloc*>(&e)) {
    kind = "resource";
  }
  nlohmann::ordered_json rec{{"error", kind}, {"exit_code", exit_code_for(e)}, {"messages", messages}};
  return rec.dump();
}

RunOutcome execute(const std::string& config_text, const RunOptions& options) {
  RunOutcome outcome;
  try {
    auto config = parse_config(config_text);
    if (options.expected_kind && config.experiment.kind != *options.expected_kind) {
      throw ConfigError({"experiment.kind is '" + config.experiment.kind + "' but the subcommand is '" +
                         *options.expected_kind + "'"});
    }
    if (options.seed) config.experiment.master_seed = *options.seed;
    if (options.workers) config.experiment.workers = *options.workers;
    outcome.output = emit(run(config), options.format);
  } catch (const std::exception& e) {
    outcome.exit_code = exit_code_for(e);
    outcome.error_record = error_record(e);
  }
  return outcome;
}

}  // namespace schedrate::cli
