#include "schedrate/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include <json.hpp>

#include "schedrate/errors.hpp"
#include "schedrate/stochastic.hpp"

namespace schedrate::cli {

using nlohmann::json;

namespace {

class Errors {
 public:
  void add(std::string message) { messages_.push_back(std::move(message)); }
  bool empty() const { return messages_.empty(); }
  std::vector<std::string> take() { return std::move(messages_); }

 private:
  std::vector<std::string> messages_;
};

std::string fmt_sum(double sum) {
  std::ostringstream os;
  os.precision(15);
  os << sum;
  return os.str();
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where,
                         Errors& errors) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.contains(it.key())) errors.add("unknown key '" + it.key() + "' in " + where);
  }
}

std::optional<Rational> read_rational(const json& value, const std::string& where, Errors& errors) {
  try {
    if (value.is_string()) return parse_rational(value.get<std::string>());
    if (value.is_number_integer()) return Rational(value.get<std::int64_t>());
    if (value.is_number_float()) {
      // Decimal text of the literal, e.g. 1.5 -> "1.5".
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.15g", value.get<double>());
      return parse_rational(buf);
    }
  } catch (const DomainError& e) {
    errors.add(where + ": " + e.what());
    return std::nullopt;
  }
  errors.add(where + ": expected a rational (string like \"3/2\" or \"1.5\", or a number)");
  return std::nullopt;
}

std::optional<double> read_double(const json& value, const std::string& where, Errors& errors) {
  if (value.is_number()) return value.get<double>();
  errors.add(where + ": expected a number");
  return std::nullopt;
}

std::map<std::string, double> read_prob_map(const json& value, const std::string& where,
                                            const std::set<std::string>& symbols, Errors& errors) {
  std::map<std::string, double> out;
  if (!value.is_object()) {
    errors.add(where + ": expected an object mapping symbols to probabilities");
    return out;
  }
  for (auto it = value.begin(); it != value.end(); ++it) {
    if (!symbols.empty() && !symbols.contains(it.key())) {
      errors.add(where + ": symbol '" + it.key() + "' is not defined in problem.alphabet");
    }
    if (auto p = read_double(it.value(), where + "." + it.key(), errors)) {
      if (*p < 0.0) errors.add(where + "." + it.key() + ": probability must be non-negative");
      out[it.key()] = *p;
    }
  }
  return out;
}

void check_sum(const std::map<std::string, double>& probs, const std::string& what, Errors& errors) {
  double sum = 0.0;
  for (const auto& [_, p] : probs) sum += p;
  if (std::abs(sum - 1.0) > kStochasticTolerance) errors.add(what + " sums to " + fmt_sum(sum) + ", expected 1");
}

ProcessSpec read_process(const json& value, const std::string& where, const std::set<std::string>& symbols,
                         Errors& errors) {
  ProcessSpec spec;
  if (!value.is_object()) {
    errors.add(where + ": expected an object");
    return spec;
  }
  if (!value.contains("kind") || !value["kind"].is_string()) {
    errors.add(where + ".kind: required, one of iid, markov, mixture");
    return spec;
  }
  spec.kind = value["kind"].get<std::string>();
  if (spec.kind == "iid") {
    reject_unknown_keys(value, {"kind", "probs"}, where, errors);
    if (!value.contains("probs")) {
      errors.add(where + ".probs: required for kind iid");
    } else {
      spec.probs = read_prob_map(value["probs"], where + ".probs", symbols, errors);
      check_sum(spec.probs, where + ".probs", errors);
    }
  } else if (spec.kind == "markov") {
    reject_unknown_keys(value, {"kind", "initial", "transition"}, where, errors);
    if (!value.contains("initial")) {
      errors.add(where + ".initial: required for kind markov");
    } else {
      spec.initial = read_prob_map(value["initial"], where + ".initial", symbols, errors);
      check_sum(spec.initial, where + ".initial", errors);
    }
    if (!value.contains("transition") || !value["transition"].is_object()) {
      errors.add(where + ".transition: required object of rows for kind markov");
    } else {
      const auto& rows = value["transition"];
      for (auto it = rows.begin(); it != rows.end(); ++it) {
        if (!symbols.empty() && !symbols.contains(it.key())) {
          errors.add(where + ".transition: row symbol '" + it.key() + "' is not defined in problem.alphabet");
        }
        auto row = read_prob_map(it.value(), where + ".transition." + it.key(), symbols, errors);
        check_sum(row, "transition row '" + it.key() + "'", errors);
        spec.transition[it.key()] = std::move(row);
      }
      for (const auto& s : symbols) {
        if (!spec.transition.contains(s)) errors.add(where + ".transition: missing row for symbol '" + s + "'");
      }
    }
  } else if (spec.kind == "mixture") {
    reject_unknown_keys(value, {"kind", "components"}, where, errors);
    if (!value.contains("components") || !value["components"].is_array()) {
      errors.add(where + ".components: required array for kind mixture");
      return spec;
    }
    const auto& comps = value["components"];
    if (comps.size() < 2) errors.add(where + ".components: a mixture needs at least two components");
    double total = 0.0;
    for (std::size_t i = 0; i < comps.size(); ++i) {
      const std::string at = where + ".components[" + std::to_string(i) + "]";
      const auto& c = comps[i];
      if (!c.is_object()) {
        errors.add(at + ": expected an object with weight and process");
        continue;
      }
      reject_unknown_keys(c, {"weight", "process"}, at, errors);
      double w = 0.0;
      if (!c.contains("weight")) {
        errors.add(at + ".weight: required");
      } else if (auto parsed = read_double(c["weight"], at + ".weight", errors)) {
        w = *parsed;
        if (!(w > 0.0)) errors.add(at + ".weight: must be positive");
      }
      total += w;
      spec.weights.push_back(w);
      if (!c.contains("process")) {
        errors.add(at + ".process: required");
        spec.components.emplace_back();
      } else {
        spec.components.push_back(read_process(c["process"], at + ".process", symbols, errors));
      }
    }
    if (std::abs(total - 1.0) > kStochasticTolerance) {
      errors.add(where + ".components: weights sum to " + fmt_sum(total) + ", expected 1");
    }
  } else {
    errors.add(where + ".kind: unknown process kind '" + spec.kind + "' (expected iid, markov or mixture)");
  }
  return spec;
}

ProblemSpec read_problem(const json& value, Errors& errors) {
  ProblemSpec spec;
  if (!value.is_object()) {
    errors.add("problem: expected an object");
    return spec;
  }
  reject_unknown_keys(value, {"alphabet", "machines", "process"}, "problem", errors);

  std::set<std::string> symbols;
  if (!value.contains("alphabet") || !value["alphabet"].is_array() || value["alphabet"].empty()) {
    errors.add("problem.alphabet: required nonempty array of {symbol, time}");
  } else {
    const auto& entries = value["alphabet"];
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const std::string at = "problem.alphabet[" + std::to_string(i) + "]";
      const auto& e = entries[i];
      if (!e.is_object() || !e.contains("symbol") || !e["symbol"].is_string() || !e.contains("time")) {
        errors.add(at + ": expected {\"symbol\": string, \"time\": positive integer}");
        continue;
      }
      reject_unknown_keys(e, {"symbol", "time"}, at, errors);
      const auto symbol = e["symbol"].get<std::string>();
      if (!symbols.insert(symbol).second) errors.add(at + ": symbol '" + symbol + "' defined more than once");
      if (!e["time"].is_number_integer() || e["time"].get<std::int64_t>() < 1) {
        errors.add(at + ".time: processing time of '" + symbol + "' must be a positive integer");
        continue;
      }
      spec.alphabet.emplace_back(symbol, e["time"].get<std::int64_t>());
    }
  }

  if (!value.contains("machines") || !value["machines"].is_array() || value["machines"].empty()) {
    errors.add("problem.machines: required nonempty array of speeds");
  } else {
    const auto& speeds = value["machines"];
    for (std::size_t i = 0; i < speeds.size(); ++i) {
      const std::string at = "problem.machines[" + std::to_string(i) + "]";
      if (auto v = read_rational(speeds[i], at, errors)) {
        if (*v <= 0) {
          errors.add(at + ": speed must be positive, got " + to_string(*v));
        } else {
          spec.speeds.push_back(*v);
        }
      }
    }
  }

  if (!value.contains("process")) {
    errors.add("problem.process: required");
  } else {
    spec.process = read_process(value["process"], "problem.process", symbols, errors);
  }
  return spec;
}

std::vector<std::int64_t> read_n_grid(const json& value, Errors& errors) {
  std::vector<std::int64_t> out;
  if (!value.is_array() || value.empty()) {
    errors.add("experiment.n_grid: expected a nonempty array of positive integers");
    return out;
  }
  for (const auto& v : value) {
    if (!v.is_number_integer() || v.get<std::int64_t>() < 1) {
      errors.add("experiment.n_grid: entries must be positive integers");
      return {};
    }
    out.push_back(v.get<std::int64_t>());
  }
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i] <= out[i - 1]) {
      errors.add("experiment.n_grid: must be strictly increasing");
      break;
    }
  }
  return out;
}

ExperimentSpec read_experiment(const json& value, Errors& errors) {
  ExperimentSpec spec;
  if (!value.is_object()) {
    errors.add("experiment: expected an object");
    return spec;
  }
  reject_unknown_keys(value,
                      {"kind", "n_grid", "alpha_grid", "alpha", "gamma", "gap", "epsilon", "trials", "master_seed",
                       "budget", "delta", "scheduler", "workers", "strict_window"},
                      "experiment", errors);
  if (!value.contains("kind") || !value["kind"].is_string()) {
    errors.add("experiment.kind: required");
  } else {
    spec.kind = value["kind"].get<std::string>();
    const auto& kinds = experiment_kinds();
    if (std::find(kinds.begin(), kinds.end(), spec.kind) == kinds.end()) {
      errors.add("experiment.kind: unknown kind '" + spec.kind + "'");
    }
  }
  if (value.contains("n_grid")) spec.n_grid = read_n_grid(value["n_grid"], errors);
  if (value.contains("alpha_grid")) {
    const auto& grid = value["alpha_grid"];
    if (!grid.is_array() || grid.empty()) {
      errors.add("experiment.alpha_grid: expected a nonempty array");
    } else {
      for (std::size_t i = 0; i < grid.size(); ++i) {
        if (auto r = read_rational(grid[i], "experiment.alpha_grid[" + std::to_string(i) + "]", errors)) {
          spec.alpha_grid.push_back(*r);
        }
      }
      for (std::size_t i = 1; i < spec.alpha_grid.size(); ++i) {
        if (spec.alpha_grid[i] <= spec.alpha_grid[i - 1]) {
          errors.add("experiment.alpha_grid: must be strictly increasing");
          break;
        }
      }
    }
  }
  if (value.contains("alpha")) spec.alpha = read_rational(value["alpha"], "experiment.alpha", errors);
  if (value.contains("gamma")) spec.gamma = read_rational(value["gamma"], "experiment.gamma", errors);
  if (value.contains("gap")) spec.gap = read_rational(value["gap"], "experiment.gap", errors);
  if (value.contains("epsilon")) {
    spec.epsilon = read_double(value["epsilon"], "experiment.epsilon", errors);
    if (spec.epsilon && !(*spec.epsilon > 0.0 && *spec.epsilon < 1.0)) {
      errors.add("experiment.epsilon: must lie in (0, 1)");
    }
  }
  if (value.contains("trials")) {
    if (!value["trials"].is_number_integer() || value["trials"].get<std::int64_t>() < 1) {
      errors.add("experiment.trials: must be a positive integer");
    } else {
      spec.trials = value["trials"].get<std::int64_t>();
    }
  }
  if (value.contains("master_seed")) {
    if (!value["master_seed"].is_number_unsigned()) {
      errors.add("experiment.master_seed: must be an unsigned 64-bit integer");
    } else {
      spec.master_seed = value["master_seed"].get<std::uint64_t>();
    }
  }
  if (value.contains("budget")) {
    if (!value["budget"].is_number_unsigned() || value["budget"].get<std::uint64_t>() == 0) {
      errors.add("experiment.budget: must be a positive integer");
    } else {
      spec.budget = value["budget"].get<std::uint64_t>();
    }
  }
  if (value.contains("delta")) {
    if (auto d = read_double(value["delta"], "experiment.delta", errors)) {
      if (!(*d > 0.0 && *d < 1.0)) errors.add("experiment.delta: must lie in (0, 1)");
      spec.delta = *d;
    }
  }
  if (value.contains("scheduler")) {
    if (!value["scheduler"].is_string()) {
      errors.add("experiment.scheduler: expected a string");
    } else {
      spec.scheduler = value["scheduler"].get<std::string>();
      try {
        parse_strategy(spec.scheduler);
      } catch (const DomainError& e) {
        errors.add(std::string("experiment.scheduler: ") + e.what());
      }
    }
  }
  if (value.contains("workers")) {
    if (!value["workers"].is_number_unsigned() || value["workers"].get<unsigned>() == 0) {
      errors.add("experiment.workers: must be a positive integer");
    } else {
      spec.workers = value["workers"].get<unsigned>();
    }
  }
  if (value.contains("strict_window")) {
    if (!value["strict_window"].is_boolean()) {
      errors.add("experiment.strict_window: expected true or false");
    } else {
      spec.strict_window = value["strict_window"].get<bool>();
    }
  }

  // Per-kind required parameters.
  const auto need = [&](bool present, const char* key) {
    if (!present) errors.add("experiment." + std::string(key) + ": required for kind " + spec.kind);
  };
  if (spec.kind == "validate") {
    if (spec.n_grid.empty() && !value.contains("n_grid")) spec.n_grid = {1};
  } else if (spec.kind == "scan") {
    need(value.contains("n_grid"), "n_grid");
    need(value.contains("alpha_grid"), "alpha_grid");
  } else if (spec.kind == "achievability") {
    need(value.contains("n_grid"), "n_grid");
    need(value.contains("gamma"), "gamma");
  } else if (spec.kind == "converse") {
    need(value.contains("n_grid"), "n_grid");
    need(value.contains("gap"), "gap");
  } else if (spec.kind == "second-order") {
    need(value.contains("n_grid"), "n_grid");
    need(value.contains("epsilon"), "epsilon");
  } else if (spec.kind == "average-case") {
    need(value.contains("n_grid"), "n_grid");
  } else if (spec.kind == "cost") {
    need(value.contains("n_grid"), "n_grid");
    need(value.contains("alpha"), "alpha");
  }
  return spec;
}

json rational_json(const Rational& r) { return to_string(r); }

json process_json(const ProcessSpec& spec) {
  json out;
  out["kind"] = spec.kind;
  if (spec.kind == "iid") {
    out["probs"] = spec.probs;
  } else if (spec.kind == "markov") {
    out["initial"] = spec.initial;
    out["transition"] = spec.transition;
  } else if (spec.kind == "mixture") {
    json comps = json::array();
    for (std::size_t i = 0; i < spec.components.size(); ++i) {
      comps.push_back({{"weight", spec.weights[i]}, {"process", process_json(spec.components[i])}});
    }
    out["components"] = comps;
  }
  return out;
}

JobProcess build_process(const ProcessSpec& spec, const JobAlphabet& alphabet) {
  if (spec.kind == "iid") return IIDModel::over(alphabet, spec.probs);
  if (spec.kind == "markov") {
    const auto k = alphabet.size();
    std::vector<std::vector<double>> t(k, std::vector<double>(k, 0.0));
    std::vector<double> init(k, 0.0);
    for (const auto& [sym, p] : spec.initial) init[alphabet.index_of(sym)] = p;
    for (const auto& [from, row] : spec.transition) {
      for (const auto& [to, p] : row) t[alphabet.index_of(from)][alphabet.index_of(to)] = p;
    }
    return MarkovModel(alphabet.symbols(), std::move(t), std::move(init));
  }
  if (spec.kind == "mixture") {
    std::vector<JobProcess> comps;
    for (const auto& c : spec.components) comps.push_back(build_process(c, alphabet));
    return MixtureModel(spec.weights, std::move(comps));
  }
  throw DomainError("unknown process kind '" + spec.kind + "'");
}

}  // namespace

SchedulingProblem build_problem(const ProblemSpec& spec) {
  std::vector<std::string> symbols;
  std::vector<std::int64_t> times;
  for (const auto& [s, t] : spec.alphabet) {
    symbols.push_back(s);
    times.push_back(t);
  }
  JobAlphabet alphabet(std::move(symbols), std::move(times));
  MachineSet machines(spec.speeds);
  JobProcess process = build_process(spec.process, alphabet);
  return SchedulingProblem(std::move(alphabet), std::move(machines), std::move(process));
}

ExperimentConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("config is not valid JSON: ") + e.what()});
  }
  Errors errors;
  ExperimentConfig config;
  if (!doc.is_object()) {
    throw ConfigError({"config must be a JSON object with keys problem and experiment"});
  }
  reject_unknown_keys(doc, {"problem", "experiment"}, "top level", errors);
  if (!doc.contains("problem")) {
    errors.add("problem: required");
  } else {
    config.problem = read_problem(doc["problem"], errors);
  }
  if (!doc.contains("experiment")) {
    errors.add("experiment: required");
  } else {
    config.experiment = read_experiment(doc["experiment"], errors);
  }
  if (errors.empty()) {
    // Structural checks passed; the model constructors catch the rest
    // (e.g. reducible chains).
    try {
      build_problem(config.problem);
    } catch (const DomainError& e) {
      errors.add(std::string("problem: ") + e.what());
    }
  }
  if (!errors.empty()) throw ConfigError(errors.take());
  return config;
}

std::string emit_config(const ExperimentConfig& config) {
  json problem;
  json alphabet = json::array();
  for (const auto& [s, t] : config.problem.alphabet) alphabet.push_back({{"symbol", s}, {"time", t}});
  problem["alphabet"] = alphabet;
  json speeds = json::array();
  for (const auto& v : config.problem.speeds) speeds.push_back(rational_json(v));
  problem["machines"] = speeds;
  problem["process"] = process_json(config.problem.process);

  const auto& e = config.experiment;
  json exp;
  exp["kind"] = e.kind;
  exp["n_grid"] = e.n_grid;
  if (!e.alpha_grid.empty()) {
    json grid = json::array();
    for (const auto& a : e.alpha_grid) grid.push_back(rational_json(a));
    exp["alpha_grid"] = grid;
  }
  if (e.alpha) exp["alpha"] = rational_json(*e.alpha);
  if (e.gamma) exp["gamma"] = rational_json(*e.gamma);
  if (e.gap) exp["gap"] = rational_json(*e.gap);
  if (e.epsilon) exp["epsilon"] = *e.epsilon;
  exp["trials"] = e.trials;
  exp["master_seed"] = e.master_seed;
  exp["budget"] = e.budget;
  exp["delta"] = e.delta;
  exp["scheduler"] = e.scheduler;
  exp["workers"] = e.workers;
  exp["strict_window"] = e.strict_window;

  json doc;
  doc["problem"] = problem;
  doc["experiment"] = exp;
  return doc.dump(2) + "\n";
}

std::string config_hash(const ExperimentConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : emit_config(config)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace schedrate::cli
