#include <doctest.h>

#include <random>

#include <json.hpp>

#include "schedrate/cli/run.hpp"
#include "schedrate/errors.hpp"
#include "schedrate/spectrum.hpp"

using namespace schedrate;
using namespace schedrate::cli;

namespace {

const char* kCanonicalProblem = R"(
  "problem": {
    "alphabet": [{"symbol": "a", "time": 1}, {"symbol": "b", "time": 3}],
    "machines": ["1", "2"],
    "process": {"kind": "iid", "probs": {"a": 0.5, "b": 0.5}}
  })";

std::string config_with(const std::string& experiment) {
  return std::string("{") + kCanonicalProblem + ", \"experiment\": " + experiment + "}";
}

std::vector<std::string> errors_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.messages();
  }
  return {};
}

bool any_contains(const std::vector<std::string>& messages, const std::string& needle) {
  for (const auto& m : messages) {
    if (m.find(needle) != std::string::npos) return true;
  }
  return false;
}

std::string strip_wall_time(const std::string& text) {
  std::string out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    const auto line = text.substr(pos, end - pos);
    if (line.rfind("# wall_time_ms", 0) != 0) out += line + "\n";
    pos = end + 1;
  }
  return out;
}

}  // namespace

TEST_CASE("minimal and canonical configs parse") {
  const auto minimal = parse_config(R"({
    "problem": {"alphabet": [{"symbol": "x", "time": 2}], "machines": ["1"],
                "process": {"kind": "iid", "probs": {"x": 1}}},
    "experiment": {"kind": "validate"}})");
  CHECK(minimal.experiment.kind == "validate");
  CHECK(minimal.problem.speeds == std::vector<Rational>{Rational(1)});

  const auto canonical = parse_config(config_with(R"({"kind": "scan", "n_grid": [10], "alpha_grid": ["0.7"]})"));
  CHECK(ebar_theoretical(build_problem(canonical.problem)) == Rational(2, 3));
  CHECK(canonical.experiment.alpha_grid == std::vector<Rational>{Rational(7, 10)});

  const auto decimal_speed = parse_config(R"({
    "problem": {"alphabet": [{"symbol": "x", "time": 2}], "machines": ["1.5", "2/3", 4],
                "process": {"kind": "iid", "probs": {"x": 1}}},
    "experiment": {"kind": "validate"}})");
  CHECK(decimal_speed.problem.speeds == std::vector<Rational>{Rational(3, 2), Rational(2, 3), Rational(4)});
}

TEST_CASE("config errors are all reported") {
  const auto errs = errors_of(R"({
    "problem": {
      "alphabet": [{"symbol": "a", "time": 1}, {"symbol": "a", "time": 0}],
      "machines": ["1", "-2"],
      "process": {"kind": "markov", "initial": {"a": 1.0},
                  "transition": {"a": {"a": 0.8, "b": 0.1}, "b": {"a": 1.0}}}
    },
    "experiment": {"kind": "converse", "n_grid": [5], "colour": "red"},
    "extra": 1})");
  CHECK(any_contains(errs, "transition row 'a' sums to 0.9"));
  CHECK(any_contains(errs, "defined more than once"));
  CHECK(any_contains(errs, "must be a positive integer"));
  CHECK(any_contains(errs, "speed must be positive"));
  CHECK(any_contains(errs, "unknown key 'colour'"));
  CHECK(any_contains(errs, "unknown key 'extra'"));
  CHECK(any_contains(errs, "experiment.gap: required"));
  CHECK(errs.size() >= 7);

  CHECK(any_contains(errors_of(config_with(R"({"kind": "scan", "n_grid": [10]})")), "alpha_grid: required"));
  CHECK(any_contains(errors_of("not json"), "not valid JSON"));
  // Reducible chain is caught by the model constructor.
  CHECK(any_contains(errors_of(R"({
    "problem": {"alphabet": [{"symbol": "a", "time": 1}, {"symbol": "b", "time": 3}], "machines": ["1"],
                "process": {"kind": "markov", "initial": {"a": 1.0},
                            "transition": {"a": {"a": 0.5, "b": 0.5}, "b": {"b": 1.0}}}},
    "experiment": {"kind": "validate"}})"),
                     "reducible"));
}

TEST_CASE("property: emit_config round trips generated configs") {
  std::mt19937_64 rng(31);
  auto rand_prob = [&](std::size_t k) {
    std::vector<double> w(k);
    double s = 0;
    for (auto& x : w) s += (x = 1.0 + static_cast<double>(rng() % 100));
    for (auto& x : w) x /= s;
    double fix = 1.0;
    for (std::size_t i = 0; i + 1 < k; ++i) fix -= w[i];
    w.back() = fix;
    return w;
  };
  for (int trial = 0; trial < 200; ++trial) {
    ExperimentConfig c;
    const std::size_t k = 1 + rng() % 3;
    std::vector<std::string> syms;
    for (std::size_t i = 0; i < k; ++i) {
      syms.push_back("j" + std::to_string(i));
      c.problem.alphabet.emplace_back(syms.back(), 1 + static_cast<std::int64_t>(rng() % 9));
    }
    for (std::size_t i = 0, m = 1 + rng() % 4; i < m; ++i) {
      c.problem.speeds.emplace_back(1 + static_cast<std::int64_t>(rng() % 7), 1 + static_cast<std::int64_t>(rng() % 4));
    }
    auto iid_spec = [&] {
      ProcessSpec p;
      p.kind = "iid";
      const auto w = rand_prob(k);
      for (std::size_t i = 0; i < k; ++i) p.probs[syms[i]] = w[i];
      return p;
    };
    auto markov_spec = [&] {
      ProcessSpec p;
      p.kind = "markov";
      const auto init = rand_prob(k);
      for (std::size_t i = 0; i < k; ++i) {
        p.initial[syms[i]] = init[i];
        const auto row = rand_prob(k);
        for (std::size_t j = 0; j < k; ++j) p.transition[syms[i]][syms[j]] = row[j];
      }
      return p;
    };
    switch (rng() % 3) {
      case 0: c.problem.process = iid_spec(); break;
      case 1: c.problem.process = markov_spec(); break;
      default: {
        c.problem.process.kind = "mixture";
        c.problem.process.weights = {0.25, 0.75};
        c.problem.process.components = {iid_spec(), markov_spec()};
      }
    }
    auto& e = c.experiment;
    e.kind = experiment_kinds()[rng() % experiment_kinds().size()];
    e.n_grid = {1 + static_cast<std::int64_t>(rng() % 5), 10 + static_cast<std::int64_t>(rng() % 5)};
    e.alpha_grid = {Rational(1, 3), Rational(1 + static_cast<std::int64_t>(rng() % 5), 2)};
    e.alpha = Rational(static_cast<std::int64_t>(rng() % 17), 7);
    e.gamma = Rational(1, 10);
    e.gap = Rational(1, 1 + static_cast<std::int64_t>(rng() % 20));
    e.epsilon = 0.001 + static_cast<double>(rng() % 998) / 1000.0;
    e.trials = 1 + static_cast<std::int64_t>(rng() % 10000);
    e.master_seed = rng();
    e.budget = 1 + rng() % 100000000;
    e.delta = 1e-4 * static_cast<double>(1 + rng() % 100);
    e.scheduler = rng() % 2 ? "lpt" : "brute-force";
    e.workers = 1 + static_cast<unsigned>(rng() % 8);
    e.strict_window = rng() % 2;

    const auto text = emit_config(c);
    CAPTURE(text);
    CHECK(parse_config(text) == c);
    CHECK(emit_config(parse_config(text)) == text);
    CHECK(config_hash(parse_config(text)) == config_hash(c));
  }
}

TEST_CASE("emit formats") {
  ResultTable t;
  t.columns = {"n", "rate", "p", "ok", "label"};
  t.set_metadata("seed", "7");
  CHECK(emit(t, Format::Csv) == "# seed: 7\nn,rate,p,ok,label\n");

  t.add_row({std::int64_t{3}, Rational(2, 3), 0.25, true, std::string("x,\"y\"")});
  CHECK_THROWS_AS(t.add_row({std::int64_t{1}}), DomainError);
  CHECK(emit(t, Format::Csv) == "# seed: 7\nn,rate,p,ok,label\n3,2/3,0.250000000000,true,\"x,\"\"y\"\"\"\n");

  const auto jsonl = emit(t, Format::JsonLines);
  const auto nl = jsonl.find('\n');
  const auto meta = nlohmann::json::parse(jsonl.substr(0, nl));
  CHECK(meta["metadata"]["seed"] == "7");
  const auto row = nlohmann::json::parse(jsonl.substr(nl + 1));
  CHECK(row["rate"]["num"] == 2);
  CHECK(row["rate"]["den"] == 3);
  CHECK(row["p"] == 0.25);
  CHECK(row["ok"] == true);

  CHECK(format_double(0.25) == "0.250000000000");
  CHECK(format_double(1.0 / 3.0) == "0.333333333333");
}

TEST_CASE("run: schema, metadata, determinism") {
  const auto text = config_with(R"({"kind": "second-order", "n_grid": [64, 256], "epsilon": 0.1})");
  const auto config = parse_config(text);
  const auto table = run(config);
  CHECK(table.columns == std::vector<std::string>{"n", "epsilon", "r_n_plus", "cost_lo", "cost_hi", "prediction", "residual"});
  CHECK(table.rows.size() == 2);
  std::vector<std::string> keys;
  for (const auto& [k, v] : table.metadata) keys.push_back(k);
  for (const char* k : {"config_hash", "seed", "tool_version", "wall_time_ms"}) {
    CHECK(std::find(keys.begin(), keys.end(), k) != keys.end());
  }

  for (const char* experiment :
       {R"({"kind": "average-case", "n_grid": [40], "trials": 300, "master_seed": 5, "workers": 3})",
        R"({"kind": "validate", "n_grid": [4, 9], "trials": 50, "master_seed": 11})",
        R"({"kind": "scan", "n_grid": [10, 20, 40], "alpha_grid": ["1/2", "0.7", "1"]})",
        R"({"kind": "achievability", "n_grid": [4, 30], "gamma": "1/10", "scheduler": "lpt"})",
        R"({"kind": "converse", "n_grid": [4, 30], "gap": "1/6"})",
        R"({"kind": "cost", "n_grid": [2, 5], "alpha": "2/3", "scheduler": "brute-force"})"}) {
    CAPTURE(experiment);
    const auto c = parse_config(config_with(experiment));
    const auto a = strip_wall_time(emit(run(c), Format::Csv));
    const auto b = strip_wall_time(emit(run(c), Format::Csv));
    CHECK(a == b);
    CHECK(a.find("\n") != std::string::npos);
  }

  const auto cost = run(parse_config(config_with(R"({"kind": "cost", "n_grid": [2], "alpha": "2/3", "scheduler": "brute-force"})")));
  CHECK(std::get<Rational>(cost.rows[0][3]) == Rational(3, 2));
  CHECK(std::get<double>(cost.rows[0][2]) == doctest::Approx(0.25));
}

TEST_CASE("execute: exit codes and error records") {
  RunOptions opts;
  const auto ok = execute(config_with(R"({"kind": "converse", "n_grid": [10], "gap": "1/6"})"), opts);
  CHECK(ok.exit_code == kExitOk);

  const auto gap = execute(config_with(R"({"kind": "converse", "n_grid": [10], "gap": "2/3"})"), opts);
  CHECK(gap.exit_code == kExitConfig);
  const auto rec = nlohmann::json::parse(gap.error_record);
  CHECK(rec["exit_code"] == 2);
  CHECK(rec["messages"][0].get<std::string>().find("gap out of range") != std::string::npos);

  const auto budget = execute(
      config_with(R"({"kind": "cost", "n_grid": [30], "alpha": "1", "scheduler": "eft", "budget": 1000})"), opts);
  CHECK(budget.exit_code == kExitResource);
  CHECK(budget.error_record.find("1000") != std::string::npos);

  RunOptions wrong_kind;
  wrong_kind.expected_kind = "scan";
  CHECK(execute(config_with(R"({"kind": "converse", "n_grid": [10], "gap": "1/6"})"), wrong_kind).exit_code ==
        kExitConfig);

  RunOptions seeded;
  seeded.seed = 99;
  const auto s = execute(config_with(R"({"kind": "average-case", "n_grid": [20], "trials": 10})"), seeded);
  CHECK(s.output.find("# seed: 99") != std::string::npos);

  CHECK(exit_code_for(NumericError("x")) == kExitNumeric);
}
