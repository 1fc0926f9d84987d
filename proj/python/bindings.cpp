#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "schedrate/cli/config.hpp"
#include "schedrate/cli/run.hpp"
#include "schedrate/errors.hpp"
#include "schedrate/secondorder.hpp"
#include "schedrate/spectrum.hpp"

namespace py = pybind11;
using namespace schedrate;

namespace {

py::object fraction(const Rational& r) {
  static py::object cls = py::module_::import("fractions").attr("Fraction");
  return cls(r.numerator(), r.denominator());
}

// int, str ("3/2", "1.5") or fractions.Fraction
Rational to_rational(const py::handle& obj) { return parse_rational(py::str(obj).cast<std::string>()); }

std::map<std::string, double> prob_map(const py::handle& obj) { return obj.cast<std::map<std::string, double>>(); }

cli::ProcessSpec process_spec(const py::dict& d) {
  cli::ProcessSpec spec;
  spec.kind = d["kind"].cast<std::string>();
  if (d.contains("probs")) spec.probs = prob_map(d["probs"]);
  if (d.contains("initial")) spec.initial = prob_map(d["initial"]);
  if (d.contains("transition")) {
    spec.transition = d["transition"].cast<std::map<std::string, std::map<std::string, double>>>();
  }
  if (d.contains("components")) {
    for (const auto& c : d["components"]) {
      auto comp = c.cast<py::dict>();
      spec.weights.push_back(comp["weight"].cast<double>());
      spec.components.push_back(process_spec(comp["process"].cast<py::dict>()));
    }
  }
  return spec;
}

SchedulingProblem make_problem(const std::vector<std::pair<std::string, std::int64_t>>& alphabet,
                               const py::list& machines, const py::dict& process) {
  cli::ProblemSpec spec;
  spec.alphabet = alphabet;
  for (const auto& v : machines) spec.speeds.push_back(to_rational(v));
  spec.process = process_spec(process);
  return cli::build_problem(spec);
}

Scheduler make_scheduler(const std::string& strategy, std::uint64_t budget) {
  return Scheduler{parse_strategy(strategy), budget};
}

}  // namespace

PYBIND11_MODULE(_schedrate, m) {
  m.doc() = "Stochastic makespan scheduling on uniform machines: exact rates, costs and bounds";

  py::register_exception<ResourceError>(m, "ResourceError", PyExc_RuntimeError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
  static py::exception<ConfigError> config_error(m, "ConfigError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      py::set_error(config_error, e.what());
    }
  });

  py::class_<SchedulingProblem>(m, "Problem")
      .def(py::init(&make_problem), py::arg("alphabet"), py::arg("machines"), py::arg("process"),
           "alphabet: [(symbol, time)], machines: speeds as int/str/Fraction, process: dict as in config files")
      .def_static(
          "from_config",
          [](const std::string& text) { return cli::build_problem(cli::parse_config(text).problem); },
          py::arg("text"))
      .def_property_readonly("v_sum", [](const SchedulingProblem& p) { return fraction(p.machines().v_sum()); })
      .def_property_readonly("v_min", [](const SchedulingProblem& p) { return fraction(p.machines().v_min()); })
      .def_property_readonly("symbols", [](const SchedulingProblem& p) { return p.alphabet().symbols(); })
      .def("ebar", [](const SchedulingProblem& p) { return fraction(ebar_theoretical(p)); })
      .def("ebar_lower", [](const SchedulingProblem& p) { return fraction(ebar_underline_theoretical(p)); })
      .def("strong_converse", &strong_converse_holds);

  m.def(
      "sum_distribution",
      [](const SchedulingProblem& p, std::int64_t n) {
        auto dist = sum_distribution(p.process(), p.alphabet(), n);
        return py::make_tuple(dist.min_sum(), dist.masses());
      },
      py::arg("problem"), py::arg("n"), "(min_sum, masses): masses[k] = P(T_n = min_sum + k)");

  m.def(
      "schedule",
      [](const SchedulingProblem& p, const std::vector<std::string>& jobs, const std::string& strategy,
         std::uint64_t budget) {
        const auto seq = JobSequence::from_symbols(jobs, p.alphabet());
        const auto scheduler = make_scheduler(strategy, budget);
        const auto a = scheduler.assign(seq, p.alphabet(), p.machines());
        return py::make_tuple(a.machine_of, fraction(makespan(a, seq, p.alphabet(), p.machines())));
      },
      py::arg("problem"), py::arg("jobs"), py::arg("strategy") = "eft", py::arg("budget") = kDefaultBudget,
      "(machine_of, makespan)");

  m.def(
      "cost_exact",
      [](const SchedulingProblem& p, std::int64_t n, const py::handle& alpha, const std::string& strategy,
         std::uint64_t budget) {
        return fraction(cost_exact(make_scheduler(strategy, budget), ThresholdDiscardSet(n, to_rational(alpha)), p));
      },
      py::arg("problem"), py::arg("n"), py::arg("alpha"), py::arg("strategy") = "lpt",
      py::arg("budget") = kDefaultBudget);

  m.def(
      "discard_probability",
      [](const SchedulingProblem& p, std::int64_t n, const py::handle& alpha) {
        return discard_probability(ThresholdDiscardSet(n, to_rational(alpha)), p);
      },
      py::arg("problem"), py::arg("n"), py::arg("alpha"));

  m.def(
      "r_n_plus",
      [](const SchedulingProblem& p, std::int64_t n, double eps) { return fraction(r_n_plus(n, eps, p)); },
      py::arg("problem"), py::arg("n"), py::arg("epsilon"));
  m.def(
      "berry_esseen_prediction",
      [](const SchedulingProblem& p, std::int64_t n, double eps) { return berry_esseen_prediction(n, eps, p); },
      py::arg("problem"), py::arg("n"), py::arg("epsilon"));
  m.def(
      "berry_esseen_error_bound",
      [](const SchedulingProblem& p, std::int64_t n) { return berry_esseen_error_bound(n, p); },
      py::arg("problem"), py::arg("n"));
  m.def("normal_cdf", &normal_cdf, py::arg("x"));
  m.def("normal_quantile", &normal_quantile, py::arg("p"));

  m.def(
      "run",
      [](const std::string& text, const std::string& format, std::optional<std::uint64_t> seed) {
        auto config = cli::parse_config(text);
        if (seed) config.experiment.master_seed = *seed;
        return cli::emit(cli::run(config), cli::parse_format(format));
      },
      py::arg("config"), py::arg("format") = "csv", py::arg("seed") = py::none(),
      "Run an experiment config (JSON text) and return the emitted table");
  m.def(
      "canonical_config", [](const std::string& text) { return cli::emit_config(cli::parse_config(text)); },
      py::arg("config"));

  m.attr("__version__") = cli::kToolVersion;
}
