// schedrate <subcommand> --config <path> [--out <path>] [--format csv|jsonl] [--seed N] [--workers N]

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "schedrate/cli/run.hpp"

namespace {

struct Args {
  std::string config;
  std::string out;
  std::string format = "csv";
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
};

}  // namespace

int main(int argc, char** argv) {
  using namespace schedrate::cli;

  CLI::App app{"Exact and sampled experiments for stochastic makespan scheduling on uniform machines"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  Args args;
  for (const auto& kind : experiment_kinds()) {
    auto* sub = app.add_subcommand(kind, "run a " + kind + " experiment");
    sub->add_option("--config", args.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", args.out, "output file (default: stdout)");
    sub->add_option("--format", args.format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
    sub->add_option("--seed", args.seed, "override experiment.master_seed");
    sub->add_option("--workers", args.workers, "worker threads for grid experiments")->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfig;
  }

  std::ifstream in(args.config);
  std::stringstream text;
  text << in.rdbuf();

  RunOptions options;
  options.seed = args.seed;
  options.workers = args.workers;
  options.expected_kind = app.get_subcommands().front()->get_name();
  options.format = parse_format(args.format);

  const auto outcome = execute(text.str(), options);
  if (outcome.exit_code != kExitOk) {
    std::cerr << outcome.error_record << "\n";
    return outcome.exit_code;
  }
  if (args.out.empty()) {
    std::cout << outcome.output;
  } else {
    std::ofstream out(args.out, std::ios::binary);
    if (!(out << outcome.output)) {
      std::cerr << R"({"error":"resource","exit_code":3,"messages":["cannot write )" << args.out << "\"]}\n";
      return kExitResource;
    }
  }
  return kExitOk;
}
