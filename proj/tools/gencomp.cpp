// Command-line front end: run experiments, verify traces, list adversaries.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "gencomp/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"generic-computability experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::optional<unsigned> stages;
  std::optional<std::uint64_t> seed;
  auto* run = app.add_subcommand("run", "run an experiment config");
  run->add_option("config", config_path, "config JSON")->required();
  run->add_option("--stages", stages, "override the stage count");
  run->add_option("--seed", seed, "override the seed");
  run->add_option("--out-dir", out_dir, "where trace/report/CSV go");

  std::string trace_path;
  auto* verify = app.add_subcommand("verify", "replay a trace and check its invariants");
  verify->add_option("trace", trace_path, "trace JSON")->required();

  auto* catalog = app.add_subcommand("catalog", "list built-in adversaries");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(gencomp::ExitCode::kParse);
  }

  if (*run) {
    gencomp::Overrides o;
    o.stages = stages;
    o.seed = seed;
    return static_cast<int>(gencomp::run_experiment_file(config_path, o, out_dir));
  }
  if (*verify) return static_cast<int>(gencomp::verify_trace_file(trace_path));
  if (*catalog) {
    for (const auto& a : gencomp::builtin_adversaries()) {
      std::cout << a.name << (a.needs_seed ? " (seeded)" : "") << ": " << a.summary << '\n';
    }
  }
  return 0;
}
